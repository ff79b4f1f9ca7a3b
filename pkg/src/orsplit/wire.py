"""Binary framing for messages and share payloads.

Frame: version u8, kind u8, src u16, dst u16, seq u32, body length u32,
then the body; all integers little-endian. The body is a tagged value
stream. Structures, environments and continuation cells are memoized by
identity so that shared subterms are sent once and arrive shared.
"""

from __future__ import annotations

import struct
import sys
from dataclasses import fields

from .engine import Database
from .messages import MESSAGE_TYPES
from .splitting import CPRecord, Label, SharePayload
from .terms import Struct, Var

VERSION = 1
HEADER = struct.Struct("<BBHHII")

_NONE, _FALSE, _TRUE, _INT, _STR, _TUPLE, _LIST, _VAR, _STRUCT, _REF, _LABEL, _CELLS, _RECORD = range(13)

RECORD_TYPES = MESSAGE_TYPES + (SharePayload, CPRecord)
_RECORD_CODE = {cls: i for i, cls in enumerate(RECORD_TYPES)}
_FIELDS = {cls: tuple(f.name for f in fields(cls)) for cls in RECORD_TYPES}

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


class WireError(Exception):
    pass


class _Writer:
    def __init__(self, db: Database):
        self.db = db
        self.out = bytearray()
        self.memo: dict = {}

    def uvar(self, n: int):
        out = self.out
        while n >= 0x80:
            out.append((n & 0x7F) | 0x80)
            n >>= 7
        out.append(n)

    def text(self, s: str):
        b = s.encode("utf-8")
        self.uvar(len(b))
        self.out += b

    def _remember(self, obj) -> bool:
        """Emit a back-reference if ``obj`` was sent already; otherwise reserve its slot."""
        key = id(obj)
        idx = self.memo.get(key)
        if idx is not None:
            self.out.append(_REF)
            self.uvar(idx)
            return True
        self.memo[key] = len(self.memo)
        return False

    def value(self, v):
        t = type(v)
        out = self.out
        if v is None:
            out.append(_NONE)
        elif t is bool:
            out.append(_TRUE if v else _FALSE)
        elif t is int:
            out.append(_INT)
            self.uvar((v << 1) if v >= 0 else ((-v << 1) - 1))
        elif t is str:
            out.append(_STR)
            self.text(v)
        elif t is Var:
            out.append(_VAR)
            self.uvar(v.id)
        elif t is Label:
            out.append(_LABEL)
            self.uvar(v.rank)
            self.uvar(v.counter)
            self.uvar(v.cp_index)
        elif t is Struct:
            if self._remember(v):
                return
            out.append(_STRUCT)
            self.text(v.name)
            self.uvar(len(v.args))
            for a in v.args:
                self.value(a)
        elif t is tuple:
            out.append(_TUPLE)
            self.uvar(len(v))
            for a in v:
                self.value(a)
        elif t is list:
            if self._remember(v):
                return
            out.append(_LIST)
            self.uvar(len(v))
            for a in v:
                self.value(a)
        elif t in _RECORD_CODE:
            out.append(_RECORD)
            self.uvar(_RECORD_CODE[t])
            for name in _FIELDS[t]:
                if t is CPRecord and name == "cont":
                    self.cont(v.cont)
                else:
                    self.value(getattr(v, name))
        else:
            raise WireError(f"cannot encode {t.__name__}")

    def cont(self, cell):
        """A continuation chain: cells not yet sent, then the shared tail."""
        chain = []
        while cell is not None and id(cell) not in self.memo:
            chain.append(cell)
            cell = cell[3]
        if not chain:
            self.value(None) if cell is None else self._remember(cell)
            return
        self.out.append(_CELLS)
        self.uvar(len(chain))
        for c in chain:
            self.memo[id(c)] = len(self.memo)
        for c in chain:
            self.uvar(self.db.site_id(c[0]))
            self.value(c[1])
        if cell is None:
            self.value(None)
        else:
            self._remember(cell)


class _Reader:
    def __init__(self, db: Database, data: bytes):
        self.db = db
        self.data = data
        self.pos = 0
        self.memo: list = []

    def uvar(self) -> int:
        data = self.data
        shift = 0
        n = 0
        while True:
            b = data[self.pos]
            self.pos += 1
            n |= (b & 0x7F) << shift
            if b < 0x80:
                return n
            shift += 7

    def text(self) -> str:
        n = self.uvar()
        s = self.data[self.pos : self.pos + n].decode("utf-8")
        self.pos += n
        return s

    def value(self):
        tag = self.data[self.pos]
        self.pos += 1
        if tag == _NONE:
            return None
        if tag == _FALSE:
            return False
        if tag == _TRUE:
            return True
        if tag == _INT:
            z = self.uvar()
            return (z >> 1) if not z & 1 else -((z + 1) >> 1)
        if tag == _STR:
            return self.text()
        if tag == _VAR:
            return Var(self.uvar())
        if tag == _LABEL:
            return Label(self.uvar(), self.uvar(), self.uvar())
        if tag == _REF:
            return self.memo[self.uvar()]
        if tag == _STRUCT:
            slot = len(self.memo)
            self.memo.append(None)
            name = self.text()
            n = self.uvar()
            s = Struct(name, tuple(self.value() for _ in range(n)))
            self.memo[slot] = s
            return s
        if tag == _TUPLE:
            n = self.uvar()
            return tuple(self.value() for _ in range(n))
        if tag == _LIST:
            lst: list = []
            self.memo.append(lst)
            n = self.uvar()
            for _ in range(n):
                lst.append(self.value())
            return lst
        if tag == _CELLS:
            n = self.uvar()
            base = len(self.memo)
            self.memo.extend([None] * n)
            parts = []
            for _ in range(n):
                site = self.db.sites[self.uvar()]
                parts.append((site, self.value()))
            nxt = self.value()
            for i in range(n - 1, -1, -1):
                (gcode, proc), env = parts[i]
                nxt = (gcode, env, proc, nxt)
                self.memo[base + i] = nxt
            return nxt
        if tag == _RECORD:
            cls = RECORD_TYPES[self.uvar()]
            return cls(**{name: self.value() for name in _FIELDS[cls]})
        raise WireError(f"bad tag {tag} at offset {self.pos - 1}")


def encode_body(db: Database, obj) -> bytes:
    w = _Writer(db)
    w.value(obj)
    return bytes(w.out)


def decode_body(db: Database, data: bytes):
    r = _Reader(db, data)
    obj = r.value()
    if r.pos != len(data):
        raise WireError("trailing bytes in body")
    return obj


def encode_frame(db: Database, msg, src: int, dst: int, seq: int) -> bytes:
    body = encode_body(db, msg)
    return HEADER.pack(VERSION, _RECORD_CODE[type(msg)], src, dst, seq, len(body)) + body


def decode_frame(db: Database, frame: bytes):
    """Returns ``(src, dst, seq, message)``."""
    if len(frame) < HEADER.size:
        raise WireError("short frame")
    version, kind, src, dst, seq, length = HEADER.unpack_from(frame)
    if version != VERSION:
        raise WireError(f"unsupported frame version {version}")
    if len(frame) != HEADER.size + length:
        raise WireError("frame length mismatch")
    msg = decode_body(db, frame[HEADER.size :])
    if _RECORD_CODE.get(type(msg)) != kind:
        raise WireError("frame kind does not match body")
    return src, dst, seq, msg


def payload_size(db: Database, payload: SharePayload) -> int:
    return len(encode_body(db, payload))
