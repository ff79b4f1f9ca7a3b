"""In-process message bus with per-pair FIFO and seeded reorder injection.

Every message is encoded to a binary frame on ``send`` and decoded on
delivery, so byte counts are real. In lockstep mode the bus has a logical
clock advanced by the driver; each envelope gets a seeded random delay of
up to ``reorder_window`` ticks, clamped so that a pair's envelopes are
never delivered out of order. Messages from different senders interleave
freely.
"""

from __future__ import annotations

import random
import threading
from collections import defaultdict
from dataclasses import dataclass

from .messages import kind_name
from .wire import decode_frame, encode_frame


@dataclass
class Envelope:
    src: int
    dst: int
    seq: int
    kind: str
    deliver_at: int
    order: int
    frame: bytes

    @property
    def size(self) -> int:
        return len(self.frame)


class Bus:
    def __init__(self, agents: int, db, seed: int = 0, reorder_window: int = 0):
        if agents < 1:
            raise ValueError("need at least one agent")
        self.agents = agents
        self.db = db
        self.reorder_window = reorder_window
        self._rng = random.Random(seed)
        self._queues = [[] for _ in range(agents)]
        self._seq = defaultdict(int)
        self._last = defaultdict(int)
        self._order = 0
        self.now = 0
        self.count = defaultdict(int)
        self.bytes = defaultdict(int)
        self.trace: list | None = None
        self._lock = threading.Lock()
        self._arrived = [threading.Condition(self._lock) for _ in range(agents)]

    def _check(self, rank):
        if not 0 <= rank < self.agents:
            raise ValueError(f"unknown rank {rank}")

    def send(self, src: int, dst: int, msg):
        self._check(src)
        self._check(dst)
        with self._lock:
            pair = (src, dst)
            seq = self._seq[pair]
            self._seq[pair] = seq + 1
            frame = encode_frame(self.db, msg, src, dst, seq)
            delay = self._rng.randint(0, self.reorder_window) if self.reorder_window else 0
            at = max(self.now + delay, self._last[pair])
            self._last[pair] = at
            self._order += 1
            kind = kind_name(msg)
            self._queues[dst].append(Envelope(src, dst, seq, kind, at, self._order, frame))
            self.count[kind] += 1
            self.bytes[kind] += len(frame)
            if self.trace is not None:
                self.trace.append((kind, len(frame)))
            self._arrived[dst].notify()

    def broadcast(self, src: int, msg):
        for dst in range(self.agents):
            if dst != src:
                self.send(src, dst, msg)

    def poll(self, rank: int, kinds=None) -> list:
        """Non-blocking drain of deliverable messages, optionally only of the given kinds."""
        self._check(rank)
        with self._lock:
            queue = self._queues[rank]
            if not queue:
                return []
            ready = []
            rest = []
            for env in queue:
                if env.deliver_at <= self.now and (kinds is None or env.kind in kinds):
                    ready.append(env)
                else:
                    rest.append(env)
            if not ready:
                return []
            self._queues[rank] = rest
        ready.sort(key=lambda e: (e.deliver_at, e.order))
        out = []
        for env in ready:
            src, dst, seq, msg = decode_frame(self.db, env.frame)
            if (src, dst, seq) != (env.src, env.dst, env.seq):
                raise RuntimeError("frame header does not match envelope")
            out.append(msg)
        return out

    def wait(self, rank: int, timeout: float):
        """Threaded mode: block until something is queued for ``rank`` or the timeout passes."""
        with self._lock:
            if not self._queues[rank]:
                self._arrived[rank].wait(timeout)

    def tick(self):
        self.now += 1

    def in_flight(self, kinds=None) -> int:
        with self._lock:
            return sum(1 for q in self._queues for e in q if kinds is None or e.kind in kinds)

    def queued(self, rank: int) -> list:
        """Envelopes still queued for ``rank`` (for test assertions)."""
        with self._lock:
            return list(self._queues[rank])

    @property
    def messages_total(self) -> int:
        return sum(self.count.values())

    @property
    def bytes_total(self) -> int:
        return sum(self.bytes.values())
