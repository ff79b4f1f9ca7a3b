"""Term representation for the Prolog subset.

Atoms are plain ``str``, integers are ``int``, variables are :class:`Var`
and compound terms are :class:`Struct`. Lists use the usual ``'.'/2`` cells
terminated by the atom ``'[]'``.
"""

from __future__ import annotations

NIL = "[]"
CONS = "."


class Var:
    __slots__ = ("id",)

    def __init__(self, id: int):
        self.id = id

    def __eq__(self, other):
        return type(other) is Var and other.id == self.id

    def __hash__(self):
        return hash(("var", self.id))

    def __repr__(self):
        return f"_G{self.id}"


class Struct:
    __slots__ = ("name", "args")

    def __init__(self, name: str, args: tuple):
        self.name = name
        self.args = args

    def __eq__(self, other):
        return type(other) is Struct and other.name == self.name and other.args == self.args

    def __hash__(self):
        return hash((self.name, self.args))

    def __repr__(self):
        return format_term(self)


def make_list(items, tail=NIL):
    out = tail
    for item in reversed(items):
        out = Struct(CONS, (item, out))
    return out


def functor_of(term) -> tuple[str, int]:
    if type(term) is Struct:
        return term.name, len(term.args)
    if type(term) is str:
        return term, 0
    raise TypeError(f"not callable: {term!r}")


def deref(term, store):
    while type(term) is Var:
        bound = store.get(term.id)
        if bound is None:
            return term
        term = bound
    return term


def resolve(term, store):
    """Fully substitute bindings from ``store`` into ``term``."""
    term = deref(term, store)
    if type(term) is Struct:
        return Struct(term.name, tuple(resolve(a, store) for a in term.args))
    return term


_SYMBOL_CHARS = set("+-*/\\^<>=~:.?@#&$")


def _atom_text(name: str, quoted: bool) -> str:
    if not quoted:
        return name
    if name in ("[]", "!", ";", ","):
        return name if name != "," else "','"
    if name and name[0].islower() and all(c.isalnum() or c == "_" for c in name):
        return name
    if name and all(c in _SYMBOL_CHARS for c in name):
        return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"


def format_term(term, store=None, quoted=False, var_names=None) -> str:
    """Render a term the way ``write/1`` (or ``writeq/1`` when quoted) would.

    Operators are written in canonical functional form except lists, which
    keep bracket notation.
    """
    parts: list[str] = []
    _fmt(term, store, quoted, var_names, parts)
    return "".join(parts)


def _fmt(term, store, quoted, var_names, out):
    if store is not None:
        term = deref(term, store)
    t = type(term)
    if t is int:
        out.append(str(term))
    elif t is str:
        out.append(_atom_text(term, quoted))
    elif t is Var:
        if var_names is not None and term.id in var_names:
            out.append(var_names[term.id])
        else:
            out.append(f"_G{term.id}")
    elif term.name == CONS and len(term.args) == 2:
        out.append("[")
        _fmt(term.args[0], store, quoted, var_names, out)
        rest = term.args[1]
        while True:
            if store is not None:
                rest = deref(rest, store)
            if type(rest) is Struct and rest.name == CONS and len(rest.args) == 2:
                out.append(",")
                _fmt(rest.args[0], store, quoted, var_names, out)
                rest = rest.args[1]
            elif rest == NIL:
                break
            else:
                out.append("|")
                _fmt(rest, store, quoted, var_names, out)
                break
        out.append("]")
    else:
        out.append(_atom_text(term.name, quoted))
        out.append("(")
        for i, arg in enumerate(term.args):
            if i:
                out.append(",")
            _fmt(arg, store, quoted, var_names, out)
        out.append(")")
