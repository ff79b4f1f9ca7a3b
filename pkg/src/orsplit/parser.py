"""Tokenizer and operator-precedence parser for the Prolog subset.

Accepted: facts, rules, integers, atoms, variables, ``[H|T]`` lists, the
infix operators listed in ``INFIX`` and the directive
``:- parallel name/arity[, name/arity...].``
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .terms import CONS, NIL, Struct, Var, format_term

INFIX = {
    ":-": (1200, "xfx"),
    ",": (1000, "xfy"),
    "=": (700, "xfx"),
    "\\=": (700, "xfx"),
    "==": (700, "xfx"),
    "\\==": (700, "xfx"),
    "is": (700, "xfx"),
    "=:=": (700, "xfx"),
    "=\\=": (700, "xfx"),
    "<": (700, "xfx"),
    ">": (700, "xfx"),
    "=<": (700, "xfx"),
    ">=": (700, "xfx"),
    "+": (500, "yfx"),
    "-": (500, "yfx"),
    "*": (400, "yfx"),
    "/": (400, "yfx"),
    "//": (400, "yfx"),
    "mod": (400, "yfx"),
}
PREFIX = {"-": (200, "fy"), ":-": (1200, "fx"), "parallel": (1150, "fx")}

SYMBOL_CHARS = set("+-*/\\^<>=~:.?@#&$")


class ParseError(Exception):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.message = message


@dataclass(frozen=True)
class Token:
    kind: str  # atom, var, int, punct, functor, end, eof
    value: object
    line: int
    column: int
    quoted: bool = False


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def advance(k: int):
        nonlocal i, line, col
        for _ in range(k):
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = text[i]
        if c.isspace():
            advance(1)
            continue
        if c == "%":
            while i < n and text[i] != "\n":
                advance(1)
            continue
        if c == "/" and text.startswith("/*", i):
            end = text.find("*/", i + 2)
            if end < 0:
                raise ParseError(line, col, "unterminated block comment")
            advance(end + 2 - i)
            continue
        start_line, start_col = line, col
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("int", int(text[i:j]), start_line, start_col))
            advance(j - i)
        elif c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            advance(j - i)
            if c.isupper() or c == "_":
                tokens.append(Token("var", word, start_line, start_col))
            else:
                kind = "functor" if i < n and text[i] == "(" else "atom"
                tokens.append(Token(kind, word, start_line, start_col))
        elif c == "'":
            j = i + 1
            buf = []
            while True:
                if j >= n:
                    raise ParseError(start_line, start_col, "unterminated quoted atom")
                if text[j] == "\\" and j + 1 < n:
                    buf.append(text[j + 1])
                    j += 2
                elif text[j] == "'":
                    if j + 1 < n and text[j + 1] == "'":
                        buf.append("'")
                        j += 2
                    else:
                        break
                else:
                    buf.append(text[j])
                    j += 1
            advance(j + 1 - i)
            kind = "functor" if i < n and text[i] == "(" else "atom"
            tokens.append(Token(kind, "".join(buf), start_line, start_col, quoted=True))
        elif c in "()[]|,":
            tokens.append(Token("punct", c, start_line, start_col))
            advance(1)
        elif c == "!" or c == ";":
            tokens.append(Token("atom", c, start_line, start_col))
            advance(1)
        elif c in SYMBOL_CHARS:
            j = i
            while j < n and text[j] in SYMBOL_CHARS:
                j += 1
            word = text[i:j]
            if word == "." and (j >= n or text[j].isspace() or text[j] == "%"):
                tokens.append(Token("end", ".", start_line, start_col))
                advance(1)
                continue
            advance(j - i)
            kind = "functor" if i < n and text[i] == "(" else "atom"
            tokens.append(Token(kind, word, start_line, start_col))
        else:
            raise ParseError(line, col, f"unexpected character {c!r}")
    tokens.append(Token("eof", None, line, col))
    return tokens


@dataclass
class Clause:
    """A clause template; variables are numbered ``0..nvars-1`` by first occurrence."""

    head: object
    body: tuple
    nvars: int
    var_names: dict = field(default_factory=dict, compare=False)

    @property
    def key(self) -> tuple[str, int]:
        h = self.head
        return (h.name, len(h.args)) if type(h) is Struct else (h, 0)


@dataclass
class Program:
    clauses: list[Clause] = field(default_factory=list)
    parallel_predicates: set = field(default_factory=set)


@dataclass
class Query:
    goals: tuple
    nvars: int
    var_names: dict  # name -> local id, in order of first occurrence


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.varmap: dict[str, int] = {}

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, tok: Token, msg: str):
        raise ParseError(tok.line, tok.column, msg)

    def expect(self, kind: str, value=None) -> Token:
        tok = self.next()
        if tok.kind != kind or (value is not None and tok.value != value):
            want = value if value is not None else kind
            self.error(tok, f"expected {want!r}, found {tok.value!r}")
        return tok

    def variable(self, name: str):
        if name == "_":
            idx = len(self.varmap)
            self.varmap[f"_#{idx}"] = idx
            return Var(idx)
        if name not in self.varmap:
            self.varmap[name] = len(self.varmap)
        return Var(self.varmap[name])

    def _starts_term(self, tok: Token) -> bool:
        if tok.kind in ("var", "int", "functor"):
            return True
        if tok.kind == "punct":
            return tok.value in "(["
        if tok.kind == "atom":
            return True
        return False

    def parse(self, max_prec: int):
        left, left_prec = self.parse_primary(max_prec)
        return self.parse_infix(left, left_prec, max_prec)

    def parse_infix(self, left, left_prec, max_prec):
        while True:
            tok = self.peek()
            if tok.kind == "punct" and tok.value == ",":
                name = ","
            elif tok.kind == "atom" and tok.value in INFIX and not tok.quoted:
                name = tok.value
            else:
                return left
            prec, typ = INFIX[name]
            if prec > max_prec:
                return left
            left_max = prec if typ[0] == "y" else prec - 1
            right_max = prec if typ[2] == "y" else prec - 1
            if left_prec > left_max:
                return left
            self.next()
            right = self.parse(right_max)
            left = Struct(name, (left, right))
            left_prec = prec

    def parse_primary(self, max_prec):
        tok = self.next()
        if tok.kind == "int":
            return tok.value, 0
        if tok.kind == "var":
            return self.variable(tok.value), 0
        if tok.kind == "functor":
            self.expect("punct", "(")
            args = [self.parse(999)]
            while self.peek().kind == "punct" and self.peek().value == ",":
                self.next()
                args.append(self.parse(999))
            self.expect("punct", ")")
            return Struct(tok.value, tuple(args)), 0
        if tok.kind == "punct" and tok.value == "(":
            inner = self.parse(1200)
            self.expect("punct", ")")
            return inner, 0
        if tok.kind == "punct" and tok.value == "[":
            return self.parse_list(), 0
        if tok.kind == "atom":
            name = tok.value
            if name == "-" and not tok.quoted:
                nxt = self.peek()
                if nxt.kind == "int" and nxt.line == tok.line and nxt.column == tok.column + 1:
                    self.next()
                    return -nxt.value, 0
            if name in PREFIX and not tok.quoted and self._starts_term(self.peek()):
                nxt = self.peek()
                infix_follows = nxt.kind == "atom" and nxt.value in INFIX
                if not infix_follows:
                    prec, typ = PREFIX[name]
                    if prec > max_prec:
                        prec = 999
                    arg_max = prec if typ[1] == "y" else prec - 1
                    arg = self.parse(arg_max)
                    return Struct(name, (arg,)), prec
            if name in INFIX and not tok.quoted:
                prec = INFIX[name][0]
                return name, (prec if prec <= max_prec else 0)
            return name, 0
        if tok.kind == "end":
            self.error(tok, "unexpected end of clause")
        if tok.kind == "eof":
            self.error(tok, "unexpected end of input")
        self.error(tok, f"unexpected {tok.value!r}")

    def parse_list(self):
        if self.peek().kind == "punct" and self.peek().value == "]":
            self.next()
            return NIL
        items = [self.parse(999)]
        while self.peek().kind == "punct" and self.peek().value == ",":
            self.next()
            items.append(self.parse(999))
        tail = NIL
        if self.peek().kind == "punct" and self.peek().value == "|":
            self.next()
            tail = self.parse(999)
        self.expect("punct", "]")
        out = tail
        for item in reversed(items):
            out = Struct(CONS, (item, out))
        return out


def _flatten_conj(term, tok: Token, parser: _Parser) -> list:
    out = []
    stack = [term]
    while stack:
        t = stack.pop()
        if type(t) is Struct and t.name == "," and len(t.args) == 2:
            stack.append(t.args[1])
            stack.append(t.args[0])
        else:
            _check_callable(t, tok, parser)
            out.append(t)
    return out


def _check_callable(t, tok: Token, parser: _Parser):
    if type(t) is Var:
        parser.error(tok, "variable goals are not supported")
    if type(t) is int:
        parser.error(tok, f"integer {t} is not callable")
    name = t.name if type(t) is Struct else t
    if name in ("!", ";", "->", "\\+"):
        parser.error(tok, f"unsupported control construct {name!r}")


def _parse_directive(body, tok: Token, parser: _Parser, program: Program):
    if not (type(body) is Struct and body.name == "parallel" and len(body.args) == 1):
        parser.error(tok, "only ':- parallel Name/Arity.' directives are supported")
    specs = _flatten_conj(body.args[0], tok, parser) if type(body.args[0]) is Struct and body.args[0].name == "," else [body.args[0]]
    for spec in specs:
        if not (
            type(spec) is Struct
            and spec.name == "/"
            and len(spec.args) == 2
            and type(spec.args[0]) is str
            and type(spec.args[1]) is int
        ):
            parser.error(tok, "parallel directive expects Name/Arity")
        program.parallel_predicates.add((spec.args[0], spec.args[1]))


def parse_program(text: str) -> Program:
    parser = _Parser(text)
    program = Program()
    while parser.peek().kind != "eof":
        parser.varmap = {}
        start = parser.peek()
        term = parser.parse(1200)
        end = parser.peek()
        if end.kind != "end":
            parser.error(end, f"expected '.', found {end.value!r}")
        parser.next()
        if type(term) is Struct and term.name == ":-" and len(term.args) == 1:
            _parse_directive(term.args[0], start, parser, program)
            continue
        if type(term) is Struct and term.name == ":-" and len(term.args) == 2:
            head, body = term.args
            goals = tuple(_flatten_conj(body, start, parser))
        else:
            head, goals = term, ()
        if type(head) not in (str, Struct):
            parser.error(start, "clause head must be an atom or compound term")
        if type(head) is str and head in INFIX:
            parser.error(start, f"operator {head!r} cannot be a clause head")
        names = {v: k for k, v in parser.varmap.items() if not k.startswith("_#")}
        program.clauses.append(Clause(head, goals, len(parser.varmap), names))
    return program


def parse_query(text: str) -> Query:
    parser = _Parser(text)
    if parser.peek().kind == "eof":
        parser.error(parser.peek(), "empty query")
    start = parser.peek()
    term = parser.parse(1200)
    tok = parser.peek()
    if tok.kind == "end":
        parser.next()
        tok = parser.peek()
    if tok.kind != "eof":
        parser.error(tok, f"unexpected {tok.value!r} after query")
    goals = tuple(_flatten_conj(term, start, parser))
    names = {k: v for k, v in parser.varmap.items() if not k.startswith("_")}
    return Query(goals, len(parser.varmap), names)


def format_clause(clause: Clause) -> str:
    names = {i: f"V{i}" for i in range(clause.nvars)}
    head = format_term(clause.head, quoted=True, var_names=names)
    if not clause.body:
        return head + "."
    body = ", ".join(format_term(g, quoted=True, var_names=names) for g in clause.body)
    return f"{head} :- {body}."


def format_program(program: Program) -> str:
    lines = [f":- parallel {name}/{arity}." for name, arity in sorted(program.parallel_predicates)]
    lines.extend(format_clause(c) for c in program.clauses)
    return "\n".join(lines) + "\n"
