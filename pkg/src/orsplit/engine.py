"""Sequential resolution engine: choice-point stack, value trail, backtracking.

Clauses are interpreted directly. Head unification binds clause-local
variables on first occurrence without building a renamed head, and the
first head argument is indexed so deterministic calls create no
choice-point.

Continuations are structure-shared cells ``(goal code, env, proc, next)``:
a goal is a compiled template plus the clause environment ``env`` holding
the terms of its variables, so body goals are never materialized unless a
callee needs a structured argument.

Every binding goes on the value trail as ``(var id, value)``. A binding is
*conditional* with respect to a choice-point when its variable id is below
that choice-point's ``var_mark``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .parser import Clause, Program, Query, parse_program, parse_query
from .terms import Struct, Var, deref, format_term, resolve

TRUST_FAIL = "trust_fail"
SCHEDULE = "schedule"

DEFAULT_POLL_INTERVAL = 200


class PrologError(Exception):
    """Runtime error raised by the program being executed (e.g. unbound arithmetic)."""


class CorruptionError(Exception):
    """Engine state is internally inconsistent; the owning agent must abort."""


# ---------------------------------------------------------------- events


@dataclass(frozen=True)
class Solution:
    answer: str


@dataclass(frozen=True)
class Exhausted:
    pass


@dataclass(frozen=True)
class Schedule:
    """Backtracking reached a choice-point whose next clause is SCHEDULE."""

    depth: int


@dataclass(frozen=True)
class PollPoint:
    reductions: int


@dataclass(frozen=True)
class SideEffect:
    name: str
    text: str


EXHAUSTED = Exhausted()

# ---------------------------------------------------------------- templates

_CONST, _LOCAL, _STRUCT = 0, 1, 2


def _compile_term(t):
    """Template code: (0, ground term) | (1, local index) | (2, name, arg codes)."""
    if type(t) is Var:
        return (_LOCAL, t.id)
    if type(t) is Struct:
        args = tuple(_compile_term(a) for a in t.args)
        if all(a[0] == _CONST for a in args):
            return (_CONST, t)
        return (_STRUCT, t.name, args)
    return (_CONST, t)


def compile_goal(g):
    """Goals always compile to struct form so argument codes are at ``code[2]``."""
    if type(g) is Struct:
        return (_STRUCT, g.name, tuple(_compile_term(a) for a in g.args))
    return (_STRUCT, g, ())


def _index_key(t):
    if type(t) is Struct:
        return (t.name, len(t.args))
    return t


class Pred:
    __slots__ = ("key", "clauses", "parallel", "index", "var_first", "all_ids")

    def __init__(self, key, parallel: bool):
        self.key = key
        self.clauses: list[CompiledClause] = []
        self.parallel = parallel
        self.index: dict = {}
        self.var_first: tuple = ()
        self.all_ids: tuple = ()

    def finish(self):
        self.all_ids = tuple(range(len(self.clauses)))
        if self.key[1] == 0:
            return
        keys = []
        for c in self.clauses:
            first = c.source.head.args[0]
            if type(first) is not Var:
                k = _index_key(first)
                if k not in keys:
                    keys.append(k)
        self.var_first = tuple(
            i for i, c in enumerate(self.clauses) if type(c.source.head.args[0]) is Var
        )
        for k in keys:
            self.index[k] = tuple(
                i
                for i, c in enumerate(self.clauses)
                if type(c.source.head.args[0]) is Var or _index_key(c.source.head.args[0]) == k
            )

    def candidates(self, gcode, genv, store) -> tuple:
        acode = gcode[2][0]
        tag = acode[0]
        if tag == _STRUCT:
            return self.index.get((acode[1], len(acode[2])), self.var_first)
        first = genv[acode[1]] if tag == _LOCAL else acode[1]
        while type(first) is Var:
            b = store.get(first.id)
            if b is None:
                return self.all_ids
            first = b
        if type(first) is Struct:
            return self.index.get((first.name, len(first.args)), self.var_first)
        return self.index.get(first, self.var_first)


class Builtin:
    __slots__ = ("key", "fn", "side_effect")

    def __init__(self, key, fn, side_effect=False):
        self.key = key
        self.fn = fn
        self.side_effect = side_effect


def _local_ids(t, out: set):
    if type(t) is Var:
        out.add(t.id)
    elif type(t) is Struct:
        for a in t.args:
            _local_ids(a, out)


class CompiledClause:
    __slots__ = ("source", "nvars", "head_args", "body", "body_vars")

    def __init__(self, source: Clause, body):
        self.source = source
        self.nvars = source.nvars
        head = source.head
        self.head_args = tuple(_compile_term(a) for a in head.args) if type(head) is Struct else ()
        self.body = body  # tuple of (code, proc)
        head_vars: set = set()
        _local_ids(head, head_vars)
        self.body_vars = tuple(i for i in range(source.nvars) if i not in head_vars)


def _compile_arith(code):
    """Arithmetic template to a closure ``f(env, store) -> int``."""
    tag = code[0]
    if tag == _LOCAL:
        i = code[1]

        def local(env, store):
            t = env[i]
            while type(t) is Var:
                b = store.get(t.id)
                if b is None:
                    raise PrologError("arithmetic on unbound variable")
                t = b
            if type(t) is int:
                return t
            return _eval_ground(t, store)

        return local
    if tag == _CONST:
        c = code[1]
        if type(c) is int:
            return lambda env, store: c
        return lambda env, store: _eval_ground(c, store)
    op, args = code[1], code[2]
    if len(args) == 2:
        fa, fb = _compile_arith(args[0]), _compile_arith(args[1])
        if op == "+":
            return lambda env, store: fa(env, store) + fb(env, store)
        if op == "-":
            return lambda env, store: fa(env, store) - fb(env, store)
        if op == "*":
            return lambda env, store: fa(env, store) * fb(env, store)
        return lambda env, store: _arith2(op, fa(env, store), fb(env, store))
    if len(args) == 1:
        fa = _compile_arith(args[0])
        return lambda env, store: _arith1(op, fa(env, store))
    raise PrologError(f"unknown arithmetic function {op}/{len(args)}")


_COMPARE = {
    "=:=": lambda a, b: a == b,
    "=\\=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    ">": lambda a, b: a > b,
    "=<": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
}


def _site_builtin(key, gcode):
    """Specialize arithmetic built-ins for one call site; others are shared."""
    base = BUILTINS[key]
    name = key[0]
    if key[1] != 2 or (name not in _COMPARE and name != "is"):
        return base
    args = gcode[2]
    try:
        right = _compile_arith(args[1])
    except PrologError:
        return base
    if name == "is":
        lcode = args[0]

        def fn(e, _args, env):
            return e.unify(e.arg_term(lcode, env), right(env, e.store))

    else:
        left = _compile_arith(args[0])
        cmp = _COMPARE[name]

        def fn(e, _args, env):
            store = e.store
            return cmp(left(env, store), right(env, store))

    return Builtin(key, fn)


class Database:
    """Program compiled for execution; shared read-only by all agents."""

    def __init__(self, program: Program):
        self.program = program
        self.preds: dict = {}
        self.procs: dict = dict(BUILTINS)
        self.sites: list = []  # site id -> (goal code, proc); lets payloads name goals by number
        self._site_ids: dict = {}
        self._queries: dict = {}
        for clause in program.clauses:
            key = clause.key
            if key in BUILTINS:
                raise PrologError(f"cannot redefine built-in {key[0]}/{key[1]}")
            if key not in self.preds:
                self.preds[key] = Pred(key, key in program.parallel_predicates)
        self.procs.update(self.preds)
        for clause in program.clauses:
            body = tuple(self.site(compile_goal(g), self.lookup(g)) for g in clause.body)
            self.preds[clause.key].clauses.append(CompiledClause(clause, body))
        for pred in self.preds.values():
            pred.finish()

    def lookup(self, goal):
        key = (goal.name, len(goal.args)) if type(goal) is Struct else (goal, 0)
        proc = self.procs.get(key)
        if proc is None:
            raise PrologError(f"unknown procedure {key[0]}/{key[1]}")
        return proc

    def site(self, gcode, proc):
        """``(code, proc)`` for one body goal, with built-ins specialized to the site."""
        if type(proc) is Builtin:
            proc = _site_builtin(proc.key, gcode)
        self._site_ids[id(gcode)] = len(self.sites)
        self.sites.append((gcode, proc))
        return gcode, proc

    def site_id(self, gcode) -> int:
        return self._site_ids[id(gcode)]

    def query_sites(self, query: Query) -> list:
        """Compiled goals of ``query``; every agent sharing this database gets the same sites."""
        key = tuple(format_term(g, quoted=True) for g in query.goals)
        sites = self._queries.get(key)
        if sites is None:
            sites = [self.site(compile_goal(g), self.lookup(g)) for g in query.goals]
            self._queries[key] = sites
        return sites

    def proc_by_key(self, key):
        proc = self.procs.get(tuple(key))
        if proc is None:
            raise CorruptionError(f"unknown procedure key {key!r}")
        return proc


# ---------------------------------------------------------------- choice-points


class ChoicePoint:
    """One node of the local branch.

    ``alts`` are the clause indices this agent still owns; an empty list is
    the TRUST_FAIL filler. ``schedule`` overrides both and sends a
    backtracking agent into the scheduler.
    """

    __slots__ = (
        "depth",
        "gcode",
        "genv",
        "proc",
        "cont",
        "alts",
        "taken",
        "trail_mark",
        "var_mark",
        "parallel",
        "creation_id",
        "schedule",
        "label",
    )

    def __init__(self, depth, gcode, genv, proc, cont, alts, taken, trail_mark, var_mark, parallel, creation_id):
        self.depth = depth
        self.gcode = gcode
        self.genv = genv
        self.proc = proc
        self.cont = cont
        self.alts = alts
        self.taken = taken
        self.trail_mark = trail_mark
        self.var_mark = var_mark
        self.parallel = parallel
        self.creation_id = creation_id
        self.schedule = False
        self.label = None

    @property
    def next_clause(self):
        if self.schedule:
            return SCHEDULE
        return self.alts[0] if self.alts else TRUST_FAIL

    def __repr__(self):
        return (
            f"CP(d={self.depth}, {self.proc.key[0]}/{self.proc.key[1]}, alts={self.alts}, "
            f"taken={self.taken}, par={self.parallel}, next={self.next_clause}, label={self.label})"
        )


class Engine:
    """One agent's resolution engine."""

    def __init__(self, db: Database, rank: int = 0, poll_interval: int = DEFAULT_POLL_INTERVAL, ledger=None):
        self.db = db
        self.rank = rank
        self.poll_interval = max(1, poll_interval)
        self.ledger = ledger
        self.output: list[str] = []
        self.cp_counter = 0
        self.reductions = 0
        self.alternatives_executed = 0
        self.label_counter = 1
        self.reset()

    # ------------------------------------------------------------ state

    def reset(self):
        self.store: dict = {}
        self.trail: list = []
        self.next_var = 0
        self.cps: list[ChoicePoint] = []
        self.goals = None
        self.answer_vars: dict = {}
        self.query_env: list = []
        self._since_poll = 0
        self._after_solution = False
        self._pending_effect = None
        self.stopped = None

    def start(self, query: Query):
        self.reset()
        self.query_env = [Var(i) for i in range(query.nvars)]
        self.begin(query)
        cont = None
        for gcode, proc in reversed(self.db.query_sites(query)):
            cont = (gcode, self.query_env, proc, cont)
        self.goals = cont

    def begin(self, query: Query):
        """Prepare for a query without any goals; an idle agent waits for shared work."""
        self.answer_vars = dict(query.var_names)
        self.next_var = max(self.next_var, query.nvars)

    @property
    def active(self) -> bool:
        return self.stopped is None

    def load(self) -> int:
        """Parallel choice-points holding untried alternatives."""
        n = 0
        for cp in self.cps:
            if cp.parallel and cp.alts and not cp.schedule:
                n += 1
        return n

    def parallel_cps(self) -> list[ChoicePoint]:
        return [cp for cp in self.cps if cp.parallel]

    def branch_path(self) -> tuple:
        """Clause indices taken at each choice-point, root first; orders leaves left to right."""
        return tuple(cp.taken for cp in self.cps)

    # ------------------------------------------------------------ bindings

    def bind(self, var: Var, value):
        self.store[var.id] = value
        self.trail.append((var.id, value))

    def untrail(self, mark: int):
        trail = self.trail
        store = self.store
        while len(trail) > mark:
            vid, _ = trail.pop()
            del store[vid]

    def unify(self, a, b) -> bool:
        """Most general unifier, without occurs check; a failed call leaves no bindings behind."""
        store = self.store
        trail = self.trail
        mark = len(trail)
        stack = [(a, b)]
        while stack:
            a, b = stack.pop()
            while type(a) is Var:
                v = store.get(a.id)
                if v is None:
                    break
                a = v
            while type(b) is Var:
                v = store.get(b.id)
                if v is None:
                    break
                b = v
            if a is b:
                continue
            ta = type(a)
            tb = type(b)
            if ta is Var:
                if tb is Var and a.id == b.id:
                    continue
                store[a.id] = b
                trail.append((a.id, b))
            elif tb is Var:
                store[b.id] = a
                trail.append((b.id, a))
            elif ta is Struct:
                if tb is not Struct or a.name != b.name or len(a.args) != len(b.args):
                    self.untrail(mark)
                    return False
                stack.extend(zip(a.args, b.args))
            elif ta is not tb or a != b:
                self.untrail(mark)
                return False
        return True

    # ------------------------------------------------------------ clause entry

    def _build(self, code, regs):
        tag = code[0]
        if tag == _CONST:
            return code[1]
        if tag == _LOCAL:
            v = regs[code[1]]
            if v is None:
                v = Var(self.next_var)
                self.next_var += 1
                regs[code[1]] = v
            return v
        build = self._build
        return Struct(code[1], tuple([build(c, regs) for c in code[2]]))

    def _unify_head(self, code, term, regs) -> bool:
        tag = code[0]
        if tag == _LOCAL:
            cur = regs[code[1]]
            if cur is None:
                regs[code[1]] = term
                return True
            return self.unify(cur, term)
        store = self.store
        while type(term) is Var:
            v = store.get(term.id)
            if v is None:
                value = code[1] if tag == _CONST else self._build(code, regs)
                store[term.id] = value
                self.trail.append((term.id, value))
                return True
            term = v
        if tag == _CONST:
            const = code[1]
            if type(const) is Struct:
                return self.unify(const, term)
            return type(term) is type(const) and term == const
        if type(term) is not Struct or term.name != code[1] or len(term.args) != len(code[2]):
            return False
        unify_head = self._unify_head
        for c, a in zip(code[2], term.args):
            if not unify_head(c, a, regs):
                return False
        return True

    def arg_term(self, code, env):
        tag = code[0]
        if tag == _LOCAL:
            return env[code[1]]
        if tag == _CONST:
            return code[1]
        return self._build(code, env)

    def goal_term(self, code, env):
        return self.arg_term(code, env)

    def _try_clause(self, pred: Pred, ci: int, gcode, genv, rest) -> bool:
        clause = pred.clauses[ci]
        regs = [None] * clause.nvars
        if clause.head_args:
            unify_head = self._unify_head
            for hcode, acode in zip(clause.head_args, gcode[2]):
                tag = acode[0]
                if tag == _LOCAL:
                    arg = genv[acode[1]]
                elif tag == _CONST:
                    arg = acode[1]
                else:
                    arg = self._build(acode, genv)
                if hcode[0] == _LOCAL and regs[hcode[1]] is None:
                    regs[hcode[1]] = arg
                elif not unify_head(hcode, arg, regs):
                    return False
        if clause.body:
            for i in clause.body_vars:
                if regs[i] is None:
                    regs[i] = Var(self.next_var)
                    self.next_var += 1
            cont = rest
            for code, proc in reversed(clause.body):
                cont = (code, regs, proc, cont)
            self.goals = cont
        else:
            self.goals = rest
        return True

    # ------------------------------------------------------------ backtracking

    def backtrack(self) -> bool:
        """Resume at the newest owned alternative; False once stopped (see ``stopped``)."""
        cps = self.cps
        ledger = self.ledger
        while cps:
            cp = cps[-1]
            if cp.schedule:
                self.untrail(cp.trail_mark)
                self.next_var = cp.var_mark
                self.goals = None
                self.stopped = Schedule(cp.depth)
                return False
            if cp.alts:
                self.untrail(cp.trail_mark)
                self.next_var = cp.var_mark
                ci = cp.alts.pop(0)
                cp.taken = ci
                self.alternatives_executed += 1
                if ledger is not None:
                    ledger.executed(cp.creation_id, ci, self.rank)
                if self._try_clause(cp.proc, ci, cp.gcode, cp.genv, cp.cont):
                    return True
                continue
            cps.pop()
        self.untrail(0)
        self.goals = None
        self.stopped = EXHAUSTED
        return False

    def backtrack_to(self, depth: int):
        """Pop every choice-point deeper than ``depth`` and untrail to its mark."""
        if not 0 <= depth < len(self.cps):
            raise IndexError(f"no live choice-point at depth {depth}")
        del self.cps[depth + 1 :]
        cp = self.cps[depth]
        self.untrail(cp.trail_mark)
        self.next_var = cp.var_mark
        self.goals = None

    def resume(self) -> bool:
        """Re-enter execution after an installation ("simulate failure")."""
        self.stopped = None
        self._after_solution = False
        self._pending_effect = None
        return self.backtrack()

    # ------------------------------------------------------------ main loop

    def answer(self) -> str:
        if not self.answer_vars:
            return "true"
        return ", ".join(
            f"{name}={format_term(Var(vid), self.store, quoted=True)}" for name, vid in self.answer_vars.items()
        )

    def perform_side_effect(self):
        if self._pending_effect is None:
            raise CorruptionError("no pending side-effect")
        text, rest = self._pending_effect
        self._pending_effect = None
        self.output.append(text)
        self.goals = rest

    def run(self):
        """Advance depth-first until the next event."""
        if self.stopped is not None:
            return self.stopped
        if self._pending_effect is not None:
            raise CorruptionError("side-effect pending; call perform_side_effect first")
        if self._after_solution:
            self._after_solution = False
            if not self.backtrack():
                return self.stopped
        store = self.store
        cps = self.cps
        poll_interval = self.poll_interval
        while True:
            goals = self.goals
            if goals is None:
                self._after_solution = True
                return Solution(self.answer())
            self._since_poll += 1
            if self._since_poll > poll_interval:
                self._since_poll = 0
                return PollPoint(self.reductions)
            gcode, genv, proc, rest = goals
            self.reductions += 1
            if type(proc) is Pred:
                cands = proc.candidates(gcode, genv, store) if proc.index else proc.all_ids
                n = len(cands)
                if n == 0:
                    ok = False
                elif n == 1:
                    ok = self._try_clause(proc, cands[0], gcode, genv, rest)
                else:
                    self.cp_counter += 1
                    cid = (self.rank, self.cp_counter)
                    cp = ChoicePoint(
                        len(cps),
                        gcode,
                        genv,
                        proc,
                        rest,
                        list(cands[1:]),
                        cands[0],
                        len(self.trail),
                        self.next_var,
                        proc.parallel,
                        cid,
                    )
                    cps.append(cp)
                    self.alternatives_executed += 1
                    if self.ledger is not None:
                        self.ledger.created(cid, cands)
                        self.ledger.executed(cid, cands[0], self.rank)
                    ok = self._try_clause(proc, cands[0], gcode, genv, rest)
            elif proc.side_effect:
                self._pending_effect = (proc.fn(self, gcode[2], genv), rest)
                return SideEffect(proc.key[0], self._pending_effect[0])
            else:
                ok = proc.fn(self, gcode[2], genv)
                if ok:
                    self.goals = rest
            if not ok and not self.backtrack():
                return self.stopped


# ---------------------------------------------------------------- built-ins


def _eval(engine: Engine, t):
    t = deref(t, engine.store)
    if type(t) is int:
        return t
    if type(t) is Var:
        raise PrologError("arithmetic on unbound variable")
    if type(t) is Struct:
        if len(t.args) == 2:
            return _arith2(t.name, _eval(engine, t.args[0]), _eval(engine, t.args[1]))
        if len(t.args) == 1:
            return _arith1(t.name, _eval(engine, t.args[0]))
        raise PrologError(f"unknown arithmetic function {t.name}/{len(t.args)}")
    raise PrologError(f"not a number: {t!r}")


def _eval_ground(t, store):
    t = deref(t, store)
    if type(t) is int:
        return t
    if type(t) is Var:
        raise PrologError("arithmetic on unbound variable")
    if type(t) is Struct:
        if len(t.args) == 2:
            return _arith2(t.name, _eval_ground(t.args[0], store), _eval_ground(t.args[1], store))
        if len(t.args) == 1:
            return _arith1(t.name, _eval_ground(t.args[0], store))
        raise PrologError(f"unknown arithmetic function {t.name}/{len(t.args)}")
    raise PrologError(f"not a number: {t!r}")


def _eval_code(engine: Engine, code, env):
    tag = code[0]
    if tag == _LOCAL:
        t = env[code[1]]
        if type(t) is int:
            return t
        return _eval(engine, t)
    if tag == _CONST:
        t = code[1]
        return t if type(t) is int else _eval(engine, t)
    args = code[2]
    if len(args) == 2:
        return _arith2(code[1], _eval_code(engine, args[0], env), _eval_code(engine, args[1], env))
    if len(args) == 1:
        return _arith1(code[1], _eval_code(engine, args[0], env))
    raise PrologError(f"unknown arithmetic function {code[1]}/{len(args)}")


def _arith2(op, a, b):
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "//":
        if b == 0:
            raise PrologError("division by zero")
        q = abs(a) // abs(b)
        return q if (a >= 0) == (b >= 0) else -q
    if op == "mod":
        if b == 0:
            raise PrologError("division by zero")
        return a % b
    raise PrologError(f"unknown arithmetic function {op}/2")


def _arith1(op, a):
    if op == "-":
        return -a
    if op == "abs":
        return abs(a)
    raise PrologError(f"unknown arithmetic function {op}/1")


def _bi_unify(e: Engine, args, env):
    return e.unify(e.arg_term(args[0], env), e.arg_term(args[1], env))


def _bi_not_unify(e: Engine, args, env):
    mark = len(e.trail)
    ok = e.unify(e.arg_term(args[0], env), e.arg_term(args[1], env))
    e.untrail(mark)
    return not ok


def _bi_identical(e: Engine, args, env):
    return resolve(e.arg_term(args[0], env), e.store) == resolve(e.arg_term(args[1], env), e.store)


def _bi_not_identical(e: Engine, args, env):
    return not _bi_identical(e, args, env)


def _bi_is(e: Engine, args, env):
    return e.unify(e.arg_term(args[0], env), _eval_code(e, args[1], env))


def _cmp(op):
    def fn(e: Engine, args, env):
        return op(_eval_code(e, args[0], env), _eval_code(e, args[1], env))

    return fn


def _bi_arg(e: Engine, args, env):
    n = deref(e.arg_term(args[0], env), e.store)
    t = deref(e.arg_term(args[1], env), e.store)
    if type(n) is not int or type(t) is not Struct:
        raise PrologError("arg/3 needs an integer index and a compound term")
    if not 1 <= n <= len(t.args):
        return False
    return e.unify(e.arg_term(args[2], env), t.args[n - 1])


def _bi_functor(e: Engine, args, env):
    t = deref(e.arg_term(args[0], env), e.store)
    if type(t) is Var:
        name = deref(e.arg_term(args[1], env), e.store)
        n = deref(e.arg_term(args[2], env), e.store)
        if type(n) is not int or type(name) is Var:
            raise PrologError("functor/3 needs a name and an arity")
        if n == 0:
            return e.unify(t, name)
        if type(name) is not str:
            raise PrologError("functor/3 needs an atom name for a compound")
        fresh = []
        for _ in range(n):
            fresh.append(Var(e.next_var))
            e.next_var += 1
        return e.unify(t, Struct(name, tuple(fresh)))
    if type(t) is Struct:
        name, n = t.name, len(t.args)
    else:
        name, n = t, 0
    return e.unify(e.arg_term(args[1], env), name) and e.unify(e.arg_term(args[2], env), n)


def _bi_var(e: Engine, args, env):
    return type(deref(e.arg_term(args[0], env), e.store)) is Var


def _bi_nonvar(e: Engine, args, env):
    return type(deref(e.arg_term(args[0], env), e.store)) is not Var


def _bi_true(e, args, env):
    return True


def _bi_fail(e, args, env):
    return False


def _bi_write(e: Engine, args, env):
    return format_term(e.arg_term(args[0], env), e.store)


def _bi_nl(e: Engine, args, env):
    return "\n"


BUILTINS = {
    ("=", 2): Builtin(("=", 2), _bi_unify),
    ("\\=", 2): Builtin(("\\=", 2), _bi_not_unify),
    ("==", 2): Builtin(("==", 2), _bi_identical),
    ("\\==", 2): Builtin(("\\==", 2), _bi_not_identical),
    ("is", 2): Builtin(("is", 2), _bi_is),
    ("=:=", 2): Builtin(("=:=", 2), _cmp(lambda a, b: a == b)),
    ("=\\=", 2): Builtin(("=\\=", 2), _cmp(lambda a, b: a != b)),
    ("<", 2): Builtin(("<", 2), _cmp(lambda a, b: a < b)),
    (">", 2): Builtin((">", 2), _cmp(lambda a, b: a > b)),
    ("=<", 2): Builtin(("=<", 2), _cmp(lambda a, b: a <= b)),
    (">=", 2): Builtin((">=", 2), _cmp(lambda a, b: a >= b)),
    ("arg", 3): Builtin(("arg", 3), _bi_arg),
    ("functor", 3): Builtin(("functor", 3), _bi_functor),
    ("var", 1): Builtin(("var", 1), _bi_var),
    ("nonvar", 1): Builtin(("nonvar", 1), _bi_nonvar),
    ("true", 0): Builtin(("true", 0), _bi_true),
    ("fail", 0): Builtin(("fail", 0), _bi_fail),
    ("write", 1): Builtin(("write", 1), _bi_write, side_effect=True),
    ("nl", 0): Builtin(("nl", 0), _bi_nl, side_effect=True),
}


# ---------------------------------------------------------------- oracle


def run_sequential(program, query, limit=None, poll_interval=DEFAULT_POLL_INTERVAL):
    """Run to completion on one engine; returns ``(answers, output_text)``."""
    if isinstance(program, str):
        program = parse_program(program)
    if isinstance(query, str):
        query = parse_query(query)
    db = program if isinstance(program, Database) else Database(program)
    engine = Engine(db, poll_interval=poll_interval)
    engine.start(query)
    answers = []
    while True:
        ev = engine.run()
        if type(ev) is Solution:
            answers.append(ev.answer)
            if limit is not None and len(answers) >= limit:
                break
        elif type(ev) is SideEffect:
            engine.perform_side_effect()
        elif type(ev) is PollPoint:
            continue
        else:
            break
    return answers, "".join(engine.output)


def collect_solutions(program, query, limit=None) -> list[str]:
    """All (or the first ``limit``) answers in sequential Prolog order."""
    return run_sequential(program, query, limit)[0]
