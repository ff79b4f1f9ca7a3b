import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orsplit.engine import (
    EXHAUSTED,
    Database,
    Engine,
    PollPoint,
    PrologError,
    SideEffect,
    Solution,
    collect_solutions,
    run_sequential,
)
from orsplit.parser import parse_program, parse_query
from orsplit.terms import Struct, Var

MEMBER = """
member(X, [X|_]).
member(X, [_|T]) :- member(X, T).
"""


def engine_for(program: str, query: str, **kw) -> Engine:
    db = Database(parse_program(program))
    e = Engine(db, **kw)
    e.start(parse_query(query))
    return e


def events(e: Engine, limit=10_000):
    out = []
    for _ in range(limit):
        ev = e.run()
        if type(ev) is PollPoint:
            continue
        out.append(ev)
        if type(ev) is SideEffect:
            e.perform_side_effect()
        elif ev is EXHAUSTED:
            break
    return out


def test_member_solutions_in_clause_order_then_exhausted():
    evs = events(engine_for(MEMBER, "member(X, [1,2,3])"))
    assert evs == [Solution("X=1"), Solution("X=2"), Solution("X=3"), EXHAUSTED]


def test_no_matching_clause_is_exhausted_immediately():
    evs = events(engine_for("p(1).", "p(2)"))
    assert evs == [EXHAUSTED]


def test_side_effect_is_reported_before_it_happens():
    e = engine_for("", "write(hello), nl")
    ev = e.run()
    assert type(ev) is SideEffect and e.output == []
    e.perform_side_effect()
    assert e.output == ["hello"]
    ev = e.run()
    assert type(ev) is SideEffect
    e.perform_side_effect()
    assert "".join(e.output) == "hello\n"
    assert e.run() == Solution("true")


def test_hand_ordered_program_enumerates_depth_first_left_to_right():
    prog = """
    p(a). p(b).
    q(1). q(2).
    r(X, Y) :- p(X), q(Y).
    r(z, 0).
    """
    assert collect_solutions(prog, "r(X, Y)") == [
        "X=a, Y=1",
        "X=a, Y=2",
        "X=b, Y=1",
        "X=b, Y=2",
        "X=z, Y=0",
    ]


def test_limit_stops_early():
    assert collect_solutions(MEMBER, "member(X, [1,2,3])", limit=2) == ["X=1", "X=2"]


@pytest.mark.parametrize(
    "query,answers",
    [
        ("X is -7 // 2", ["X=-3"]),
        ("X is 7 mod 3", ["X=1"]),
        ("X is -7 mod 2", ["X=1"]),
        ("X is abs(-3) * 2 - -1", ["X=7"]),
        ("X is 2 * (3 + 4)", ["X=14"]),
        ("1 < 2, 2 =< 2, 3 > 2, 3 >= 3, 4 =:= 4, 4 =\\= 5", ["true"]),
        ("2 < 1", []),
        ("X = f(Y), Y = a", ["X=f(a), Y=a"]),
        ("f(X, a) = f(b, Y)", ["X=b, Y=a"]),
        ("a \\= b", ["true"]),
        ("X \\= b", []),
        ("X == X", ["X=_G0"]),
        ("X == Y", []),
        ("a \\== b", ["true"]),
        ("functor(T, f, 2)", ["T=f(_G1,_G2)"]),
        ("functor(g(a, b, c), N, A)", ["N=g, A=3"]),
        ("functor(foo, N, A)", ["N=foo, A=0"]),
        ("arg(2, f(a, b, c), X)", ["X=b"]),
        ("arg(4, f(a, b, c), X)", []),
        ("var(X), X = 1, nonvar(X)", ["X=1"]),
        ("true, fail", []),
    ],
)
def test_builtins(query, answers):
    assert collect_solutions("", query) == answers


@pytest.mark.parametrize("query", ["X is Y + 1", "X is foo", "unknown(1)", "X is 1 // 0", "functor(T, N, 2)"])
def test_errors_raise(query):
    with pytest.raises(PrologError):
        collect_solutions("", query)


def test_write_output_and_quoting():
    answers, out = run_sequential("", "write(f('A b', [1,2|T])), nl")
    assert out == "f(A b,[1,2|_G0])\n"


def test_unify_examples():
    e = Engine(Database(parse_program("")))
    x, y = Var(0), Var(1)
    e.next_var = 2
    assert e.unify(Struct("f", (x, "a")), Struct("f", ("b", y)))
    assert e.store == {0: "b", 1: "a"}
    mark = len(e.trail)
    assert e.unify(x, x)
    assert len(e.trail) == mark
    assert not e.unify("a", "b")
    assert len(e.trail) == mark


def test_failed_unify_leaves_no_partial_bindings():
    e = Engine(Database(parse_program("")))
    x, y = Var(0), Var(1)
    before = dict(e.store)
    assert not e.unify(Struct("f", (x, y, "a")), Struct("f", (1, 2, "b")))
    assert e.store == before and e.trail == []


def test_backtrack_to_pops_deeper_choicepoints_and_bindings():
    prog = "p(1). p(2).\nq(X, Y, Z) :- p(X), p(Y), p(Z)."
    e = engine_for(prog, "q(X, Y, Z)")
    assert e.run() == Solution("X=1, Y=1, Z=1")
    assert len(e.cps) == 3
    mark = e.cps[0].trail_mark
    e.backtrack_to(0)
    assert len(e.cps) == 1 and len(e.trail) == mark
    e.backtrack_to(0)  # already on top: no change
    assert len(e.cps) == 1
    with pytest.raises(IndexError):
        e.backtrack_to(3)


def test_parallel_flag_follows_directive():
    prog = ":- parallel p/1.\np(1). p(2).\nq(1). q(2).\nr :- p(_), q(_)."
    e = engine_for(prog, "r")
    e.run()
    assert [cp.parallel for cp in e.cps] == [True, False]
    assert e.load() == 1
    assert all(cp.creation_id[0] == 0 for cp in e.cps)
    assert len({cp.creation_id for cp in e.cps}) == 2


def test_poll_points_every_k_reductions():
    prog = "loop(0).\nloop(N) :- N > 0, M is N - 1, loop(M)."
    e = engine_for(prog, "loop(200)", poll_interval=7)
    stamps = []
    while True:
        ev = e.run()
        if type(ev) is PollPoint:
            stamps.append(ev.reductions)
        elif type(ev) is Solution:
            break
    gaps = {b - a for a, b in zip(stamps, stamps[1:])}
    assert gaps == {7}


def test_two_runs_produce_identical_event_streams():
    prog = MEMBER + "go(X, Y) :- member(X, [1,2,3]), member(Y, [a,b]), write(X), nl."
    streams = []
    for _ in range(2):
        e = engine_for(prog, "go(X, Y)", poll_interval=3)
        evs = []
        while True:
            ev = e.run()
            evs.append(ev)
            if type(ev) is SideEffect:
                e.perform_side_effect()
            if ev is EXHAUSTED:
                break
        streams.append(evs)
    assert streams[0] == streams[1]


# ---------------------------------------------------------------- trail round trip

_values = st.one_of(st.integers(-3, 3), st.sampled_from(["a", "b"]))


@st.composite
def _ops(draw):
    ops = []
    for _ in range(draw(st.integers(1, 40))):
        kind = draw(st.sampled_from(["unify", "unify", "mark", "undo"]))
        if kind == "unify":
            a = draw(st.integers(0, 7))
            b = draw(st.one_of(st.integers(0, 7).map(lambda i: ("var", i)), _values.map(lambda v: ("val", v))))
            wrap = draw(st.booleans())
            ops.append(("unify", a, b, wrap))
        else:
            ops.append((kind,))
    return ops


@settings(max_examples=300, deadline=None)
@given(_ops())
def test_untrailing_restores_the_exact_store(ops):
    e = Engine(Database(parse_program("")))
    e.next_var = 8
    marks = []
    for op in ops:
        if op[0] == "unify":
            _, a, b, wrap = op
            rhs = Var(b[1]) if b[0] == "var" else b[1]
            lhs = Var(a)
            if wrap:
                lhs, rhs = Struct("f", (lhs, "a")), Struct("f", (rhs, "a"))
            e.unify(lhs, rhs)
        elif op[0] == "mark":
            marks.append((len(e.trail), dict(e.store)))
        elif marks:
            mark, snapshot = marks.pop()
            e.untrail(mark)
            assert e.store == snapshot
        # a variable is bound at most once
        assert len(e.store) == len(e.trail)
    while marks:
        mark, snapshot = marks.pop()
        e.untrail(mark)
        assert e.store == snapshot
