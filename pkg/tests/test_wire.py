import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orsplit.engine import Database, Engine
from orsplit.messages import (
    MESSAGE_TYPES,
    Halt,
    OSCAck,
    ReplyWithWork,
    RequestOSC,
    RequestWork,
    SendLoadInfo,
    Token,
)
from orsplit.parser import parse_program, parse_query
from orsplit.splitting import Label, build_share_payload, label_parallel_choicepoints, plan_share
from orsplit.terms import Struct, Var, make_list
from orsplit.wire import HEADER, VERSION, WireError, decode_body, decode_frame, encode_body, encode_frame

DB = Database(parse_program(":- parallel p/1.\np(1). p(2). p(3).\nq(X, Y) :- p(X), p(Y), true."))

leaves = st.one_of(
    st.none(),
    st.booleans(),
    st.integers(-(2**70), 2**70),
    st.text(max_size=8),
    st.integers(0, 50).map(Var),
    st.builds(Label, st.integers(0, 300), st.integers(0, 10**6), st.integers(0, 99)),
)


def _values():
    def extend(children):
        return st.one_of(
            st.lists(children, max_size=4),
            st.lists(children, max_size=4).map(tuple),
            st.builds(lambda n, a: Struct(n, tuple(a)), st.sampled_from(["f", ".", "o"]), st.lists(children, min_size=1, max_size=3)),
        )

    return st.recursive(leaves, extend, max_leaves=20)


@settings(max_examples=400, deadline=None)
@given(_values())
def test_value_round_trip(v):
    assert decode_body(DB, encode_body(DB, v)) == v


@settings(max_examples=200, deadline=None)
@given(
    st.integers(0, 65535),
    st.integers(0, 65535),
    st.integers(0, 2**32 - 1),
    st.integers(0, 10**6),
    st.integers(0, 10**6),
    st.lists(st.integers(0, 1000), max_size=5).map(tuple),
)
def test_message_frame_round_trip(src, dst, seq, load, epoch, key):
    msgs = [
        RequestWork(src, load, epoch, labels=(Label(1, 2, 3),), reply_to=None),
        SendLoadInfo(src, load, epoch, giver=1, receiver=2, giver_load=3, receiver_load=4, receiver_epoch=5, receiver_key=key),
        RequestOSC(src, load, epoch, key=key, target_epoch=epoch, serial=seq),
        OSCAck(src, load, epoch, idle=True, serial=7),
        Token(src, load, epoch, color="black", initiator=0, count=-3),
        Halt(src, load, epoch),
    ]
    for m in msgs:
        assert decode_frame(DB, encode_frame(DB, m, src, dst, seq)) == (src, dst, seq, m)


def test_every_message_type_is_encodable():
    for cls in MESSAGE_TYPES:
        m = cls(1, 2, 3)
        assert decode_body(DB, encode_body(DB, m)) == m


def test_share_payload_round_trip_keeps_sharing():
    e = Engine(DB)
    e.start(parse_query("q(X, Y)"))
    e.run()
    label_parallel_choicepoints(e, 0)
    p = build_share_payload(e, plan_share(e, "horizontal"), None, incremental=False)
    back = decode_body(DB, encode_body(DB, ReplyWithWork(0, 1, 0, payload=p))).payload
    assert back.cp_segment[0].alts == p.cp_segment[0].alts
    assert back.split_assignment == p.split_assignment
    # the second choice-point's continuation is the tail of the first one's
    assert p.cp_segment[1].cont is p.cp_segment[0].cont[3]
    assert back.cp_segment[1].cont is back.cp_segment[0].cont[3]


def test_shared_structures_are_sent_once():
    s = Struct("f", tuple(range(50)))
    one = len(encode_body(DB, [s]))
    two = len(encode_body(DB, [s, s]))
    assert two - one < 5
    back = decode_body(DB, encode_body(DB, [s, s]))
    assert back[0] is back[1]


def test_long_lists_do_not_overflow_the_stack():
    lst = make_list(list(range(5000)))
    assert decode_body(DB, encode_body(DB, lst)) == lst


def _frame():
    return encode_frame(DB, Halt(0, 0, 0), 0, 1, 0)


def test_wrong_version_is_rejected():
    f = bytearray(_frame())
    f[0] = VERSION + 1
    with pytest.raises(WireError, match="version"):
        decode_frame(DB, bytes(f))


def test_length_mismatch_is_rejected():
    with pytest.raises(WireError, match="length"):
        decode_frame(DB, _frame() + b"\x00")
    with pytest.raises(WireError, match="short"):
        decode_frame(DB, _frame()[: HEADER.size - 1])


def test_kind_mismatch_is_rejected():
    f = bytearray(_frame())
    f[1] = (f[1] + 1) % len(MESSAGE_TYPES)
    with pytest.raises(WireError, match="kind"):
        decode_frame(DB, bytes(f))


def test_bad_tag_and_trailing_bytes():
    with pytest.raises(WireError, match="bad tag"):
        decode_body(DB, b"\xff")
    with pytest.raises(WireError, match="trailing"):
        decode_body(DB, encode_body(DB, 1) + b"\x00")


def test_unencodable_value():
    with pytest.raises(WireError):
        encode_body(DB, {1: 2})
