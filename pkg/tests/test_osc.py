import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orsplit.messages import SendLoadInfo
from orsplit.osc import DedupMatrix, LinearVector, WaitingQueue, apply_share_notification, osc_request_decision


def note(giver, receiver, from_giver=True, key=()):
    src = giver if from_giver else receiver
    return SendLoadInfo(src, 1, 0, giver=giver, receiver=receiver, receiver_key=key)


def test_initial_vector_and_leftmost():
    v = LinearVector([0])
    assert v.is_leftmost(0) and not v.is_leftmost(1)
    assert v.left_of(0) == []


def test_waiting_agent_sees_who_is_left_of_it():
    v = LinearVector([2, 0, 1])
    assert v.left_of(0) == [2]
    assert not v.is_leftmost(0)
    assert v.remove(2)
    assert v.ranks == [0, 1] and v.is_leftmost(0)


def test_request_decision_by_vector_position():
    v = LinearVector([0, 1, 2])
    assert osc_request_decision(v, 1, 2) == "enqueue"
    assert osc_request_decision(v, 1, 0) == "ack"


def test_absent_requester_counts_as_right():
    v = LinearVector([0, 1])
    assert osc_request_decision(v, 1, 3) == "enqueue"


def test_request_decision_by_tree_position_wins_over_a_stale_vector():
    v = LinearVector([0, 1, 2])
    # the vector says 2 is right of 1, but its branch is left of ours
    assert osc_request_decision(v, 1, 2, self_pos=(1, 0), requester_pos=(0, 3)) == "ack"
    assert osc_request_decision(v, 1, 0, self_pos=(0, 3), requester_pos=(1,)) == "enqueue"


def test_waiting_queue_drains_in_arrival_order_without_duplicates():
    q = WaitingQueue()
    q.enqueue(2)
    q.enqueue(3)
    q.enqueue(2)
    assert len(q) == 2 and 3 in q
    assert q.drain() == [2, 3]
    assert len(q) == 0


def test_fresh_event_goes_right_of_giver():
    v = LinearVector([2, 0], use_keys=False)
    d = DedupMatrix(6)
    assert apply_share_notification(v, d, note(2, 5))
    assert v.ranks == [2, 5, 0]


def test_duplicate_notification_is_ignored():
    v = LinearVector([2, 0], use_keys=False)
    d = DedupMatrix(6)
    apply_share_notification(v, d, note(2, 5, from_giver=False))
    assert not apply_share_notification(v, d, note(2, 5, from_giver=True))
    assert v.ranks == [2, 5, 0]


def test_out_of_order_notifications_are_not_lost():
    # 1 shares with 0, then 0 shares with 3; an observer hears 0 -> 3 first
    v = LinearVector([1], use_keys=False)
    d = DedupMatrix(4)
    apply_share_notification(v, d, note(0, 3, from_giver=False))
    apply_share_notification(v, d, note(1, 0, from_giver=True))
    apply_share_notification(v, d, note(0, 3, from_giver=True))
    apply_share_notification(v, d, note(1, 0, from_giver=False))
    assert v.ranks == [1, 0, 3]


def test_epochs_discard_stale_news():
    v = LinearVector([0, 1])
    assert v.insert_after(0, 2, epoch=3)
    assert not v.insert_after(1, 2, epoch=2)
    assert v.remove(2, epoch=3)
    assert not v.remove(1, epoch=-1) and 1 in v
    assert not v.insert_after(0, 2, epoch=3)  # the same news again


def test_keys_place_a_receiver_whose_giver_was_dropped():
    v = LinearVector([0, 2], keys={0: (0,), 2: (2,)})
    v.insert_after(1, 3, key=(1, 4))
    assert v.ranks == [0, 3, 2]


def test_relative_order_agreement():
    a = LinearVector([0, 1, 2])
    assert a.relative_order_agrees(LinearVector([0, 2]))
    assert not a.relative_order_agrees(LinearVector([2, 0]))


# ---------------------------------------------------------------- insertion rule oracle


def _reference(events, start):
    ref = list(start)
    for g, r in events:
        if r in ref:
            ref.remove(r)
        ref.insert(ref.index(g) + 1, r)
    return ref


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 8), st.integers(1, 25))
def test_insertion_rule_matches_reference_under_duplicate_delivery(seed, n, count):
    rng = random.Random(seed)
    present = [0]
    events = []
    for _ in range(count):
        g = rng.choice(present)
        r = rng.randrange(n)
        if r == g:
            continue
        events.append((g, r))
        if r not in present:
            present.append(r)
    v = LinearVector([0], use_keys=False)
    d = DedupMatrix(n)
    for g, r in events:
        first = rng.random() < 0.5
        apply_share_notification(v, d, note(g, r, from_giver=first))
        apply_share_notification(v, d, note(g, r, from_giver=not first))
    assert v.ranks == _reference(events, [0])
    assert len(set(v.ranks)) == len(v.ranks)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 8))
def test_keyed_insertion_keeps_tree_order(seed, n):
    """Agents own disjoint subtrees; with keys the vector lists them left to right."""
    rng = random.Random(seed)
    keys = {0: ()}
    v = LinearVector([0], keys={0: ()})
    for r in range(1, n):
        g = rng.choice(list(keys))
        # the receiver gets an older branch point of the giver, to its right
        base = keys[g]
        cut = rng.randint(0, len(base))
        k = base[:cut] + ((base[cut] + 1 + rng.randrange(3),) if cut < len(base) else (rng.randrange(1, 4),))
        keys[r] = k
        v.insert_after(g, r, key=k)
    assert v.ranks == sorted(keys, key=lambda r: keys[r])


@pytest.mark.parametrize("from_giver_first", [True, False])
def test_repeated_events_between_the_same_pair(from_giver_first):
    v = LinearVector([0, 1], use_keys=False)
    d = DedupMatrix(3)
    for _ in range(2):
        apply_share_notification(v, d, note(0, 2, from_giver=from_giver_first))
        v.remove(2)
        apply_share_notification(v, d, note(0, 2, from_giver=not from_giver_first))
    # each event inserted exactly once, then removed again
    assert v.ranks == [0, 1]
    apply_share_notification(v, d, note(1, 2, from_giver=True))
    assert v.ranks == [0, 1, 2]
