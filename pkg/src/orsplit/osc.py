"""Leftmostness bookkeeping for order-sensitive built-ins.

Each agent keeps a linear vector: the ranks it believes hold work, in the
left-to-right order of their regions of the search tree. A side-effect may
run only once its agent is leftmost.

Vector entries may carry a *region key*, the branch path (clause indices
from the root) of the leftmost alternative the agent was given. When keys
are known, insertion is by key order, which agrees with the
right-of-giver rule whenever the giver is present, and still places the
receiver correctly when the giver has been dropped from the vector.
Per-rank epochs (how many times an agent has been given work) discard
notifications that arrive after newer news about the same agent.
"""

from __future__ import annotations

import bisect
from collections import deque


class LinearVector:
    def __init__(self, ranks=(), keys=None, use_keys: bool = True):
        self.ranks: list = list(ranks)
        self.keys: dict = dict(keys or {})
        self.epochs: dict = {}
        self.use_keys = use_keys

    def __contains__(self, rank) -> bool:
        return rank in self.ranks

    def __repr__(self):
        return f"LinearVector({self.ranks})"

    def left_of(self, rank) -> list:
        if rank not in self.ranks:
            return []
        return self.ranks[: self.ranks.index(rank)]

    def is_left(self, a, b) -> bool:
        """True when ``a`` is present and strictly left of ``b`` (absent ``b`` counts as rightmost)."""
        if a not in self.ranks:
            return False
        if b not in self.ranks:
            return True
        return self.ranks.index(a) < self.ranks.index(b)

    def is_leftmost(self, rank) -> bool:
        return bool(self.ranks) and self.ranks[0] == rank

    def remove(self, rank, epoch=None) -> bool:
        """Drop an agent seen idle after its ``epoch``-th work; stale news is ignored."""
        if epoch is not None:
            if epoch < self.epochs.get(rank, 0):
                return False
            self.epochs[rank] = epoch
        if rank in self.ranks:
            self.ranks.remove(rank)
            self.keys.pop(rank, None)
            return True
        return False

    def insert_after(self, giver, receiver, key=None, epoch=None) -> bool:
        """Place ``receiver`` for a sharing event giver -> receiver."""
        if epoch is not None:
            if epoch <= self.epochs.get(receiver, 0):
                return False
            self.epochs[receiver] = epoch
        if receiver in self.ranks:
            self.ranks.remove(receiver)
            self.keys.pop(receiver, None)
        keyed = self.use_keys and key is not None and all(self.keys.get(r) is not None for r in self.ranks)
        if keyed:
            pos = bisect.bisect_right([self.keys[r] for r in self.ranks], key)
            self.ranks.insert(pos, receiver)
        elif giver in self.ranks:
            self.ranks.insert(self.ranks.index(giver) + 1, receiver)
        else:
            self.ranks.append(receiver)
        self.keys[receiver] = key
        return True

    def relative_order_agrees(self, other: "LinearVector") -> bool:
        common = [r for r in self.ranks if r in other.ranks]
        return common == [r for r in other.ranks if r in self.ranks]


class DedupMatrix:
    """``send1[i][j]``: notifications of sharing i -> j heard from i; ``send2`` from j."""

    def __init__(self, n: int):
        self.send1 = [[0] * n for _ in range(n)]
        self.send2 = [[0] * n for _ in range(n)]

    def note(self, giver: int, receiver: int, from_giver: bool) -> bool:
        """Count one notification; True if it is the first to arrive for its sharing event."""
        if from_giver:
            self.send1[giver][receiver] += 1
            return self.send1[giver][receiver] > self.send2[giver][receiver]
        self.send2[giver][receiver] += 1
        return self.send2[giver][receiver] > self.send1[giver][receiver]


def apply_share_notification(vector: LinearVector, dedup: DedupMatrix, note) -> bool:
    """Apply a Send_LoadInfo announcing a sharing; returns True if the vector changed."""
    if note.receiver is None:
        return False
    fresh = dedup.note(note.giver, note.receiver, from_giver=note.src == note.giver)
    if not fresh:
        return False
    key = note.receiver_key if note.receiver_key else None
    return vector.insert_after(note.giver, note.receiver, key, note.receiver_epoch or None)


def osc_request_decision(vector: LinearVector, self_rank: int, requester: int, self_pos=None, requester_pos=None) -> str:
    """``"ack"`` when the requester is left of us, else ``"enqueue"`` (absent counts as right).

    With both branch paths given the answer comes from the tree positions
    themselves, which stay exact even when the vector is out of date.
    """
    if self_pos is not None and requester_pos is not None:
        return "ack" if requester_pos < self_pos else "enqueue"
    if requester in vector and self_rank in vector and vector.is_left(requester, self_rank):
        return "ack"
    if requester in vector and self_rank not in vector:
        return "ack"
    return "enqueue"


class WaitingQueue:
    def __init__(self):
        self._q: deque = deque()

    def enqueue(self, rank):
        if rank not in self._q:
            self._q.append(rank)

    def drain(self) -> list:
        out = list(self._q)
        self._q.clear()
        return out

    def __len__(self):
        return len(self._q)

    def __contains__(self, rank):
        return rank in self._q
