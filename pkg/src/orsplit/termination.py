"""Token-ring termination detection with work counting.

Each agent counts the work messages it has sent minus those it has
received, and turns black when it receives work. The token carries the
running sum of these balances around the ring. The initiator declares
termination only when the token comes back white, the initiator itself is
still white, and the balances add up to zero: then no agent was reactivated
during the round and no work message is still in flight.

Colors alone are not enough here. A Reply_With_Work sent by an agent before
it forwarded the token can still be travelling when the token gets home,
and neither end would have turned black yet.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

WHITE = "white"
BLACK = "black"


@dataclass(frozen=True)
class Forward:
    dst: int
    color: str
    count: int


HALT = "halt"


class TerminationDetector:
    def __init__(self, rank: int, n: int, initiator: int = 0):
        self.rank = rank
        self.n = n
        self.initiator = initiator
        self.color = WHITE
        self.balance = 0
        self.token = None  # (color, count) held until this agent is passive
        self.round_active = False

    def work_sent(self):
        self.balance += 1

    def work_received(self):
        self.balance -= 1
        self.color = BLACK

    def receive_token(self, color: str, count: int):
        self.token = (color, count)

    def pass_token(self) -> Optional[object]:
        """Called only while passive. Returns a Forward, HALT, or None."""
        if self.token is None:
            return None
        color, count = self.token
        self.token = None
        if self.rank == self.initiator:
            self.round_active = False
            if color == WHITE and self.color == WHITE and count + self.balance == 0:
                return HALT
            return None
        out = Forward((self.rank + 1) % self.n, BLACK if self.color == BLACK else color, count + self.balance)
        self.color = WHITE
        return out

    def start_round(self) -> Optional[object]:
        """Initiator only, while passive: launch a probe (or halt outright when alone)."""
        if self.rank != self.initiator or self.round_active:
            return None
        if self.n == 1:
            return HALT if self.balance == 0 else None
        self.color = WHITE
        self.round_active = True
        return Forward((self.rank + 1) % self.n, WHITE, 0)
