"""Messages exchanged between agents.

Every message carries its sender ``src``, the sender's current load and
the sender's work epoch (how many times it has received work). Epochs let
peers discard stale information about an agent that has since gone idle
and been given new work.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass
class Message:
    src: int
    load: int
    epoch: int


@dataclass
class RequestWork(Message):
    labels: tuple = ()
    reply_to: Optional[int] = None  # set when the central agent forwards a request


@dataclass
class ReplyWithWork(Message):
    payload: object = None


@dataclass
class ReplyWithoutWork(Message):
    reply_to: Optional[int] = None  # requester a forwarded request was declined for


@dataclass
class SendLoadInfo(Message):
    """Load update; with ``receiver`` set it also announces a sharing event."""

    giver: int = -1
    receiver: Optional[int] = None
    giver_load: int = 0
    receiver_load: int = 0
    receiver_epoch: int = 0
    receiver_key: tuple = ()


@dataclass
class ReplyInOSC(Message):
    pass


@dataclass
class RequestOSC(Message):
    key: tuple = ()
    target_epoch: int = 0  # the epoch of the addressee the request is about
    serial: int = 0  # which wait of the requester this belongs to


@dataclass
class OSCAck(Message):
    idle: bool = False  # the sender holds no work at its epoch
    serial: int = 0


@dataclass
class Token(Message):
    color: str = "white"
    initiator: int = 0
    count: int = 0  # running sum of (work sent - work received) over visited agents


@dataclass
class Halt(Message):
    pass


MESSAGE_TYPES = (
    RequestWork,
    ReplyWithWork,
    ReplyWithoutWork,
    SendLoadInfo,
    ReplyInOSC,
    RequestOSC,
    OSCAck,
    Token,
    Halt,
)

KIND_NAMES = {
    RequestWork: "Request_Work",
    ReplyWithWork: "Reply_With_Work",
    ReplyWithoutWork: "Reply_Without_Work",
    SendLoadInfo: "Send_LoadInfo",
    ReplyInOSC: "Reply_In_OSC",
    RequestOSC: "Request_OSC",
    OSCAck: "OSC_Acknowledgment",
    Token: "TerminationToken",
    Halt: "Halt",
}


def kind_name(msg) -> str:
    return KIND_NAMES[type(msg)]
