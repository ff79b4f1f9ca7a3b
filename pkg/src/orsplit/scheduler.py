"""Per-agent scheduler: load vectors, victim selection, work sharing,
order-sensitive waits and token-ring termination.

Termination uses the black/white token ring with message counting: each
agent counts work replies sent minus received, an agent turns black when
it receives work, and the initiator declares termination only when a white
token returns to a white, passive initiator with a zero total count. The
count covers work replies still in flight.

An :class:`Agent` is a generator-driven state machine. ``Agent.main()``
yields whenever it hands control back to the driver: after every poll
slice while running, and after every message-processing pass while idle.
Yielded values are ``"busy"`` or ``"idle"`` so a threaded driver knows
when to block on the bus.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .engine import EXHAUSTED, CorruptionError, Engine, PollPoint, Schedule, SideEffect, Solution
from .messages import (
    Halt,
    OSCAck,
    ReplyInOSC,
    ReplyWithoutWork,
    ReplyWithWork,
    RequestOSC,
    RequestWork,
    SendLoadInfo,
    Token,
)
from .termination import HALT, TerminationDetector
from .osc import DedupMatrix, LinearVector, WaitingQueue, apply_share_notification, osc_request_decision
from .splitting import (
    STRATEGIES,
    VERTICAL_BLOCK,
    apply_split,
    build_share_payload,
    install_payload,
    invalidate_labels,
    label_parallel_choicepoints,
    label_stack,
    plan_share,
)

BOTTOM_MOST = "bottom_most"
TOP_MOST = "top_most"
RANDOM_RR = "random_rr"
CENTRALIZED = "centralized"
POLICIES = (BOTTOM_MOST, TOP_MOST, RANDOM_RR, CENTRALIZED)



@dataclass
class SchedulerConfig:
    policy: str = BOTTOM_MOST
    strategy: str = VERTICAL_BLOCK
    ratio: float = 0.5
    threshold: int = 2
    poll_frequency: int = 200
    osc: bool = False
    first_solution: bool = False
    incremental: bool = True
    gc_invalidation_period: Optional[int] = None
    delay_termination: bool = False
    load_propagation: str = "sharing"  # or "periodic"
    defer_limit: int = 8

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ValueError(f"unknown policy {self.policy!r}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.osc:
            if self.policy == CENTRALIZED:
                raise ValueError("order-sensitive mode is not supported with the centralized policy")
            self.strategy = VERTICAL_BLOCK
            self.ratio = 0.75
        if not 0 < self.ratio <= 1:
            raise ValueError("ratio must be in (0, 1]")
        if self.threshold < 0:
            raise ValueError("threshold must be >= 0")
        if self.poll_frequency < 4:
            raise ValueError("poll_frequency must be >= 4")
        if self.load_propagation not in ("sharing", "periodic"):
            raise ValueError("load_propagation must be 'sharing' or 'periodic'")
        if self.gc_invalidation_period is not None and self.gc_invalidation_period < 1:
            raise ValueError("gc_invalidation_period must be >= 1")


def select_victim(V, policy: str, self_rank: int, threshold: int = 0, previous=None, central: int = 0):
    """Rank to ask for work, or None when every other entry is zero."""
    if policy == CENTRALIZED:
        return central
    n = len(V)
    others = [j for j in range(n) if j != self_rank]
    if not any(V[j] > 0 for j in others):
        return None
    if policy == RANDOM_RR:
        start = 0 if previous is None else previous + 1
        order = [(start + k) % n for k in range(n)]
        order = [j for j in order if j != self_rank]
        for j in order:
            if V[j] > threshold:
                return j
        for j in order:
            if V[j] > 0:
                return j
        return None
    best = None
    for j in others:
        if V[j] > 0 and (best is None or V[j] > V[best]):
            best = j
    return best


@dataclass
class ShareEvent:
    giver: int
    receiver: int
    mode: str
    after_invalidation: bool
    given_cps: int


@dataclass
class RunContext:
    """State shared by all agents of one run (results and test hooks)."""

    solutions: list = field(default_factory=list)
    output: list = field(default_factory=list)
    shares: list = field(default_factory=list)
    on_effect: object = None  # callable(agent) run just before an effect is performed
    on_share: object = None  # callable(giver, receiver_rank, payload)
    lock: object = None

    def record_solution(self, answer):
        if self.lock:
            with self.lock:
                self.solutions.append(answer)
        else:
            self.solutions.append(answer)

    def record_output(self, text):
        if self.lock:
            with self.lock:
                self.output.append(text)
        else:
            self.output.append(text)


class Agent:
    def __init__(self, rank: int, agents: int, engine: Engine, bus, query, cfg: SchedulerConfig, ctx: RunContext):
        self.rank = rank
        self.n = agents
        self.engine = engine
        self.bus = bus
        self.query = query
        self.cfg = cfg
        self.ctx = ctx
        self.centralized = cfg.policy == CENTRALIZED
        self.central = 0
        self.first = 1 if self.centralized else 0
        self.V = [0] * agents
        self.V[self.first] = 1
        self.halted = False
        self.epoch = 1 if rank == self.first else 0
        self.term = TerminationDetector(rank, agents)
        self.previous_victim = None
        self.vector = LinearVector([self.first], {self.first: ()})
        self.vector.epochs[self.first] = 1
        self.dedup = DedupMatrix(agents)
        self.osc_serial = 0
        self.osc_acks: dict = {}
        self.waiting = WaitingQueue()
        self.polls = 0
        self.shares_given = 0
        self.labels_invalidated = False
        self.last_reported_load = None
        self.state = "init"

    # ------------------------------------------------------------ helpers

    def send(self, dst, msg):
        self.bus.send(self.rank, dst, msg)

    def broadcast(self, msg):
        self.bus.broadcast(self.rank, msg)

    def load(self) -> int:
        return self.engine.load()

    def busy_load(self) -> int:
        """Load reported by a running agent: never 0, so 0 means idle to peers."""
        return max(self.engine.load(), 1)

    def _note_load(self, msg):
        if msg.src != self.rank and not isinstance(msg, Token):
            self.V[msg.src] = msg.load

    def _halt(self):
        self.halted = True
        self.state = "halted"

    # ------------------------------------------------------------ main loop

    def main(self):
        if self.centralized and self.rank == self.central:
            yield from self._central_loop()
            return
        if self.rank == self.first:
            self.engine.start(self.query)
        else:
            self.engine.begin(self.query)
            self.engine.stopped = EXHAUSTED
        while not self.halted:
            if self.engine.stopped is None:
                self.state = "running"
                yield from self._run_slice()
            else:
                yield from self._schedule()

    def _run_slice(self):
        ev = self.engine.run()
        t = type(ev)
        if t is PollPoint:
            self.polls += 1
            self._poll_running()
            yield "busy"
        elif t is Solution:
            self.ctx.record_solution(ev.answer)
            if self.cfg.first_solution:
                self.broadcast(Halt(self.rank, 0, self.epoch))
                self._halt()
        elif t is SideEffect:
            if self.cfg.osc:
                yield from self._order_sensitive()
                if self.halted:
                    return
            if self.ctx.on_effect is not None:
                self.ctx.on_effect(self)
            self.engine.perform_side_effect()
            self.ctx.record_output(self.engine.output[-1])
        elif t is Schedule or ev is EXHAUSTED:
            pass
        else:
            raise CorruptionError(f"unexpected engine event {ev!r}")

    # ------------------------------------------------------------ running state

    def _poll_running(self):
        # load information every poll, everything else every fourth poll
        for msg in self.bus.poll(self.rank, kinds=("Send_LoadInfo",)):
            self._on_loadinfo(msg)
        if self.polls % 4:
            return
        for msg in self.bus.poll(self.rank):
            self._handle_running(msg)
            if self.halted:
                return
        load = self.load()
        if self.centralized:
            if load != self.last_reported_load:
                self.last_reported_load = load
                self.send(self.central, SendLoadInfo(self.rank, max(load, 1), self.epoch, giver=self.rank, giver_load=max(load, 1)))
        elif self.cfg.load_propagation == "periodic" and load != self.last_reported_load:
            self.last_reported_load = load
            self.broadcast(SendLoadInfo(self.rank, max(load, 1), self.epoch, giver=self.rank, giver_load=max(load, 1)))

    def _handle_running(self, msg):
        t = type(msg)
        if t is SendLoadInfo:
            self._on_loadinfo(msg)
        elif t is RequestWork:
            self._serve_request(msg)
        elif t is RequestOSC:
            self._answer_osc_request(msg)
        elif t is Token:
            self.term.receive_token(msg.color, msg.count)
        elif t is Halt:
            self._halt()
        elif t is OSCAck:
            self._on_osc_ack(msg)
        else:
            raise CorruptionError(f"agent {self.rank}: unexpected {t.__name__} while running")

    def _on_loadinfo(self, msg: SendLoadInfo):
        if msg.receiver is None:
            self._note_load(msg)
            return
        if msg.giver != self.rank:
            self.V[msg.giver] = msg.giver_load
        if msg.receiver != self.rank:
            self.V[msg.receiver] = msg.receiver_load
        if self.cfg.osc:
            apply_share_notification(self.vector, self.dedup, msg)

    def _serve_request(self, msg: RequestWork):
        requester = msg.reply_to if msg.reply_to is not None else msg.src
        if msg.reply_to is None:
            self.V[requester] = 0
            if self.cfg.osc:
                self.vector.remove(requester, msg.epoch)
        load = self.load()
        if load > self.cfg.threshold and self._give(requester, msg):
            return
        if msg.reply_to is not None:
            self.send(self.central, ReplyWithoutWork(self.rank, load, self.epoch, reply_to=requester))
        else:
            self.send(requester, ReplyWithoutWork(self.rank, self.busy_load(), self.epoch))

    def _give(self, requester: int, req: RequestWork) -> bool:
        cfg = self.cfg
        engine = self.engine
        label_parallel_choicepoints(engine, self.rank)
        plan = plan_share(engine, cfg.strategy, cfg.ratio, top_most=cfg.policy == TOP_MOST, osc=cfg.osc)
        if plan is None:
            return False
        after_invalidation = self.labels_invalidated
        labels = tuple(req.labels) if cfg.incremental else None
        payload = build_share_payload(engine, plan, labels, cfg.incremental)
        payload.receiver_epoch = req.epoch + 1
        if self.ctx.on_share is not None:
            self.ctx.on_share(self, requester, payload, plan)
        apply_split(engine, plan)
        giver_load = max(self.load(), 1)
        receiver_load = len(plan.given())
        self.send(requester, ReplyWithWork(self.rank, giver_load, self.epoch, payload=payload))
        self.term.work_sent()
        self.shares_given += 1
        self.labels_invalidated = False
        self.ctx.shares.append(ShareEvent(self.rank, requester, payload.mode, after_invalidation, receiver_load))
        note = SendLoadInfo(
            self.rank,
            giver_load,
            self.epoch,
            giver=self.rank,
            receiver=requester,
            giver_load=giver_load,
            receiver_load=receiver_load,
            receiver_epoch=payload.receiver_epoch,
            receiver_key=payload.receiver_key,
        )
        self.V[requester] = receiver_load
        if cfg.osc:
            self.dedup.note(self.rank, requester, from_giver=True)
            self.vector.insert_after(self.rank, requester, payload.receiver_key, payload.receiver_epoch)
        if self.centralized:
            self.send(self.central, note)
        else:
            self.broadcast(note)
        period = cfg.gc_invalidation_period
        if period and self.shares_given % period == 0:
            invalidate_labels(engine)
            self.labels_invalidated = True
        return True

    # ------------------------------------------------------------ order-sensitive state

    def _order_sensitive(self):
        self.state = "osc"
        requested = set()
        self.osc_serial += 1
        self.osc_acks = {}
        here = self.engine.branch_path()
        while not self.halted:
            blocking = [
                r for r in self.vector.left_of(self.rank) if self.osc_acks.get(r, -1) < self.vector.epochs.get(r, 0)
            ]
            if not blocking:
                break
            for r in blocking:
                # ask again if r has been given new work since our last request
                tag = (r, self.vector.epochs.get(r, 0))
                if tag not in requested:
                    requested.add(tag)
                    self.send(
                        r,
                        RequestOSC(
                            self.rank, self.busy_load(), self.epoch, key=here, target_epoch=tag[1], serial=self.osc_serial
                        ),
                    )
            yield "idle"
            for msg in self.bus.poll(self.rank):
                self._handle_osc_wait(msg)
                if self.halted:
                    return
        if self.halted:
            return
        self.state = "running"
        if len(requested):
            load = self.busy_load()
            self.broadcast(SendLoadInfo(self.rank, load, self.epoch, giver=self.rank, giver_load=load))

    def _answer_osc_request(self, msg: RequestOSC):
        """A running agent acks a request from the left at once and queues the rest."""
        self._note_load(msg)
        if msg.target_epoch <= self.epoch and osc_request_decision(
            self.vector, self.rank, msg.src, self.engine.branch_path(), msg.key
        ) == "ack":
            self.send(msg.src, OSCAck(self.rank, self.busy_load(), self.epoch, serial=msg.serial))
        else:
            self.waiting.enqueue(msg.src)

    def _on_osc_ack(self, msg: OSCAck):
        self._note_load(msg)
        if msg.idle:
            self.vector.remove(msg.src, msg.epoch)
        elif msg.serial == self.osc_serial and msg.epoch > self.osc_acks.get(msg.src, -1):
            # only releases the current wait: the sender is right of where we are now
            self.osc_acks[msg.src] = msg.epoch

    def _handle_osc_wait(self, msg):
        t = type(msg)
        if t is OSCAck:
            self._on_osc_ack(msg)
        elif t is SendLoadInfo:
            self._on_loadinfo(msg)
        elif t is RequestWork:
            self.V[msg.src] = 0
            self.vector.remove(msg.src, msg.epoch)
            self.send(msg.src, ReplyInOSC(self.rank, self.busy_load(), self.epoch))
        elif t is RequestOSC:
            self._answer_osc_request(msg)
        elif t is Token:
            self.term.receive_token(msg.color, msg.count)
        elif t is Halt:
            self._halt()
        else:
            raise CorruptionError(f"agent {self.rank}: unexpected {t.__name__} while waiting to be leftmost")

    # ------------------------------------------------------------ scheduling state

    def _enter_idle(self):
        self.state = "idle"
        self.V[self.rank] = 0
        if self.cfg.osc:
            for r in self.waiting.drain():
                self.send(r, OSCAck(self.rank, 0, self.epoch, idle=True))
            self.vector.remove(self.rank)
        self.last_reported_load = None

    def _handle_idle(self, msg):
        """Messages an idle agent handles the same way whatever it is waiting for."""
        t = type(msg)
        if t is SendLoadInfo:
            self._on_loadinfo(msg)
        elif t is RequestWork:
            requester = msg.reply_to if msg.reply_to is not None else msg.src
            if msg.reply_to is not None:
                self.send(self.central, ReplyWithoutWork(self.rank, 0, self.epoch, reply_to=requester))
            else:
                self.V[requester] = 0
                if self.cfg.osc:
                    self.vector.remove(requester, msg.epoch)
                self.send(requester, ReplyWithoutWork(self.rank, 0, self.epoch))
        elif t is RequestOSC:
            self._note_load(msg)
            if msg.target_epoch > self.epoch:
                # work for us is still in flight; answer once it is done
                self.waiting.enqueue(msg.src)
            else:
                self.send(msg.src, OSCAck(self.rank, 0, self.epoch, idle=True))
        elif t is OSCAck:
            self._on_osc_ack(msg)
        elif t is Token:
            self.term.receive_token(msg.color, msg.count)
        elif t is Halt:
            self._halt()
        elif t is ReplyInOSC:
            self.V[msg.src] = 1
        elif t is ReplyWithoutWork:
            self._note_load(msg)
        else:
            raise CorruptionError(f"agent {self.rank}: unexpected {t.__name__} while idle")

    def _install(self, msg: ReplyWithWork):
        payload = msg.payload
        install_payload(self.engine, payload)
        self.term.work_received()
        self.epoch = payload.receiver_epoch
        self.V[msg.src] = msg.load
        self.V[self.rank] = max(self.load(), 1)
        if self.cfg.osc:
            self.dedup.note(msg.src, self.rank, from_giver=False)
            self.vector.insert_after(msg.src, self.rank, payload.receiver_key, payload.receiver_epoch)
            load = max(self.load(), 1)
            self.broadcast(
                SendLoadInfo(
                    self.rank,
                    load,
                    self.epoch,
                    giver=msg.src,
                    receiver=self.rank,
                    giver_load=msg.load,
                    receiver_load=load,
                    receiver_epoch=payload.receiver_epoch,
                    receiver_key=payload.receiver_key,
                )
            )
        self.engine.resume()

    def _act_on_token(self, action):
        if action is HALT:
            self.broadcast(Halt(self.rank, 0, self.epoch))
            self._halt()
        elif action is not None:
            self.send(
                action.dst,
                Token(self.rank, 0, self.epoch, color=action.color, initiator=self.term.initiator, count=action.count),
            )

    def _pass_token(self):
        """A passive agent forwards a held token, adding its count and color."""
        self._act_on_token(self.term.pass_token())

    def _maybe_start_round(self, force: bool = False):
        if self.rank != self.term.initiator or self.halted:
            return
        if not force and any(self.V[j] > 0 for j in range(self.n) if j != self.rank):
            return
        self._act_on_token(self.term.start_round())

    def _idle_pass(self, force_round: bool = False):
        """One message-processing pass while idle; returns replies to our own work request."""
        replies = []
        for msg in self.bus.poll(self.rank):
            t = type(msg)
            if t is ReplyWithWork or t is ReplyInOSC or (t is ReplyWithoutWork and msg.reply_to is None):
                replies.append(msg)
            else:
                self._handle_idle(msg)
            if self.halted:
                return replies
        if not self.centralized:
            self._pass_token()
            if not self.halted:
                self._maybe_start_round(force_round)
        return replies

    def _schedule(self):
        self._enter_idle()
        if self.centralized:
            yield from self._schedule_centralized()
            return
        cfg = self.cfg
        deferred = 0
        while not self.halted:
            self._idle_pass()
            if self.halted:
                return
            victim = select_victim(self.V, cfg.policy, self.rank, cfg.threshold, self.previous_victim)
            if victim is None:
                if not cfg.delay_termination:
                    yield from self._dead_end()
                    return
                yield "idle"
                continue
            if max(self.V[j] for j in range(self.n) if j != self.rank) <= cfg.threshold and deferred < cfg.defer_limit:
                deferred += 1
                yield "idle"
                continue
            deferred = 0
            self.previous_victim = victim
            labels = tuple(label_stack(self.engine).labels) if cfg.incremental else ()
            self.send(victim, RequestWork(self.rank, 0, self.epoch, labels=labels))
            while True:
                yield "idle"
                replies = self._idle_pass()
                if self.halted:
                    return
                got = None
                for msg in replies:
                    if type(msg) is ReplyWithWork:
                        if got is not None:
                            raise CorruptionError("two work replies for one request")
                        got = msg
                    elif msg.src == victim:
                        if type(msg) is ReplyInOSC:
                            self.V[victim] = 1
                        else:
                            self.V[victim] = msg.load
                        got = got or "denied"
                if got is None:
                    continue
                if got == "denied":
                    break
                self._install(got)
                return

    def _dead_end(self):
        """Wait for Halt; never leaves unless delay-termination is on."""
        self.state = "dead_end"
        while not self.halted:
            yield "idle"
            if self._idle_pass(force_round=True):
                raise CorruptionError(f"agent {self.rank}: reply without a pending request")

    # ------------------------------------------------------------ centralized policy

    def _schedule_centralized(self):
        labels = tuple(label_stack(self.engine).labels) if self.cfg.incremental else ()
        self.send(self.central, RequestWork(self.rank, 0, self.epoch, labels=labels))
        while not self.halted:
            yield "idle"
            got = None
            for msg in self.bus.poll(self.rank):
                if type(msg) is ReplyWithWork:
                    got = msg
                    continue
                self._handle_idle(msg)
                if self.halted:
                    return
            if got is not None:
                self._install(got)
                return

    def _central_loop(self):
        """Rank 0 does no search: it pairs idle workers with the busiest worker."""
        self.state = "central"
        workers = list(range(1, self.n))
        pending: deque = deque()
        outstanding: dict = {}
        self.central_queues = (pending, outstanding)
        V = self.V
        while not self.halted:
            for msg in self.bus.poll(self.rank):
                t = type(msg)
                if t is RequestWork:
                    V[msg.src] = 0
                    pending.append(msg)
                elif t is SendLoadInfo:
                    if msg.receiver is None:
                        V[msg.src] = msg.load
                    else:
                        V[msg.giver] = msg.giver_load
                        V[msg.receiver] = msg.receiver_load
                        outstanding.pop(msg.receiver, None)
                elif t is ReplyWithoutWork:
                    V[msg.src] = msg.load
                    req = outstanding.pop(msg.reply_to, None)
                    if req is not None:
                        pending.appendleft(req)
                else:
                    raise CorruptionError(f"central: unexpected {t.__name__}")
            idle = {m.src for m in pending} | set(outstanding)
            while pending:
                candidates = [w for w in workers if w not in idle and V[w] > self.cfg.threshold]
                # a newer request waits until the share note for the older one is in
                ready = [m for m in pending if m.src not in outstanding]
                if not candidates or not ready:
                    break
                busiest = max(candidates, key=lambda w: (V[w], -w))
                req = ready[0]
                pending.remove(req)
                outstanding[req.src] = req
                V[busiest] -= 1
                self.send(
                    busiest,
                    RequestWork(self.rank, 0, req.epoch, labels=req.labels, reply_to=req.src),
                )
            if len(pending) == len(workers) and not outstanding:
                self.broadcast(Halt(self.rank, 0, 0))
                self._halt()
                return
            yield "idle"
