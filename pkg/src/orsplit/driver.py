"""Run a query on N agents, either in deterministic lockstep or on threads."""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field

from .engine import Database, Engine
from .ledger import Ledger
from .parser import parse_program, parse_query
from .scheduler import Agent, RunContext, SchedulerConfig
from .transport import Bus


class DeadlockError(RuntimeError):
    pass


@dataclass
class RunResult:
    solutions: list
    output: str
    agents: list
    bus: Bus
    ctx: RunContext
    ledger: Ledger | None
    rounds: int = 0
    wall_ms: float = 0.0
    stats: dict = field(default_factory=dict)


def build_agents(program, query, agents: int, cfg: SchedulerConfig, seed: int = 0, reorder_window: int = 0, ledger=None):
    if isinstance(program, str):
        program = parse_program(program)
    if isinstance(query, str):
        query = parse_query(query)
    if agents < 1:
        raise ValueError("agents must be >= 1")
    if cfg.policy == "centralized" and agents < 2:
        raise ValueError("the centralized policy needs at least 2 agents (one central, one worker)")
    db = program if isinstance(program, Database) else Database(program)
    bus = Bus(agents, db, seed=seed, reorder_window=reorder_window)
    ctx = RunContext()
    team = []
    for rank in range(agents):
        engine = Engine(db, rank=rank, poll_interval=max(1, cfg.poll_frequency // 4), ledger=ledger)
        team.append(Agent(rank, agents, engine, bus, query, cfg, ctx))
    return db, bus, ctx, team


def run_lockstep(
    program,
    query,
    agents: int,
    cfg: SchedulerConfig,
    seed: int = 0,
    reorder_window: int = 0,
    ledger: Ledger | None = None,
    max_rounds: int = 50_000_000,
    setup=None,
):
    """Round-robin stepping; with a fixed seed the whole run is reproducible."""
    db, bus, ctx, team = build_agents(program, query, agents, cfg, seed, reorder_window, ledger)
    if setup is not None:
        setup(team, bus, ctx)
    gens = [a.main() for a in team]
    live = list(range(agents))
    rounds = 0
    idle_rounds = 0
    start = time.perf_counter()
    while live:
        busy = False
        for rank in list(live):
            try:
                if next(gens[rank]) == "busy":
                    busy = True
            except StopIteration:
                live.remove(rank)
        bus.tick()
        rounds += 1
        idle_rounds = 0 if busy else idle_rounds + 1
        if rounds > max_rounds or idle_rounds > 200_000:
            states = {a.rank: a.state for a in team}
            raise DeadlockError(f"no termination after {rounds} rounds; states {states}")
    wall = (time.perf_counter() - start) * 1000
    return RunResult(list(ctx.solutions), "".join(ctx.output), team, bus, ctx, ledger, rounds, wall)


def run_threaded(
    program,
    query,
    agents: int,
    cfg: SchedulerConfig,
    seed: int = 0,
    ledger: Ledger | None = None,
    timeout: float = 600.0,
):
    """Free-running mode: one thread per agent, no reorder injection."""
    db, bus, ctx, team = build_agents(program, query, agents, cfg, seed, 0, ledger)
    ctx.lock = threading.Lock()
    errors = []

    def loop(agent):
        try:
            for hint in agent.main():
                if hint == "idle":
                    bus.wait(agent.rank, 0.002)
        except BaseException as exc:  # surfaced to the caller below
            errors.append(exc)

    threads = [threading.Thread(target=loop, args=(a,), daemon=True) for a in team]
    start = time.perf_counter()
    for t in threads:
        t.start()
    for t in threads:
        t.join(timeout)
        if t.is_alive():
            raise DeadlockError("threaded run did not terminate")
    if errors:
        raise errors[0]
    wall = (time.perf_counter() - start) * 1000
    return RunResult(list(ctx.solutions), "".join(ctx.output), team, bus, ctx, ledger, 0, wall)
