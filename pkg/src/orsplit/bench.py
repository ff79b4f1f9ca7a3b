"""Benchmark runs, oracle comparison and report emission."""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .driver import run_lockstep, run_threaded
from .engine import run_sequential
from .ledger import Ledger
from .scheduler import SchedulerConfig

CSV_COLUMNS = (
    "benchmark",
    "agents",
    "policy",
    "strategy",
    "incremental",
    "solutions",
    "messages_total",
    "bytes_total",
    "sharings_full",
    "sharings_incremental",
    "wall_ms",
    "seed",
)

# name -> (corpus file, query); the standard instances
CORPUS = {
    "queens8": ("queens.pl", "queens(8, Q)"),
    "queens10": ("queens.pl", "queens(10, Q)"),
    "costas8": ("costas.pl", "costas(8, P)"),
    "costas9": ("costas.pl", "costas(9, P)"),
    "knight": ("knight.pl", "tour"),
    "hamilton": ("hamilton.pl", "cycles"),
    "mapcolor": ("mapcolor.pl", "colorings"),
    "sendmore": ("sendmore.pl", "puzzle(L)"),
    "stable": ("stable.pl", "model(M)"),
}


def corpus_source(filename: str) -> str:
    return resources.files("orsplit.corpus").joinpath(filename).read_text()


def corpus_path(filename: str) -> Path:
    return Path(str(resources.files("orsplit.corpus").joinpath(filename)))


@dataclass
class RunConfig:
    program: str
    query: str
    agents: int = 1
    policy: str = "bottom_most"
    strategy: str = "vertical_block"
    ratio: float = 0.5
    threshold: int = 2
    poll_frequency: int = 200
    osc: bool = False
    first_solution: bool = False
    seed: int = 0
    incremental: bool = True
    gc_invalidation_period: Optional[int] = None
    delay_termination: bool = False
    load_propagation: str = "sharing"
    reorder_window: int = 0
    threaded: bool = False
    benchmark: str = ""
    track_ledger: bool = False

    def __post_init__(self):
        if self.agents < 1:
            raise ValueError("agents must be >= 1")
        if not 0 < self.ratio <= 1:
            raise ValueError("ratio must be in (0, 1]")
        if not self.benchmark:
            self.benchmark = Path(self.program).stem

    def scheduler_config(self) -> SchedulerConfig:
        return SchedulerConfig(
            policy=self.policy,
            strategy=self.strategy,
            ratio=self.ratio,
            threshold=self.threshold,
            poll_frequency=self.poll_frequency,
            osc=self.osc,
            first_solution=self.first_solution,
            incremental=self.incremental,
            gc_invalidation_period=self.gc_invalidation_period,
            delay_termination=self.delay_termination,
            load_propagation=self.load_propagation,
        )

    def source(self) -> str:
        return Path(self.program).read_text()


@dataclass
class RunReport:
    config: RunConfig
    solutions: list
    side_effect_output: str
    message_counts: dict
    message_bytes: dict
    sharings_full: int
    sharings_incremental: int
    alternatives: list  # executed per agent
    wall_ms: float
    ledger: Optional[Ledger] = None
    effective_strategy: str = ""
    halted: list = field(default_factory=list)  # per agent
    work_in_flight: int = 0  # Reply_With_Work still queued when the run ended
    share_events: list = field(default_factory=list)

    @property
    def solution_count(self) -> int:
        return len(self.solutions)

    @property
    def messages_total(self) -> int:
        return sum(self.message_counts.values())

    @property
    def bytes_total(self) -> int:
        return sum(self.message_bytes.values())

    def row(self) -> dict:
        c = self.config
        return {
            "benchmark": c.benchmark,
            "agents": c.agents,
            "policy": c.policy,
            "strategy": self.effective_strategy or c.strategy,
            "incremental": int(c.incremental),
            "solutions": self.solution_count,
            "messages_total": self.messages_total,
            "bytes_total": self.bytes_total,
            "sharings_full": self.sharings_full,
            "sharings_incremental": self.sharings_incremental,
            "wall_ms": round(self.wall_ms, 1),
            "seed": c.seed,
        }


def run_benchmark(config: RunConfig, source: Optional[str] = None) -> RunReport:
    """One complete run to Halt. Parse errors and protocol corruption propagate."""
    src = source if source is not None else config.source()
    cfg = config.scheduler_config()
    ledger = Ledger() if config.track_ledger else None
    if config.threaded:
        result = run_threaded(src, config.query, config.agents, cfg, seed=config.seed, ledger=ledger)
    else:
        result = run_lockstep(
            src, config.query, config.agents, cfg, seed=config.seed, reorder_window=config.reorder_window, ledger=ledger
        )
    shares = result.ctx.shares
    return RunReport(
        config=config,
        solutions=list(result.solutions),
        side_effect_output=result.output,
        message_counts=dict(result.bus.count),
        message_bytes=dict(result.bus.bytes),
        sharings_full=sum(1 for s in shares if s.mode == "full"),
        sharings_incremental=sum(1 for s in shares if s.mode == "incremental"),
        alternatives=[a.engine.alternatives_executed for a in result.agents],
        wall_ms=result.wall_ms,
        ledger=ledger,
        effective_strategy=cfg.strategy,
        halted=[a.halted for a in result.agents],
        work_in_flight=result.bus.in_flight({"Reply_With_Work"}),
        share_events=list(shares),
    )


@dataclass
class Oracle:
    solutions: list
    output: str


def sequential_oracle(source: str, query: str, limit=None) -> Oracle:
    answers, output = run_sequential(source, query, limit=limit)
    return Oracle(answers, output)


@dataclass
class Verdict:
    ok: bool
    reasons: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def first_divergence(a: str, b: str) -> Optional[int]:
    for i, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return i
    if len(a) != len(b):
        return min(len(a), len(b))
    return None


def compare_with_oracle(report: RunReport, oracle: Oracle) -> Verdict:
    """Solutions are compared as multisets; with OSC the output must also match exactly.

    In first-solution mode any single oracle answer is accepted.
    """
    reasons = []
    got = Counter(report.solutions)
    if report.config.first_solution:
        if not report.solutions:
            reasons.append("no solution found")
        for answer in got:
            if answer not in oracle.solutions:
                reasons.append(f"answer not produced by the sequential run: {answer}")
    else:
        want = Counter(oracle.solutions)
        for answer, n in got.items():
            if n > want.get(answer, 0):
                if want.get(answer, 0):
                    reasons.append(f"duplicated answer ({n} times, expected {want[answer]}): {answer}")
                else:
                    reasons.append(f"unexpected answer: {answer}")
        for answer, n in want.items():
            if got.get(answer, 0) < n:
                reasons.append(f"missing answer: {answer}")
    if report.config.osc or report.config.agents == 1:
        pos = first_divergence(report.side_effect_output, oracle.output)
        if pos is not None:
            reasons.append(f"output differs from the sequential run at character {pos}")
    if report.config.agents == 1 and not report.config.first_solution and report.solutions != oracle.solutions:
        if not reasons:
            reasons.append("answers are not in sequential order")
    return Verdict(not reasons, reasons)


def emit_report(reports, fmt: str = "csv", path=None) -> str:
    """Render one or more reports; writes to ``path`` when given and returns the text."""
    if isinstance(reports, RunReport):
        reports = [reports]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for r in reports:
            writer.writerow(r.row())
        text = buf.getvalue()
    elif fmt == "text":
        blocks = []
        for r in reports:
            lines = [f"{k}: {v}" for k, v in r.row().items()]
            lines.append("alternatives per agent: " + " ".join(f"{i}={n}" for i, n in enumerate(r.alternatives)))
            kinds = sorted(r.message_counts)
            lines.extend(f"  {k}: {r.message_counts[k]} messages, {r.message_bytes[k]} bytes" for k in kinds)
            blocks.append("\n".join(lines))
        text = "\n\n".join(blocks) + "\n"
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text
