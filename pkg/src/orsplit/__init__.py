"""Or-parallel Prolog with stack splitting on a simulated message-passing machine."""

from .bench import RunConfig, RunReport, compare_with_oracle, emit_report, run_benchmark
from .engine import Database, Engine, collect_solutions, run_sequential
from .parser import ParseError, parse_program, parse_query
from .scheduler import SchedulerConfig

__all__ = [
    "Database",
    "Engine",
    "ParseError",
    "RunConfig",
    "RunReport",
    "SchedulerConfig",
    "collect_solutions",
    "compare_with_oracle",
    "emit_report",
    "parse_program",
    "parse_query",
    "run_benchmark",
    "run_sequential",
]
__version__ = "0.1.0"
