import functools
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from orsplit.bench import corpus_source  # noqa: E402
from orsplit.engine import run_sequential  # noqa: E402


@functools.lru_cache(maxsize=None)
def source(name: str) -> str:
    return corpus_source(name if name.endswith(".pl") else name + ".pl")


@functools.lru_cache(maxsize=None)
def sequential(name: str, query: str):
    answers, output = run_sequential(source(name), query)
    return tuple(answers), output


@pytest.fixture
def src():
    return source


# one line per acceptance criterion, repeated at the end of the run
VERDICTS: dict = {}


def record_verdict(number: int, title: str, ok: bool, detail: str = "") -> str:
    line = f"criterion {number} ({title}): {'PASS' if ok else 'FAIL'}" + (f" - {detail}" if detail else "")
    VERDICTS[number] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[n])
