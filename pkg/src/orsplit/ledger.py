"""Global execution ledger: every (choice-point, alternative) pair must run exactly once."""

from __future__ import annotations

import threading
from collections import defaultdict
from dataclasses import dataclass, field


@dataclass
class LedgerVerdict:
    duplicates: list = field(default_factory=list)  # (creation id, alternative, ranks)
    omissions: list = field(default_factory=list)  # (creation id, alternative)
    unknown: list = field(default_factory=list)  # executions of alternatives never created

    @property
    def ok(self) -> bool:
        return not (self.duplicates or self.omissions or self.unknown)


class Ledger:
    def __init__(self):
        self._lock = threading.Lock()
        self.candidates: dict = {}
        self.runs: dict = defaultdict(list)

    def created(self, cid, cands):
        with self._lock:
            if cid in self.candidates:
                raise RuntimeError(f"choice-point {cid} created twice")
            self.candidates[cid] = tuple(cands)

    def executed(self, cid, alt, rank):
        with self._lock:
            self.runs[(cid, alt)].append(rank)

    @property
    def executions(self) -> int:
        return sum(len(r) for r in self.runs.values())

    def verify(self, complete: bool = True) -> LedgerVerdict:
        """``complete=False`` skips the omission check (first-solution runs stop early)."""
        v = LedgerVerdict()
        for (cid, alt), ranks in self.runs.items():
            if cid not in self.candidates or alt not in self.candidates[cid]:
                v.unknown.append((cid, alt))
            if len(ranks) > 1:
                v.duplicates.append((cid, alt, tuple(ranks)))
        if complete:
            for cid, cands in self.candidates.items():
                for alt in cands:
                    if (cid, alt) not in self.runs:
                        v.omissions.append((cid, alt))
        return v
