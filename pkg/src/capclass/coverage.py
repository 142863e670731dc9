"""Standalone database coverage pass with a pruning report."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Sequence

from .capgrowth import CAR
from .dataset import Dataset
from .ensemble import coverage_scan


@dataclass(frozen=True)
class PruneReport:
    rules_in: int
    rules_out: int
    pruned_fraction: float
    transactions_covered: int

    def to_line(self) -> str:
        return json.dumps(asdict(self), sort_keys=False)


def prune_with_report(rules: Sequence[CAR], d: Dataset) -> tuple[list[CAR], PruneReport]:
    keep, covered = coverage_scan(rules, d)
    kept = [r for r, k in zip(rules, keep) if k]
    n_in = len(rules)
    fraction = 0.0 if n_in == 0 else (n_in - len(kept)) / n_in
    return kept, PruneReport(n_in, len(kept), fraction, covered)
