"""Greedy class-association-rule extraction over a CAP-tree.

The tree is visited depth first in rank order. A node whose information
gain over its parent is not positive is abandoned with its whole subtree; a
pure node tries to emit a rule for its root path; any other node tries to
emit a rule only when none of its children produced one. Rule statistics
come from the exact class counts of the antecedent, recovered by projecting
the tree on each antecedent item.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .captree import CAPTree, itemset_freqs
from .measures import RuleStats, gini, ig_node, rule_stats


@dataclass(frozen=True)
class CAR:
    antecedent: tuple  # sorted item ids
    consequent: int
    support: float
    confidence: float
    chi2: float

    @property
    def key(self) -> tuple:
        return (self.antecedent, self.consequent)

    @property
    def stats(self) -> RuleStats:
        return RuleStats(self.support, self.confidence, self.chi2)

    def with_stats(self, stats: RuleStats) -> "CAR":
        return CAR(self.antecedent, self.consequent, stats.support, stats.confidence, stats.chi2)


@dataclass(frozen=True)
class ExtractionParams:
    minsup: float
    minconf: float = 0.5
    minchi2: float = 3.841

    def __post_init__(self):
        if not 0.0 < self.minsup <= 1.0:
            raise ValueError(f"minsup must be in (0, 1], got {self.minsup}")
        if not 0.0 < self.minconf <= 1.0:
            raise ValueError(f"minconf must be in (0, 1], got {self.minconf}")
        if self.minchi2 < 0:
            raise ValueError(f"minchi2 must be >= 0, got {self.minchi2}")


def generate_rule(t: CAPTree, node: int, p: ExtractionParams) -> Optional[CAR]:
    """Rule for the root path of ``node``, or None when a threshold fails."""
    if node == 0:
        raise ValueError("cannot generate a rule for the root")
    consequent = int(np.argmax(t.node_freqs[node]))
    antecedent = t.path_items(node)
    freqs = itemset_freqs(t, antecedent)
    stats = rule_stats(freqs, consequent, t.dataset_freqs)
    if stats.support < p.minsup or stats.confidence < p.minconf or stats.chi2 < p.minchi2:
        return None
    return CAR(tuple(sorted(antecedent)), consequent, stats.support, stats.confidence, stats.chi2)


Visitor = Callable[[int, float], None]


def _extract(t: CAPTree, node: int, parent_freqs: np.ndarray, p: ExtractionParams,
             visit: Optional[Visitor]) -> list[CAR]:
    freqs = t.node_freqs[node]
    ig = ig_node(freqs, parent_freqs)
    if visit is not None:
        visit(node, ig)
    if ig <= 0:
        return []
    if gini(freqs) == 0:
        rule = generate_rule(t, node, p)
        return [rule] if rule is not None else []
    rules: list[CAR] = []
    for child in t.children_of(node):
        rules += _extract(t, int(child), freqs, p, visit)
    if not rules:
        rule = generate_rule(t, node, p)
        if rule is not None:
            rules.append(rule)
    return rules


def extract_rules(t: CAPTree, p: ExtractionParams, visit: Optional[Visitor] = None) -> list[CAR]:
    """CARs in visit order; a repeated (antecedent, consequent) keeps its first occurrence.

    ``visit(node, ig)`` is called for every node the search reaches.
    """
    rules: list[CAR] = []
    for child in t.children_of(0):
        # root children are measured against the whole dataset's class counts
        rules += _extract(t, int(child), t.dataset_freqs, p, visit)
    seen = set()
    out = []
    for r in rules:
        if r.key not in seen:
            seen.add(r.key)
            out.append(r)
    return out
