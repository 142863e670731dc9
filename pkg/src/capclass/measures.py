"""Rule and itemset quality measures.

Frequency arrays are per-class transaction counts (any integer sequence or
numpy array). All measures are computed in double precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass(frozen=True)
class RuleStats:
    support: float
    confidence: float
    chi2: float


def _total(freqs: Sequence[int]) -> int:
    return int(sum(int(c) for c in freqs))


def gini(freqs: Sequence[int]) -> float:
    """Gini impurity sum(f_i * (1 - f_i)); 0.0 for an empty array."""
    total = _total(freqs)
    if total == 0:
        return 0.0
    g = 0.0
    for c in freqs:
        f = int(c) / total
        g += f * (1.0 - f)
    return g


def ig_item(item_freqs: Sequence[int], dataset_freqs: Sequence[int]) -> float:
    """Information gain of a single item: w * (gini(D) - gini(item))."""
    n = _total(dataset_freqs)
    if n == 0:
        raise ValueError("dataset frequency array is empty")
    w = _total(item_freqs) / n
    return w * (gini(dataset_freqs) - gini(item_freqs))


def ig_node(node_freqs: Sequence[int], parent_freqs: Sequence[int]) -> float:
    """Information gain of a tree node relative to its parent."""
    n = _total(parent_freqs)
    if n == 0:
        raise ValueError("parent frequency array is empty")
    w = _total(node_freqs) / n
    return w * (gini(parent_freqs) - gini(node_freqs))


def _gini_exact(freqs: Sequence[int]) -> Fraction:
    total = _total(freqs)
    if total == 0:
        return Fraction(0)
    return 1 - Fraction(sum(int(c) ** 2 for c in freqs), total * total)


def ig_exact(freqs: Sequence[int], reference: Sequence[int]) -> Fraction:
    """Exact rational information gain, used for ordering and sign tests."""
    n = _total(reference)
    if n == 0:
        raise ValueError("reference frequency array is empty")
    return Fraction(_total(freqs), n) * (_gini_exact(reference) - _gini_exact(freqs))


def min_count(minsup: float, n: int) -> int:
    """Smallest integer k with k / n >= minsup under float comparison."""
    k = max(0, math.ceil(minsup * n))
    while k > 0 and (k - 1) / n >= minsup:
        k -= 1
    while k / n < minsup:
        k += 1
    return k


def chi2_2x2(a: float, b: float, c: float, d: float) -> float:
    """Pearson chi-square of [[a, b], [c, d]] without continuity correction.

    Cells with zero expected count contribute nothing.
    """
    n = a + b + c + d
    if n == 0:
        return 0.0
    rows = (a + b, c + d)
    cols = (a + c, b + d)
    observed = ((a, b), (c, d))
    chi2 = 0.0
    for i in range(2):
        for j in range(2):
            expected = rows[i] * cols[j] / n
            if expected > 0:
                chi2 += (observed[i][j] - expected) ** 2 / expected
    return chi2


def rule_stats(rule_freqs: Sequence[int], consequent: int,
               dataset_freqs: Sequence[int]) -> RuleStats:
    """Support, confidence and chi-square of ``antecedent => consequent``.

    ``rule_freqs`` are the class counts of the transactions that contain the
    antecedent; ``dataset_freqs`` the class counts of the whole dataset.
    """
    covered = _total(rule_freqs)
    if covered == 0:
        raise ValueError("antecedent covers no transaction")
    n = _total(dataset_freqs)
    hit = int(rule_freqs[consequent])
    miss = covered - hit
    class_total = int(dataset_freqs[consequent])
    chi2 = chi2_2x2(hit, miss, class_total - hit, (n - class_total) - miss)
    return RuleStats(support=hit / n, confidence=hit / covered, chi2=chi2)

