"""Brute-force reference miners for tests: no tree, no gain pruning.

Everything here is computed by full scans of the dataset so it can serve as
an independent check of the CAP-tree and CAP-growth code paths.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np

from .capgrowth import CAR
from .dataset import Dataset

MAX_FREQUENT_ITEMS = 20


def naive_itemset_freqs(d: Dataset, itemset) -> np.ndarray:
    """Class counts of labeled transactions containing every item of ``itemset``."""
    wanted = set(int(i) for i in itemset)
    out = np.zeros(d.n_classes, dtype=np.int64)
    for i in range(len(d)):
        label = int(d.labels[i])
        if label >= 0 and wanted.issubset(d.row(i).tolist()):
            out[label] += 1
    return out


def _chi2_shortcut(a: int, b: int, c: int, dd: int) -> float:
    # N (ad - bc)^2 / product of margins; degenerate margins give 0
    n = a + b + c + dd
    denom = (a + b) * (c + dd) * (a + c) * (b + dd)
    if denom == 0:
        return 0.0
    return n * (a * dd - b * c) ** 2 / denom


def mine_all_cars(d: Dataset, minsup: float, minconf: float) -> list[CAR]:
    """Every CAR with support >= minsup and confidence >= minconf, level-wise.

    Candidate antecedents are grown only from antecedents that are themselves
    frequent. Rules are returned sorted by (antecedent length, antecedent, class).
    """
    n = int(d.class_counts.sum())
    if n == 0:
        return []
    rows = [(frozenset(d.row(i).tolist()), int(d.labels[i]))
            for i in range(len(d)) if d.labels[i] >= 0]
    class_totals = [sum(1 for _, y in rows if y == c) for c in range(d.n_classes)]

    def counts(itemset):
        out = [0] * d.n_classes
        for items, y in rows:
            if itemset <= items:
                out[y] += 1
        return out

    singles = sorted({i for items, _ in rows for i in items})
    frequent = [i for i in singles if sum(counts(frozenset([i]))) / n >= minsup]
    if len(frequent) > MAX_FREQUENT_ITEMS:
        raise ValueError(f"oracle limited to {MAX_FREQUENT_ITEMS} frequent items, got {len(frequent)}")

    rules = []
    level = [(i,) for i in frequent]
    while level:
        survivors = []
        for ante in level:
            freqs = counts(frozenset(ante))
            covered = sum(freqs)
            if covered / n < minsup:
                continue
            survivors.append(ante)
            for c in range(d.n_classes):
                hit = freqs[c]
                support = hit / n
                confidence = hit / covered
                if support >= minsup and confidence >= minconf:
                    chi2 = _chi2_shortcut(hit, covered - hit, class_totals[c] - hit,
                                          n - class_totals[c] - (covered - hit))
                    rules.append(CAR(ante, c, support, confidence, chi2))
        known = set(survivors)
        nxt = set()
        for a, b in combinations(survivors, 2):
            if a[:-1] == b[:-1]:
                cand = tuple(sorted(set(a) | set(b)))
                if all(sub in known for sub in combinations(cand, len(cand) - 1)):
                    nxt.add(cand)
        level = sorted(nxt)
    rules.sort(key=lambda r: (len(r.antecedent), r.antecedent, r.consequent))
    return rules
