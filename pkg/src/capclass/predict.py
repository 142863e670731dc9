"""Multi-rule voting: per-label scores from every matching rule.

For each label with matching rules the score is f (max, min or mean) of a
rule measure m (confidence or 1 - support). Labels without a match share
prod(1 - p_j) over the matched labels equally. With no match at all the
class priors are used. The vector is finally normalized to sum to one.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import kernels
from .capgrowth import CAR
from .dataset import Dataset, Transaction
from .ensemble import Model, _rules_csr

AGGREGATES = ("max", "min", "mean")
MEASURES = ("confidence", "one_minus_support")


@dataclass(frozen=True)
class VotingParams:
    f: str = "max"
    m: str = "confidence"

    def __post_init__(self):
        if self.f not in AGGREGATES:
            raise ValueError(f"f must be one of {AGGREGATES}, got {self.f!r}")
        if self.m not in MEASURES:
            raise ValueError(f"m must be one of {MEASURES}, got {self.m!r}")


def measure(rule: CAR, m: str) -> float:
    return rule.confidence if m == "confidence" else 1.0 - rule.support


def match_rules(model: Model, record: Transaction) -> list[list[CAR]]:
    """Matching rules grouped by consequent (index = label id), in model order."""
    out: list[list[CAR]] = [[] for _ in range(model.n_classes)]
    items = record.items
    for r in model.rules:
        if items.issuperset(r.antecedent):
            out[r.consequent].append(r)
    return out


def _finish(raw: np.ndarray, priors: np.ndarray) -> np.ndarray:
    total = raw.sum()
    if total <= 0:
        return np.array(priors, dtype=np.float64)
    return raw / total


def score(model: Model, record: Transaction, v: VotingParams = VotingParams()) -> np.ndarray:
    matches = match_rules(model, record)
    if not any(matches):
        return np.array(model.priors, dtype=np.float64)
    raw = np.zeros(model.n_classes)
    unmatched = []
    p_rest = 1.0
    for label, rules in enumerate(matches):
        if not rules:
            unmatched.append(label)
            continue
        values = [measure(r, v.m) for r in rules]
        if v.f == "max":
            raw[label] = max(values)
        elif v.f == "min":
            raw[label] = min(values)
        else:
            raw[label] = sum(values) / len(values)
        p_rest *= 1.0 - raw[label]
    for label in unmatched:
        raw[label] = p_rest / len(unmatched)
    return _finish(raw, model.priors)


def predict_label(scores: np.ndarray, priors: np.ndarray) -> int:
    """argmax; ties go to the higher prior, then the lower label id."""
    best = scores.max()
    tied = np.flatnonzero(scores == best)
    return int(min(tied, key=lambda c: (-priors[c], c)))


def predict(model: Model, record: Transaction, v: VotingParams = VotingParams()) -> int:
    return predict_label(score(model, record, v), model.priors)


def _as_dataset(model: Model, records) -> Dataset:
    if isinstance(records, Dataset):
        return records
    rows = [sorted(r.items) for r in records]
    labels = [-1 if r.label is None else r.label for r in records]
    return Dataset.from_rows(rows, labels, model.dictionary, model.label_names)


def _score_csr(model: Model, items: np.ndarray, offsets: np.ndarray, v: VotingParams) -> np.ndarray:
    C = model.n_classes
    n_rec = len(offsets) - 1
    priors = np.asarray(model.priors, dtype=np.float64)
    if not model.rules or n_rec == 0:
        return np.tile(priors, (n_rec, 1))
    r_items, r_offsets, r_labels = _rules_csr(model.rules)
    values = np.array([measure(r, v.m) for r in model.rules], dtype=np.float64)
    n_items = int(max(r_items.max(initial=-1), items.max(initial=-1))) + 1
    agg, cnt = kernels.aggregate_votes(r_items, r_offsets, r_labels, values,
                                       np.ascontiguousarray(items, dtype=np.int32),
                                       np.ascontiguousarray(offsets, dtype=np.int64),
                                       n_items, C, kernels.AGG_MODES[v.f])
    matched = cnt > 0
    if v.f == "mean":
        agg = np.divide(agg, cnt, out=np.zeros_like(agg), where=matched)
    n_unmatched = C - matched.sum(axis=1)
    p_rest = np.where(matched, 1.0 - agg, 1.0).prod(axis=1)
    share = np.divide(p_rest, n_unmatched, out=np.zeros_like(p_rest), where=n_unmatched > 0)
    raw = np.where(matched, agg, share[:, None])
    total = raw.sum(axis=1)
    fallback = (~matched.any(axis=1)) | (total <= 0)
    out = np.divide(raw, total[:, None], out=np.zeros_like(raw), where=~fallback[:, None])
    out[fallback] = priors
    return out


def _score_chunk(model: Model, items, offsets, v: VotingParams) -> np.ndarray:
    base = offsets[0]
    return _score_csr(model, items[base:offsets[-1]], offsets - base, v)


def score_batch(model: Model, records: Union[Dataset, Sequence[Transaction]],
                v: VotingParams = VotingParams(), workers: int = 1) -> np.ndarray:
    """(n_records, n_classes) score matrix; rows follow the input order."""
    d = _as_dataset(model, records)
    n = len(d)
    if workers <= 1 or n < 2 * workers:
        return _score_csr(model, d.items, d.offsets, v)
    bounds = np.linspace(0, n, workers + 1).astype(np.int64)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_score_chunk, model, d.items, d.offsets[lo:hi + 1], v)
                   for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
        return np.vstack([f.result() for f in futures])


def predict_batch(model: Model, scores: np.ndarray) -> np.ndarray:
    priors = np.asarray(model.priors)
    return np.array([predict_label(s, priors) for s in scores], dtype=np.int64)


def format_scores(model: Model, scores: np.ndarray) -> str:
    header = ["record_index", "pred"] + [f"score_{lab}" for lab in model.label_names.tokens]
    lines = ["\t".join(header)]
    for i, (s, pred) in enumerate(zip(scores, predict_batch(model, scores))):
        lines.append("\t".join([str(i), model.label_names.token(int(pred))]
                               + [f"{x:.6f}" for x in s]))
    return "\n".join(lines) + "\n"


def write_scores(model: Model, scores: np.ndarray, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_scores(model, scores))
