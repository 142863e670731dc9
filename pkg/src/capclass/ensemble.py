"""Bagged training, model consolidation, database coverage and model files."""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import kernels
from .capgrowth import CAR, ExtractionParams, extract_rules
from .captree import build_captree
from .dataset import Dataset, Vocabulary, sample_partition
from .measures import RuleStats

MODEL_HEADER = "#capmodel v1"
PARAM_KEYS = ("minsup", "minconf", "minchi2", "n_partitions", "ratio", "g", "coverage", "seed")


class ModelFormatError(ValueError):
    pass


def _product(values: Sequence[float]) -> float:
    return math.prod(values)


CONSOLIDATION_FNS = {"max": max, "min": min, "product": _product}


def aggregate(rules: Sequence[CAR], g: str = "max") -> CAR:
    """Collapse rules sharing antecedent and consequent into one.

    Values are reduced in sorted order so the float result does not depend
    on the order the rules arrive in.
    """
    fn = CONSOLIDATION_FNS[g]
    first = rules[0]
    stats = RuleStats(fn(sorted(r.support for r in rules)),
                      fn(sorted(r.confidence for r in rules)),
                      fn(sorted(r.chi2 for r in rules)))
    return first.with_stats(stats)


def consolidate(models: Iterable[Sequence[CAR]], g: str = "max") -> list[CAR]:
    """Merge per-partition rule lists, grouping by (antecedent, consequent).

    Output is sorted by (antecedent, consequent) item ids.
    """
    if g not in CONSOLIDATION_FNS:
        raise ValueError(f"unknown consolidation function {g!r}")
    groups: dict[tuple, list[CAR]] = {}
    for rules in models:
        for r in rules:
            groups.setdefault(r.key, []).append(r)
    return [aggregate(groups[k], g) for k in sorted(groups)]


def rule_sort_key(rule: CAR, dictionary: Vocabulary):
    displays = tuple(sorted(dictionary.token(i) for i in rule.antecedent))
    return (-rule.confidence, -rule.support, len(rule.antecedent), displays, rule.consequent)


def sort_rules(rules: Iterable[CAR], dictionary: Vocabulary) -> list[CAR]:
    """Precedence order: confidence, support (both descending), shorter first, then lexicographic."""
    return sorted(rules, key=lambda r: rule_sort_key(r, dictionary))


def _rules_csr(rules: Sequence[CAR]):
    lengths = np.array([len(r.antecedent) for r in rules], dtype=np.int64)
    offsets = np.zeros(len(rules) + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    items = np.fromiter((i for r in rules for i in r.antecedent), dtype=np.int32,
                        count=int(offsets[-1]))
    labels = np.array([r.consequent for r in rules], dtype=np.int32)
    return items, offsets, labels


def coverage_scan(rules: Sequence[CAR], d: Dataset):
    """(keep mask, number of covered transactions) for a database coverage pass."""
    if not rules:
        return np.zeros(0, dtype=bool), 0
    items, offsets, labels = _rules_csr(rules)
    keep, covered = kernels.coverage_scan(
        items, offsets, labels, np.ascontiguousarray(d.items, dtype=np.int32),
        np.ascontiguousarray(d.offsets, dtype=np.int64),
        np.ascontiguousarray(d.labels, dtype=np.int32))
    return np.asarray(keep, dtype=bool), int(covered)


def coverage_prune(rules: Sequence[CAR], d: Dataset) -> list[CAR]:
    """Keep the rules that correctly classify at least one still-uncovered transaction.

    ``rules`` must already be in precedence order.
    """
    keep, _ = coverage_scan(rules, d)
    return [r for r, k in zip(rules, keep) if k]


@dataclass
class Model:
    rules: list
    priors: np.ndarray
    label_names: Vocabulary
    dictionary: Vocabulary
    params: dict = field(default_factory=dict)

    @property
    def n_classes(self) -> int:
        return len(self.label_names)

    def rule_text(self, rule: CAR) -> str:
        ante = ", ".join(sorted(self.dictionary.token(i) for i in rule.antecedent))
        return (f"{ante} => {self.label_names.token(rule.consequent)} "
                f"(sup={rule.support:.3f}, conf={rule.confidence:.3f}, chi2={rule.chi2:.3f})")

    def describe(self) -> str:
        lines = [f"labels: {' '.join(self.label_names.tokens)}",
                 "priors: " + " ".join(f"{p:.6f}" for p in self.priors),
                 "params: " + " ".join(f"{k}={v}" for k, v in self.params.items())]
        if not self.rules:
            lines.append("(model has no rules; predictions fall back to priors)")
        lines += [self.rule_text(r) for r in self.rules]
        return "\n".join(lines)


def _train_partition(part: Dataset, params: ExtractionParams, coverage: bool) -> list[CAR]:
    if len(part) == 0:
        return []
    rules = extract_rules(build_captree(part, params.minsup), params)
    if coverage:
        rules = coverage_prune(sort_rules(rules, part.dictionary), part)
    return rules


_worker_dataset: Optional[Dataset] = None


def _init_worker(d: Dataset):
    global _worker_dataset
    _worker_dataset = d


def _train_sampled(k: int, ratio: float, seed: int, with_replacement: bool,
                   params: ExtractionParams, coverage: bool) -> list[CAR]:
    part = sample_partition(_worker_dataset, k, ratio, seed, with_replacement)
    return _train_partition(part, params, coverage)


def train_partitions(d: Dataset, n_partitions: int, ratio: float, params: ExtractionParams,
                     seed: int = 0, coverage: bool = False, workers: int = 1,
                     with_replacement: bool = True) -> list[list[CAR]]:
    """Per-partition rule lists, in partition order."""
    if n_partitions < 1:
        raise ValueError("n_partitions must be positive")
    if not 0.0 < ratio <= 1.0:
        raise ValueError("ratio must be in (0, 1]")
    if n_partitions == 1 and ratio == 1.0:
        # a single full-size partition is the training set itself
        return [_train_partition(d, params, coverage)]
    if workers <= 1 or n_partitions == 1:
        _init_worker(d)
        try:
            return [_train_sampled(k, ratio, seed, with_replacement, params, coverage)
                    for k in range(n_partitions)]
        finally:
            _init_worker(None)
    with ProcessPoolExecutor(max_workers=min(workers, n_partitions),
                             initializer=_init_worker, initargs=(d,)) as pool:
        futures = [pool.submit(_train_sampled, k, ratio, seed, with_replacement, params, coverage)
                   for k in range(n_partitions)]
        return [f.result() for f in futures]


def train(d: Dataset, n_partitions: int = 1, ratio: Optional[float] = None,
          params: Optional[ExtractionParams] = None, g: str = "max", seed: int = 0,
          coverage: bool = False, workers: int = 1, with_replacement: bool = True) -> Model:
    """Bagged CAP-growth ensemble consolidated into a single model.

    ``ratio`` defaults to ``1 / n_partitions``. Priors come from ``d``.
    """
    if d.n_classes < 2:
        raise ValueError("training needs at least two classes")
    if int(d.class_counts.sum()) == 0:
        raise ValueError("training dataset has no labeled transactions")
    if g not in CONSOLIDATION_FNS:
        raise ValueError(f"unknown consolidation function {g!r}")
    params = params or ExtractionParams(minsup=0.01)
    if ratio is None:
        ratio = 1.0 / n_partitions
    per_partition = train_partitions(d, n_partitions, ratio, params, seed, coverage,
                                     workers, with_replacement)
    rules = sort_rules(consolidate(per_partition, g), d.dictionary)
    priors = d.class_counts / d.class_counts.sum()
    run_params = {"minsup": params.minsup, "minconf": params.minconf, "minchi2": params.minchi2,
                  "n_partitions": n_partitions, "ratio": ratio, "g": g,
                  "coverage": coverage, "seed": seed}
    return Model(rules, priors, d.label_names, d.dictionary, run_params)


def _format_param(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _check_token(tok: str, what: str):
    if not tok or any(ch in tok for ch in ",\t\n\r"):
        raise ModelFormatError(f"{what} {tok!r} cannot be written to a model file")


def format_model(model: Model) -> str:
    for lab in model.label_names.tokens:
        _check_token(lab, "label")
    lines = [MODEL_HEADER,
             "\t".join(["labels:"] + model.label_names.tokens),
             "\t".join(["priors:"] + [f"{p:.9f}" for p in model.priors]),
             "\t".join(["params:"] + [f"{k}={_format_param(v)}" for k, v in model.params.items()])]
    for r in model.rules:
        items = sorted(model.dictionary.token(i) for i in r.antecedent)
        for tok in items:
            _check_token(tok, "item")
        lines.append("\t".join([",".join(items), model.label_names.token(r.consequent),
                                f"{r.support:.9f}", f"{r.confidence:.9f}", f"{r.chi2:.9f}"]))
    return "\n".join(lines) + "\n"


def write_model(model: Model, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_model(model))


def _parse_param(key: str, value: str):
    if key in ("n_partitions", "seed"):
        return int(value)
    if key == "coverage":
        return value == "true"
    if key == "g":
        return value
    try:
        return float(value)
    except ValueError:
        return value


def parse_model(text: str, source: str = "<model>") -> Model:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()

    def fail(lineno, msg):
        raise ModelFormatError(f"{source}:{lineno}: {msg}")

    if len(lines) < 4 or lines[0] != MODEL_HEADER:
        fail(1, f"expected {MODEL_HEADER!r} header")
    fields = lines[1].split("\t")
    if fields[0] != "labels:" or len(fields) < 3:
        fail(2, "expected 'labels:' with at least two labels")
    label_names = Vocabulary(fields[1:])
    fields = lines[2].split("\t")
    if fields[0] != "priors:" or len(fields) != len(label_names) + 1:
        fail(3, "expected 'priors:' with one value per label")
    try:
        priors = np.array([float(x) for x in fields[1:]])
    except ValueError:
        fail(3, "priors must be numbers")
    fields = lines[3].split("\t")
    if fields[0] != "params:":
        fail(4, "expected 'params:' line")
    params = {}
    for kv in fields[1:]:
        key, sep, value = kv.partition("=")
        if not sep:
            fail(4, f"malformed parameter {kv!r}")
        params[key] = _parse_param(key, value)
    dictionary = Vocabulary()
    rules = []
    for lineno, line in enumerate(lines[4:], 5):
        fields = line.split("\t")
        if len(fields) != 5:
            fail(lineno, "expected 5 tab-separated fields")
        items, label, sup, conf, chi2 = fields
        if not items:
            fail(lineno, "empty antecedent")
        consequent = label_names.lookup(label)
        if consequent is None:
            fail(lineno, f"unknown label {label!r}")
        try:
            stats = (float(sup), float(conf), float(chi2))
        except ValueError:
            fail(lineno, "rule statistics must be numbers")
        ante = tuple(sorted(dictionary.intern(tok) for tok in items.split(",")))
        rules.append(CAR(ante, consequent, *stats))
    return Model(rules, priors, label_names, dictionary, params)


def read_model(path) -> Model:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read(), str(path))
