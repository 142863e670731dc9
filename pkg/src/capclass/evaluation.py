"""AUROC, accuracy and k-fold cross-validation."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.stats import rankdata

from .capgrowth import ExtractionParams
from .dataset import Dataset, balance_subsample
from .ensemble import train
from .predict import VotingParams, predict_batch, score_batch


def auroc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Area under the ROC curve as the Mann-Whitney statistic (midranks for ties)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape:
        raise ValueError("scores and labels must have equal length")
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUROC needs both classes present")
    ranks = rankdata(scores)
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def accuracy(predicted: Sequence[int], labels: Sequence[int]) -> float:
    predicted = np.asarray(predicted)
    labels = np.asarray(labels)
    return float((predicted == labels).mean()) if len(labels) else 0.0


def kfold(d: Dataset, k: int, seed: int) -> list[tuple[Dataset, Dataset]]:
    """Random, non-stratified k-fold splits as (train, test) pairs."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > len(d):
        raise ValueError(f"k={k} exceeds dataset size {len(d)}")
    perm = np.random.default_rng(seed).permutation(len(d))
    folds = np.array_split(perm, k)
    splits = []
    for i, test_idx in enumerate(folds):
        train_idx = np.concatenate([f for j, f in enumerate(folds) if j != i])
        splits.append((d.subset(np.sort(train_idx)), d.subset(np.sort(test_idx))))
    return splits


@dataclass
class TrainConfig:
    params: ExtractionParams = field(default_factory=lambda: ExtractionParams(minsup=0.01))
    n_partitions: int = 10
    ratio: Optional[float] = None
    g: str = "max"
    coverage: bool = False
    with_replacement: bool = True
    workers: int = 1


@dataclass
class FoldResult:
    auroc: float
    accuracy: float
    n_test: int
    n_rules: int


@dataclass
class EvalResult:
    auroc: float
    accuracy: float
    n_test: int
    folds: list = field(default_factory=list)

    def table(self) -> str:
        rows = [("fold", "auroc", "accuracy", "n_test", "rules")]
        for i, f in enumerate(self.folds):
            rows.append((str(i), f"{f.auroc:.4f}", f"{f.accuracy:.4f}", str(f.n_test), str(f.n_rules)))
        rows.append(("mean", f"{self.auroc:.4f}", f"{self.accuracy:.4f}", str(self.n_test), ""))
        widths = [max(len(r[c]) for r in rows) for c in range(5)]
        return "\n".join("  ".join(cell.rjust(w) for cell, w in zip(r, widths)) for r in rows)

    def delimited(self, sep: str = "\t") -> str:
        lines = [sep.join(["fold", "auroc", "accuracy", "n_test", "rules"])]
        for i, f in enumerate(self.folds):
            lines.append(sep.join([str(i), repr(f.auroc), repr(f.accuracy), str(f.n_test), str(f.n_rules)]))
        lines.append(sep.join(["mean", repr(self.auroc), repr(self.accuracy), str(self.n_test), ""]))
        return "\n".join(lines)


def evaluate_split(train_d: Dataset, test_d: Dataset, cfg: TrainConfig, v: VotingParams,
                   seed: int, balance: bool = False, positive: int = 1) -> FoldResult:
    """Train on ``train_d`` (optionally balanced) and score the untouched ``test_d``."""
    if balance:
        train_d = balance_subsample(train_d, seed)
    model = train(train_d, n_partitions=cfg.n_partitions, ratio=cfg.ratio, params=cfg.params,
                  g=cfg.g, seed=seed, coverage=cfg.coverage, workers=cfg.workers,
                  with_replacement=cfg.with_replacement)
    scores = score_batch(model, test_d, v, workers=cfg.workers)
    labels = test_d.labels
    auc = auroc(scores[:, positive], (labels == positive).astype(int))
    acc = accuracy(predict_batch(model, scores), labels)
    return FoldResult(auc, acc, len(test_d), len(model.rules))


def crossval(d: Dataset, k: int, cfg: TrainConfig, v: VotingParams = VotingParams(),
             seed: int = 0, balance: bool = False, positive: int = 1) -> EvalResult:
    """k-fold cross-validation; balancing, when requested, touches only training splits."""
    if d.n_classes != 2:
        raise ValueError("cross-validated AUROC needs a binary dataset")
    folds = [evaluate_split(tr, te, cfg, v, seed + i, balance, positive)
             for i, (tr, te) in enumerate(kfold(d, k, seed))]
    return EvalResult(float(np.mean([f.auroc for f in folds])),
                      float(np.mean([f.accuracy for f in folds])),
                      sum(f.n_test for f in folds), folds)


def holdout(d: Dataset, test_fraction: float, cfg: TrainConfig, v: VotingParams = VotingParams(),
            seed: int = 0, balance: bool = False, positive: int = 1) -> EvalResult:
    """Single random train/test split with ``test_fraction`` of the rows held out."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test fraction must be in (0, 1)")
    perm = np.random.default_rng(seed).permutation(len(d))
    n_test = max(1, int(round(test_fraction * len(d))))
    test_d, train_d = d.subset(np.sort(perm[:n_test])), d.subset(np.sort(perm[n_test:]))
    fold = evaluate_split(train_d, test_d, cfg, v, seed, balance, positive)
    return EvalResult(fold.auroc, fold.accuracy, fold.n_test, [fold])
