"""Synthetic categorical datasets built directly in CSR form."""
from __future__ import annotations

import numpy as np

from .dataset import Dataset, Vocabulary


def from_matrix(values: np.ndarray, labels: np.ndarray, label_names=("0", "1"),
                null: int = -1) -> Dataset:
    """Dataset from an (n_rows, n_features) matrix of small non-negative codes.

    Cell ``v`` in column ``j`` becomes item ``f<j>=<v>``; cells equal to
    ``null`` produce no item.
    """
    values = np.asarray(values, dtype=np.int64)
    n_rows, n_features = values.shape
    n_values = int(values.max(initial=0)) + 1
    vocab = Vocabulary(f"f{j}={v}" for j in range(n_features) for v in range(n_values))
    codes = values + np.arange(n_features) * n_values
    present = values != null
    lengths = present.sum(axis=1)
    offsets = np.zeros(n_rows + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    items = codes[present].astype(np.int32)  # row-major, ascending within a row
    return Dataset(items, offsets, np.asarray(labels, dtype=np.int32), vocab,
                   Vocabulary(label_names))


def planted(n_rows: int, noise: float = 0.1, n_noise_features: int = 5, n_values: int = 10,
            seed: int = 0) -> Dataset:
    """Binary labels planted on three predictive items.

    Features f0..f2 are binary; the label is 1 when at least two of the items
    ``f0=1, f1=1, f2=1`` are present. The remaining features are uniform noise.
    With probability ``noise`` a row's label is redrawn uniformly at random.
    """
    rng = np.random.default_rng(seed)
    signal = rng.integers(0, 2, size=(n_rows, 3))
    rest = rng.integers(0, n_values, size=(n_rows, n_noise_features))
    labels = (signal.sum(axis=1) >= 2).astype(np.int32)
    flip = rng.random(n_rows) < noise
    labels[flip] = rng.integers(0, 2, size=int(flip.sum()))
    return from_matrix(np.hstack([signal, rest]), labels)


def random_categorical(n_rows: int, n_features: int = 6, n_values: int = 8, signal: float = 0.3,
                       n_classes: int = 2, seed: int = 0) -> Dataset:
    """Categorical rows whose label leans on the first two features.

    Each row takes the label implied by ``(f0 + f1) % n_classes`` with
    probability ``signal`` and a uniformly random one otherwise.
    """
    rng = np.random.default_rng(seed)
    values = rng.integers(0, n_values, size=(n_rows, n_features))
    implied = (values[:, 0] + values[:, 1]) % n_classes
    labels = np.where(rng.random(n_rows) < signal, implied,
                      rng.integers(0, n_classes, size=n_rows)).astype(np.int32)
    return from_matrix(values, labels, label_names=[str(c) for c in range(n_classes)])


def shuffled_labels(d: Dataset, seed: int) -> Dataset:
    labels = np.random.default_rng(seed).permutation(d.labels)
    return Dataset(d.items, d.offsets, labels, d.dictionary, d.label_names)


def random_small(rng: np.random.Generator, max_items: int = 8, max_rows: int = 60,
                 n_classes: int = 2) -> Dataset:
    """Tiny random transaction database for oracle comparisons."""
    n_items = int(rng.integers(2, max_items + 1))
    n_rows = int(rng.integers(2, max_rows + 1))
    density = rng.uniform(0.2, 0.8)
    rows = [np.flatnonzero(rng.random(n_items) < density).tolist() for _ in range(n_rows)]
    labels = rng.integers(0, n_classes, size=n_rows)
    vocab = Vocabulary(f"i{k}" for k in range(n_items))
    return Dataset.from_rows(rows, labels, vocab, Vocabulary(str(c) for c in range(n_classes)))
