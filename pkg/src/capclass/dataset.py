"""Transactional datasets: loading, item interning, sampling and rebalancing.

Transactions are stored in CSR layout: a flat ``items`` array of interned
item ids (sorted and duplicate-free within each row), row ``offsets`` and
a ``labels`` array (-1 for unlabeled rows).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np


class DatasetError(ValueError):
    """Raised on malformed input files or invalid dataset operations."""


class Vocabulary:
    """Bijective mapping between token strings and dense integer ids."""

    def __init__(self, tokens: Iterable[str] = ()):
        self._ids: dict[str, int] = {}
        self._tokens: list[str] = []
        for tok in tokens:
            self.intern(tok)

    def intern(self, token: str) -> int:
        idx = self._ids.get(token)
        if idx is None:
            idx = len(self._tokens)
            self._ids[token] = idx
            self._tokens.append(token)
        return idx

    def lookup(self, token: str) -> Optional[int]:
        return self._ids.get(token)

    def token(self, idx: int) -> str:
        return self._tokens[idx]

    @property
    def tokens(self) -> list[str]:
        return list(self._tokens)

    def __len__(self) -> int:
        return len(self._tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._ids

    def __repr__(self) -> str:
        return f"Vocabulary({len(self)} tokens)"


@dataclass(frozen=True)
class Transaction:
    items: frozenset
    label: Optional[int] = None


@dataclass(frozen=True, eq=False)
class Dataset:
    items: np.ndarray
    offsets: np.ndarray
    labels: np.ndarray
    dictionary: Vocabulary
    label_names: Vocabulary
    class_counts: np.ndarray = field(init=False)

    def __post_init__(self):
        labels = self.labels
        counts = np.bincount(labels[labels >= 0], minlength=len(self.label_names))
        object.__setattr__(self, "class_counts", counts.astype(np.int64))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], labels: Sequence[int],
                  dictionary: Vocabulary, label_names: Vocabulary) -> "Dataset":
        cleaned = [sorted(set(r)) for r in rows]
        lengths = np.fromiter((len(r) for r in cleaned), dtype=np.int64, count=len(cleaned))
        offsets = np.zeros(len(cleaned) + 1, dtype=np.int64)
        np.cumsum(lengths, out=offsets[1:])
        flat = np.fromiter((i for r in cleaned for i in r), dtype=np.int32,
                           count=int(offsets[-1]))
        return cls(flat, offsets, np.asarray(labels, dtype=np.int32), dictionary, label_names)

    @property
    def n_classes(self) -> int:
        return len(self.label_names)

    @property
    def n_items(self) -> int:
        return len(self.dictionary)

    @property
    def row_lengths(self) -> np.ndarray:
        return np.diff(self.offsets)

    def row(self, i: int) -> np.ndarray:
        return self.items[self.offsets[i]:self.offsets[i + 1]]

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, i: int) -> Transaction:
        label = int(self.labels[i])
        return Transaction(frozenset(int(x) for x in self.row(i)),
                           None if label < 0 else label)

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def subset(self, indices) -> "Dataset":
        """Rows at ``indices`` (repetition allowed), sharing the vocabularies."""
        idx = np.asarray(indices, dtype=np.int64)
        starts = self.offsets[idx]
        lengths = self.offsets[idx + 1] - starts
        offsets = np.zeros(len(idx) + 1, dtype=np.int64)
        np.cumsum(lengths, out=offsets[1:])
        # gather positions: start of each row repeated, plus position within row
        pos = np.repeat(starts - offsets[:-1], lengths) + np.arange(offsets[-1])
        return Dataset(self.items[pos], offsets, self.labels[idx],
                       self.dictionary, self.label_names)

    def item_tokens(self, i: int) -> list[str]:
        return [self.dictionary.token(int(x)) for x in self.row(i)]


def _intern_line(tokens: list[str], dictionary: Vocabulary, frozen: bool,
                 unknown: Optional[list]) -> list[int]:
    if not frozen:
        return [dictionary.intern(t) for t in tokens]
    ids = [dictionary.lookup(t) for t in tokens]
    if unknown is not None:
        unknown.extend(t for t, i in zip(tokens, ids) if i is None)
    return [i for i in ids if i is not None]


def load_transactions(path, label_position: str = "last", *, labeled: bool = True,
                      dictionary: Optional[Vocabulary] = None,
                      label_names: Optional[Vocabulary] = None,
                      unknown: Optional[list] = None) -> Dataset:
    """Load a whitespace-separated transaction file, one transaction per line.

    When ``dictionary`` is given it is treated as frozen: tokens it does not
    know are dropped (they can never match a rule) and appended to ``unknown``.
    """
    if label_position not in ("first", "last"):
        raise DatasetError(f"label_position must be 'first' or 'last', got {label_position!r}")
    frozen = dictionary is not None
    dictionary = dictionary if dictionary is not None else Vocabulary()
    label_names = label_names if label_names is not None else Vocabulary()
    rows, labels = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            tokens = line.split()
            if not tokens:
                continue
            if labeled:
                if len(tokens) < 2:
                    raise DatasetError(f"{path}:{lineno}: expected items and a label token")
                if label_position == "last":
                    label_tok, tokens = tokens[-1], tokens[:-1]
                else:
                    label_tok, tokens = tokens[0], tokens[1:]
                labels.append(label_names.intern(label_tok))
            else:
                labels.append(-1)
            rows.append(_intern_line(tokens, dictionary, frozen, unknown))
    if not rows:
        raise DatasetError(f"{path}: no transactions found")
    return Dataset.from_rows(rows, labels, dictionary, label_names)


def load_tabular(path, separator: str = ",", label_column: Optional[int] = -1,
                 null_token: str = "", *, dictionary: Optional[Vocabulary] = None,
                 label_names: Optional[Vocabulary] = None,
                 unknown: Optional[list] = None) -> Dataset:
    """Load a delimited categorical table; cell ``v`` in column ``i`` becomes item ``col<i>=v``.

    ``label_column`` may be negative (counted from the end) or None for
    unlabeled input. Cells equal to ``null_token`` produce no item.
    """
    if len(separator) != 1:
        raise DatasetError("separator must be a single character")
    frozen = dictionary is not None
    dictionary = dictionary if dictionary is not None else Vocabulary()
    label_names = label_names if label_names is not None else Vocabulary()
    rows, labels = [], []
    width = None
    label_idx = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            cells = line.split(separator)
            if width is None:
                width = len(cells)
                if label_column is not None:
                    label_idx = label_column + width if label_column < 0 else label_column
                    if not 0 <= label_idx < width:
                        raise DatasetError(f"label column {label_column} out of range for {width} columns")
            elif len(cells) != width:
                raise DatasetError(f"{path}:{lineno}: expected {width} columns, found {len(cells)}")
            tokens = [f"col{i}={v}" for i, v in enumerate(cells)
                      if i != label_idx and v != null_token]
            if label_idx is None:
                labels.append(-1)
            else:
                labels.append(label_names.intern(cells[label_idx]))
            rows.append(_intern_line(tokens, dictionary, frozen, unknown))
    if not rows:
        raise DatasetError(f"{path}: no rows found")
    return Dataset.from_rows(rows, labels, dictionary, label_names)


def sample_size(ratio: float, n: int) -> int:
    """round(ratio * n), half-up."""
    return int(math.floor(ratio * n + 0.5))


def sample_partition(d: Dataset, k: int, ratio: float, seed: int,
                     with_replacement: bool = True) -> Dataset:
    """Partition ``k`` of a bagging draw, using the random stream ``seed + k``."""
    size = sample_size(ratio, len(d))
    rng = np.random.default_rng(seed + k)
    if with_replacement:
        idx = rng.integers(0, len(d), size=size)
    else:
        idx = np.sort(rng.choice(len(d), size=size, replace=False))
    return d.subset(idx)


def partition_sample(d: Dataset, n_partitions: int, ratio: float, seed: int,
                     with_replacement: bool = True) -> list[Dataset]:
    """Draw ``n_partitions`` independent samples of ``round(ratio * |D|)`` rows."""
    if n_partitions < 1:
        raise DatasetError("n_partitions must be positive")
    if not 0.0 < ratio <= 1.0:
        raise DatasetError("ratio must be in (0, 1]")
    if len(d) == 0:
        raise DatasetError("cannot sample an empty dataset")
    return [sample_partition(d, k, ratio, seed, with_replacement) for k in range(n_partitions)]


def balance_subsample(d: Dataset, seed: int) -> Dataset:
    """Downsample every class to the size of the rarest one (without replacement)."""
    counts = d.class_counts
    if len(counts) < 2:
        raise DatasetError("balancing needs at least two classes")
    if (counts == 0).any():
        raise DatasetError("cannot balance: some class has no transactions")
    target = int(counts.min())
    if (counts == target).all():
        return d
    rng = np.random.default_rng(seed)
    keep = []
    for c, count in enumerate(counts):
        rows = np.flatnonzero(d.labels == c)
        if count > target:
            rows = rng.choice(rows, size=target, replace=False)
        keep.append(rows)
    return d.subset(np.sort(np.concatenate(keep)))
