"""CAP-tree: a prefix tree of transactions with per-class counts at every node.

Frequent items are ranked by decreasing information gain (items with no
positive gain are dropped), each transaction is filtered and reordered by
that ranking, and inserted as a root path. Nodes are stored in flat arrays;
node 0 is the root and every node id is larger than its parent's id.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import kernels
from .dataset import Dataset, Vocabulary
from .measures import ig_exact, min_count


class ProjectionError(KeyError):
    pass


@dataclass(frozen=True)
class RankedItem:
    item: int
    freqs: np.ndarray
    ig: float


@dataclass(frozen=True)
class HeaderEntry:
    item: int
    freqs: np.ndarray
    nodes: np.ndarray  # ids of the tree nodes carrying ``item``, ascending


class CAPNode:
    """Read-only view of one tree node."""

    __slots__ = ("tree", "id")

    def __init__(self, tree: "CAPTree", node_id: int):
        self.tree = tree
        self.id = node_id

    @property
    def item(self) -> Optional[int]:
        it = int(self.tree.node_item[self.id])
        return None if it < 0 else it

    @property
    def freqs(self) -> np.ndarray:
        return self.tree.node_freqs[self.id]

    @property
    def parent(self) -> Optional["CAPNode"]:
        p = int(self.tree.node_parent[self.id])
        return None if p < 0 else CAPNode(self.tree, p)

    @property
    def children(self) -> list["CAPNode"]:
        return [CAPNode(self.tree, int(c)) for c in self.tree.children_of(self.id)]

    def path(self) -> list[int]:
        """Items from the root down to this node."""
        return self.tree.path_items(self.id)

    def __repr__(self) -> str:
        return f"CAPNode(item={self.item}, freqs={self.freqs.tolist()})"


class CAPTree:
    def __init__(self, node_item: np.ndarray, node_parent: np.ndarray, node_freqs: np.ndarray,
                 rank_of: np.ndarray, total_count: int, dataset_freqs: np.ndarray,
                 dictionary: Optional[Vocabulary] = None):
        self.node_item = node_item
        self.node_parent = node_parent
        self.node_freqs = node_freqs
        self.rank_of = rank_of
        self.total_count = int(total_count)
        self.dataset_freqs = np.asarray(dataset_freqs, dtype=np.int64)
        self.dictionary = dictionary
        self._children = None
        self._header = None

    def _index_children(self):
        n = len(self.node_item)
        if n > 1:
            ranks = self.rank_of[self.node_item[1:]]
            order = np.lexsort((ranks, self.node_parent[1:])) + 1
            counts = np.bincount(self.node_parent[1:], minlength=n)
        else:
            order = np.zeros(0, dtype=np.int64)
            counts = np.zeros(n, dtype=np.int64)
        start = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=start[1:])
        self._children = (order.astype(np.int64), start)

    def _index_header(self):
        header = []
        if len(self.node_item) > 1:
            ids = np.argsort(self.node_item[1:], kind="stable") + 1
            bounds = np.flatnonzero(np.diff(self.node_item[ids])) + 1
            for grp in np.split(ids, bounds):
                item = int(self.node_item[grp[0]])
                header.append(HeaderEntry(item, self.node_freqs[grp].sum(axis=0), grp))
        header.sort(key=lambda e: self.rank_of[e.item])
        self._header = {e.item: e for e in header}

    @property
    def header(self) -> list[HeaderEntry]:
        """Header table entries in rank order."""
        if self._header is None:
            self._index_header()
        return list(self._header.values())

    @property
    def n_classes(self) -> int:
        return self.node_freqs.shape[1]

    @property
    def n_nodes(self) -> int:
        return len(self.node_item)

    @property
    def root(self) -> CAPNode:
        return CAPNode(self, 0)

    @property
    def order(self) -> dict[int, int]:
        return {int(i): int(r) for i, r in enumerate(self.rank_of) if r >= 0}

    def node(self, node_id: int) -> CAPNode:
        return CAPNode(self, node_id)

    def children_of(self, node_id: int) -> np.ndarray:
        if self._children is None:
            self._index_children()
        ids, start = self._children
        return ids[start[node_id]:start[node_id + 1]]

    def chain(self, item: int) -> np.ndarray:
        """Ids of the nodes carrying ``item`` (empty when absent)."""
        if self._header is None:
            self._index_header()
        entry = self._header.get(item)
        return entry.nodes if entry is not None else np.zeros(0, dtype=np.int64)

    def has_item(self, item: int) -> bool:
        return len(self.chain(item)) > 0

    def path_items(self, node_id: int) -> list[int]:
        items = []
        p = node_id
        while p > 0:
            items.append(int(self.node_item[p]))
            p = int(self.node_parent[p])
        items.reverse()
        return items

    def project(self, item: int) -> "CAPTree":
        return project(self, item)

    def display(self, item: int) -> str:
        return self.dictionary.token(item) if self.dictionary is not None else str(item)

    def dump(self) -> str:
        """Indented ``item [c0,c1,...]`` listing, children in rank order."""
        lines = []
        stack = [(0, 0)]
        while stack:
            node, depth = stack.pop()
            label = "null" if node == 0 else self.display(int(self.node_item[node]))
            counts = ",".join(str(int(c)) for c in self.node_freqs[node])
            lines.append(f"{'  ' * depth}{label} [{counts}]")
            for child in reversed(self.children_of(node)):
                stack.append((int(child), depth + 1))
        return "\n".join(lines)

    def __repr__(self) -> str:
        return f"CAPTree({self.n_nodes} nodes, {len(self.header)} items)"


def item_class_counts(d: Dataset) -> np.ndarray:
    """(n_items, n_classes) count of labeled transactions containing each item."""
    C = d.n_classes
    row_labels = np.repeat(d.labels, d.row_lengths)
    mask = row_labels >= 0
    flat = d.items[mask].astype(np.int64) * C + row_labels[mask]
    return np.bincount(flat, minlength=d.n_items * C).reshape(d.n_items, C)


def build_caplist(d: Dataset, minsup: float) -> list[RankedItem]:
    """Frequent items with strictly positive information gain, by decreasing gain.

    Ties are broken by item display string, then by item id.
    """
    labeled = int(d.class_counts.sum())
    if labeled == 0:
        raise ValueError("dataset has no labeled transactions")
    counts = item_class_counts(d)
    threshold = min_count(minsup, labeled)
    dataset_freqs = d.class_counts
    ranked = []
    for item in np.flatnonzero(counts.sum(axis=1) >= max(threshold, 1)):
        freqs = counts[item]
        gain = ig_exact(freqs, dataset_freqs)
        if gain > 0:
            ranked.append((-gain, d.dictionary.token(int(item)), int(item), freqs))
    ranked.sort(key=lambda r: r[:3])
    return [RankedItem(item, freqs, float(-neg)) for neg, _, item, freqs in ranked]


def build_captree(d: Dataset, minsup: float,
                  caplist: Optional[list[RankedItem]] = None) -> CAPTree:
    if caplist is None:
        caplist = build_caplist(d, minsup)
    rank_of = np.full(max(d.n_items, 1), -1, dtype=np.int32)
    for r, entry in enumerate(caplist):
        rank_of[entry.item] = r

    labeled_rows = np.flatnonzero(d.labels >= 0)
    if len(labeled_rows) != len(d):
        d = d.subset(labeled_rows)
    lengths = d.row_lengths
    row_ids = np.repeat(np.arange(len(d)), lengths)
    ranks = rank_of[d.items]
    keep = ranks >= 0
    row_ids, ranks, items = row_ids[keep], ranks[keep], d.items[keep]
    order = np.lexsort((ranks, row_ids))
    items = np.ascontiguousarray(items[order], dtype=np.int32)
    offsets = np.zeros(len(d) + 1, dtype=np.int64)
    np.cumsum(np.bincount(row_ids, minlength=len(d)), out=offsets[1:])

    node_item, node_parent, node_freqs = kernels.build_tree(
        items, offsets, np.ascontiguousarray(d.labels, dtype=np.int32),
        d.n_classes, max(d.n_items, 1))
    return CAPTree(node_item, node_parent, node_freqs, rank_of,
                   len(d), d.class_counts.copy(), d.dictionary)


def project(t: CAPTree, item: int) -> CAPTree:
    """Conditional tree of ``t`` on ``item``.

    Keeps the root paths above every node carrying ``item``; each kept node's
    counts become the summed counts of the ``item`` nodes below it, so the
    new root holds the class counts of all transactions containing ``item``
    (plus whatever ``t`` was already conditioned on).
    """
    targets = t.chain(item)
    if len(targets) == 0:
        raise ProjectionError(item)
    node_item, node_parent, node_freqs = kernels.project(
        t.node_item, t.node_parent, t.node_freqs, np.asarray(targets, dtype=np.int64))
    return CAPTree(node_item, node_parent, node_freqs, t.rank_of,
                   t.total_count, t.dataset_freqs, t.dictionary)


def itemset_freqs(t: CAPTree, items: Iterable[int]) -> np.ndarray:
    """Class counts of transactions containing every item, by sequential projection.

    Items are projected deepest-rank first on sparse conditional trees
    (``kernels.conditional_counts``), which yields the same root counts as
    chained ``project`` calls. Items outside the tree's ranking raise
    ProjectionError; an itemset that never co-occurs yields zeros.
    """
    items = list(items)
    if not items:
        return t.dataset_freqs.copy()
    for it in items:
        if it >= len(t.rank_of) or t.rank_of[it] < 0:
            raise ProjectionError(it)
    order = sorted(items, key=lambda i: -t.rank_of[i])
    targets = t.chain(order[0])
    if len(targets) == 0:
        return np.zeros(t.n_classes, dtype=np.int64)
    return kernels.conditional_counts(t.node_item, t.node_parent, t.node_freqs,
                                      np.asarray(targets, dtype=np.int64),
                                      np.asarray(order[1:], dtype=np.int32))
