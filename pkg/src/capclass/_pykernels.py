"""Pure-Python implementations of the hot loops (fallback for _ckernels)."""
import numpy as np

BACKEND = "python"


def build_tree(items, offsets, labels, n_classes, n_keys):
    node_item = [-1]
    node_parent = [-1]
    freqs = [[0] * n_classes]
    child = {}
    items = items.tolist()
    offsets = offsets.tolist()
    for r, label in enumerate(labels.tolist()):
        lo, hi = offsets[r], offsets[r + 1]
        if lo == hi:
            continue
        node = 0
        freqs[0][label] += 1
        for item in items[lo:hi]:
            nxt = child.get((node, item))
            if nxt is None:
                nxt = len(node_item)
                child[(node, item)] = nxt
                node_item.append(item)
                node_parent.append(node)
                freqs.append([0] * n_classes)
            freqs[nxt][label] += 1
            node = nxt
    return (np.array(node_item, dtype=np.int32), np.array(node_parent, dtype=np.int32),
            np.array(freqs, dtype=np.int64).reshape(len(node_item), n_classes))


def project(node_item, node_parent, freqs, targets):
    n, n_classes = freqs.shape
    parent = node_parent.tolist()
    acc = np.zeros((n, n_classes), dtype=np.int64)
    keep = np.zeros(n, dtype=bool)
    for src in targets.tolist():
        p = parent[src]
        while p >= 0:
            acc[p] += freqs[src]
            keep[p] = True
            p = parent[p]
    keep[0] = True
    kept = np.flatnonzero(keep)
    new_id = np.full(n, -1, dtype=np.int32)
    new_id[kept] = np.arange(len(kept), dtype=np.int32)
    old_parent = node_parent[kept]
    new_parent = np.where(old_parent >= 0, new_id[np.maximum(old_parent, 0)], -1).astype(np.int32)
    return node_item[kept].copy(), new_parent, acc[kept]


def aggregate_votes(rule_items, rule_offsets, rule_label, rule_value,
                    rec_items, rec_offsets, n_items, n_classes, mode):
    rules = [(set(rule_items[rule_offsets[r]:rule_offsets[r + 1]].tolist()),
              int(rule_label[r]), float(rule_value[r])) for r in range(len(rule_label))]
    n_rec = len(rec_offsets) - 1
    agg = np.zeros((n_rec, n_classes), dtype=np.float64)
    cnt = np.zeros((n_rec, n_classes), dtype=np.int64)
    for q in range(n_rec):
        record = set(rec_items[rec_offsets[q]:rec_offsets[q + 1]].tolist())
        for ante, c, v in rules:
            if not ante <= record:
                continue
            if cnt[q, c] == 0:
                agg[q, c] = v
            elif mode == 0:
                agg[q, c] = max(agg[q, c], v)
            elif mode == 1:
                agg[q, c] = min(agg[q, c], v)
            else:
                agg[q, c] += v
            cnt[q, c] += 1
    return agg, cnt


def coverage_scan(rule_items, rule_offsets, rule_label, tx_items, tx_offsets, tx_labels):
    n_rules, n_tx = len(rule_label), len(tx_labels)
    tx = [set(tx_items[tx_offsets[t]:tx_offsets[t + 1]].tolist()) for t in range(n_tx)]
    tx_labels = tx_labels.tolist()
    covered = [False] * n_tx
    keep = np.zeros(n_rules, dtype=bool)
    remaining = n_tx
    for r in range(n_rules):
        if remaining == 0:
            break
        ante = set(rule_items[rule_offsets[r]:rule_offsets[r + 1]].tolist())
        label = int(rule_label[r])
        for t in range(n_tx):
            if not covered[t] and tx_labels[t] == label and ante <= tx[t]:
                covered[t] = True
                remaining -= 1
                keep[r] = True
    return keep, n_tx - remaining


def conditional_counts(node_item, node_parent, freqs, targets, items):
    parent = node_parent.tolist()
    item_of = node_item.tolist()
    cur = {int(t): freqs[t].astype(np.int64) for t in targets.tolist()}
    steps = items.tolist()
    for step in range(len(steps) + 1):
        if not cur:
            break
        acc = {}
        for node, w in cur.items():
            p = parent[node]
            while p >= 0:
                if p in acc:
                    acc[p] = acc[p] + w
                else:
                    acc[p] = w.copy()
                p = parent[p]
        if step == len(steps):
            return acc.get(0, np.zeros(freqs.shape[1], dtype=np.int64))
        cur = {n: w for n, w in acc.items() if item_of[n] == steps[step]}
    return np.zeros(freqs.shape[1], dtype=np.int64)
