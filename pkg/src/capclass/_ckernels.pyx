# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled hot loops. Signatures mirror capclass._pykernels exactly."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int32_t, int64_t, uint8_t
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector
from cython.operator cimport dereference as deref

cnp.import_array()

BACKEND = "cython"


def build_tree(const int32_t[::1] items, const int64_t[::1] offsets,
               const int32_t[::1] labels, int n_classes, int64_t n_keys):
    cdef Py_ssize_t n_rows = labels.shape[0]
    cdef vector[int32_t] node_item
    cdef vector[int32_t] node_parent
    cdef vector[int64_t] freqs
    cdef unordered_map[int64_t, int32_t] child
    cdef unordered_map[int64_t, int32_t].iterator it
    cdef Py_ssize_t r, j, c
    cdef int32_t node, nxt, item, label
    cdef int64_t key

    node_item.push_back(-1)
    node_parent.push_back(-1)
    for c in range(n_classes):
        freqs.push_back(0)
    for r in range(n_rows):
        if offsets[r + 1] == offsets[r]:
            continue
        label = labels[r]
        node = 0
        freqs[label] += 1
        for j in range(offsets[r], offsets[r + 1]):
            item = items[j]
            key = <int64_t>node * n_keys + item
            it = child.find(key)
            if it == child.end():
                nxt = <int32_t>node_item.size()
                child[key] = nxt
                node_item.push_back(item)
                node_parent.push_back(node)
                for c in range(n_classes):
                    freqs.push_back(0)
            else:
                nxt = deref(it).second
            freqs[<int64_t>nxt * n_classes + label] += 1
            node = nxt

    cdef Py_ssize_t n_nodes = node_item.size()
    out_item = np.empty(n_nodes, dtype=np.int32)
    out_parent = np.empty(n_nodes, dtype=np.int32)
    out_freqs = np.empty((n_nodes, n_classes), dtype=np.int64)
    cdef int32_t[::1] oi = out_item
    cdef int32_t[::1] op = out_parent
    cdef int64_t[:, ::1] of = out_freqs
    for j in range(n_nodes):
        oi[j] = node_item[j]
        op[j] = node_parent[j]
        for c in range(n_classes):
            of[j, c] = freqs[j * n_classes + c]
    return out_item, out_parent, out_freqs


def project(const int32_t[::1] node_item, const int32_t[::1] node_parent,
            const int64_t[:, ::1] freqs, const int64_t[::1] targets):
    cdef Py_ssize_t n = node_item.shape[0]
    cdef Py_ssize_t n_classes = freqs.shape[1]
    acc_arr = np.zeros((n, n_classes), dtype=np.int64)
    keep_arr = np.zeros(n, dtype=np.uint8)
    cdef int64_t[:, ::1] acc = acc_arr
    cdef uint8_t[::1] keep = keep_arr
    cdef Py_ssize_t t, c, i, k
    cdef int32_t p, src
    for t in range(targets.shape[0]):
        src = <int32_t>targets[t]
        p = node_parent[src]
        while p >= 0:
            for c in range(n_classes):
                acc[p, c] += freqs[src, c]
            keep[p] = 1
            p = node_parent[p]
    keep[0] = 1

    cdef Py_ssize_t m = 0
    for i in range(n):
        m += keep[i]
    new_id_arr = np.full(n, -1, dtype=np.int32)
    cdef int32_t[::1] new_id = new_id_arr
    out_item = np.empty(m, dtype=np.int32)
    out_parent = np.empty(m, dtype=np.int32)
    out_freqs = np.empty((m, n_classes), dtype=np.int64)
    cdef int32_t[::1] oi = out_item
    cdef int32_t[::1] op = out_parent
    cdef int64_t[:, ::1] of = out_freqs
    k = 0
    for i in range(n):
        if not keep[i]:
            continue
        new_id[i] = <int32_t>k
        oi[k] = node_item[i]
        op[k] = new_id[node_parent[i]] if node_parent[i] >= 0 else -1
        for c in range(n_classes):
            of[k, c] = acc[i, c]
        k += 1
    return out_item, out_parent, out_freqs


def aggregate_votes(const int32_t[::1] rule_items, const int64_t[::1] rule_offsets,
                    const int32_t[::1] rule_label, const double[::1] rule_value,
                    const int32_t[::1] rec_items, const int64_t[::1] rec_offsets,
                    int64_t n_items, int n_classes, int mode):
    """Per (record, class): count of matching rules and max/min/sum of their values."""
    cdef Py_ssize_t n_rules = rule_label.shape[0]
    cdef Py_ssize_t n_rec = rec_offsets.shape[0] - 1
    cdef Py_ssize_t r, j, q, b, c
    cdef int32_t x
    cdef double v
    cdef bint ok

    # bucket rules by their smallest item
    bucket_start_arr = np.zeros(n_items + 1, dtype=np.int64)
    cdef int64_t[::1] bstart = bucket_start_arr
    for r in range(n_rules):
        bstart[rule_items[rule_offsets[r]] + 1] += 1
    for j in range(n_items):
        bstart[j + 1] += bstart[j]
    bucket_arr = np.empty(n_rules, dtype=np.int64)
    fill_arr = bucket_start_arr[:n_items].copy()
    cdef int64_t[::1] bucket = bucket_arr
    cdef int64_t[::1] fill = fill_arr
    for r in range(n_rules):
        x = rule_items[rule_offsets[r]]
        bucket[fill[x]] = r
        fill[x] += 1

    stamp_arr = np.zeros(n_items, dtype=np.int64)
    cdef int64_t[::1] stamp = stamp_arr
    agg_arr = np.zeros((n_rec, n_classes), dtype=np.float64)
    cnt_arr = np.zeros((n_rec, n_classes), dtype=np.int64)
    cdef double[:, ::1] agg = agg_arr
    cdef int64_t[:, ::1] cnt = cnt_arr

    for q in range(n_rec):
        for j in range(rec_offsets[q], rec_offsets[q + 1]):
            stamp[rec_items[j]] = q + 1
        for j in range(rec_offsets[q], rec_offsets[q + 1]):
            x = rec_items[j]
            for b in range(bstart[x], bstart[x + 1]):
                r = bucket[b]
                ok = True
                for c in range(rule_offsets[r] + 1, rule_offsets[r + 1]):
                    if stamp[rule_items[c]] != q + 1:
                        ok = False
                        break
                if not ok:
                    continue
                c = rule_label[r]
                v = rule_value[r]
                if cnt[q, c] == 0:
                    agg[q, c] = v
                elif mode == 0:
                    if v > agg[q, c]:
                        agg[q, c] = v
                elif mode == 1:
                    if v < agg[q, c]:
                        agg[q, c] = v
                else:
                    agg[q, c] += v
                cnt[q, c] += 1
    return agg_arr, cnt_arr


def coverage_scan(const int32_t[::1] rule_items, const int64_t[::1] rule_offsets,
                  const int32_t[::1] rule_label, const int32_t[::1] tx_items,
                  const int64_t[::1] tx_offsets, const int32_t[::1] tx_labels):
    """Database coverage: keep a rule iff it correctly classifies an uncovered transaction."""
    cdef Py_ssize_t n_rules = rule_label.shape[0]
    cdef Py_ssize_t n_tx = tx_labels.shape[0]
    keep_arr = np.zeros(n_rules, dtype=np.uint8)
    covered_arr = np.zeros(n_tx, dtype=np.uint8)
    cdef uint8_t[::1] keep = keep_arr
    cdef uint8_t[::1] covered = covered_arr
    cdef Py_ssize_t r, t, i, j, i_end, j_end
    cdef Py_ssize_t remaining = n_tx
    cdef bint hit
    for r in range(n_rules):
        if remaining == 0:
            break
        hit = False
        for t in range(n_tx):
            if covered[t] or tx_labels[t] != rule_label[r]:
                continue
            i = rule_offsets[r]
            i_end = rule_offsets[r + 1]
            j = tx_offsets[t]
            j_end = tx_offsets[t + 1]
            while i < i_end and j < j_end:
                if rule_items[i] == tx_items[j]:
                    i += 1
                    j += 1
                elif rule_items[i] > tx_items[j]:
                    j += 1
                else:
                    break
            if i == i_end:
                covered[t] = 1
                remaining -= 1
                hit = True
        if hit:
            keep[r] = 1
    return keep_arr.astype(bool), n_tx - remaining


def conditional_counts(const int32_t[::1] node_item, const int32_t[::1] node_parent,
                       const int64_t[:, ::1] freqs, const int64_t[::1] targets,
                       const int32_t[::1] items):
    """Root counts after projecting on the targets' item, then on each of ``items``.

    Works on the sparse conditional tree (ancestors of the current targets
    only), so each step costs the summed path length rather than the tree size.
    """
    cdef Py_ssize_t n_classes = freqs.shape[1]
    cdef vector[int32_t] cur_nodes
    cdef vector[int64_t] cur_w
    cdef vector[int32_t] acc_nodes
    cdef vector[int64_t] acc_w
    slot_arr = np.full(node_item.shape[0], -1, dtype=np.int64)
    cdef int64_t[::1] slot = slot_arr
    cdef Py_ssize_t t, c, k, step
    cdef int64_t s
    cdef int32_t p
    out_arr = np.zeros(n_classes, dtype=np.int64)
    cdef int64_t[::1] out = out_arr

    for t in range(targets.shape[0]):
        cur_nodes.push_back(<int32_t>targets[t])
        for c in range(n_classes):
            cur_w.push_back(freqs[targets[t], c])
    for step in range(items.shape[0] + 1):
        if cur_nodes.size() == 0:
            return out_arr
        for k in range(<Py_ssize_t>acc_nodes.size()):
            slot[acc_nodes[k]] = -1
        acc_nodes.clear()
        acc_w.clear()
        for k in range(<Py_ssize_t>cur_nodes.size()):
            p = node_parent[cur_nodes[k]]
            while p >= 0:
                s = slot[p]
                if s < 0:
                    s = <int64_t>acc_nodes.size()
                    slot[p] = s
                    acc_nodes.push_back(p)
                    for c in range(n_classes):
                        acc_w.push_back(0)
                for c in range(n_classes):
                    acc_w[s * n_classes + c] += cur_w[k * n_classes + c]
                p = node_parent[p]
        cur_nodes.clear()
        cur_w.clear()
        if step == items.shape[0]:
            s = slot[0]
            if s >= 0:
                for c in range(n_classes):
                    out[c] = acc_w[s * n_classes + c]
            return out_arr
        for k in range(<Py_ssize_t>acc_nodes.size()):
            if node_item[acc_nodes[k]] == items[step]:
                cur_nodes.push_back(acc_nodes[k])
                for c in range(n_classes):
                    cur_w.push_back(acc_w[k * n_classes + c])
    return out_arr
