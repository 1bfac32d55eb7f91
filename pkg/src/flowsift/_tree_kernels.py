"""Numba kernels for CART construction and ensemble scoring.

Exactness contract: split selection maximizes
``(pl^2+ql^2)/nl + (pr^2+qr^2)/nr`` over candidate (feature, midpoint)
pairs, which is an order-preserving transform of minimizing weighted Gini.
All inputs to that expression are integer counts, exactly representable in
float64, so the comparison (and therefore the chosen split) is identical
between the presorted fast path used here and a naive sort-at-node search.
Ties keep the first candidate visited: features ascending, thresholds
ascending within a feature.

Trees are grown depth-first over per-feature presorted index segments that
are re-partitioned at every split, so no per-node sorting is needed. The
in-kernel randomness (bootstrap draws, per-node feature subsets) is the
same SplitMix64 counter stream as :mod:`flowsift.rng`; bootstrap draws use
the identical rejection rule so kernel and numpy streams agree bit-for-bit.
Feature-subset draws inside a node use a plain modulo reduction (bias is
~d/2^64 and the stream is kernel-internal).
"""

from __future__ import annotations

import warnings

import numpy as np
from numba import njit, prange
from numba import uint64, int64, float64
from numba.core.errors import NumbaWarning

# harmless fallback notice when the installed TBB is older than numba wants
warnings.filterwarnings("ignore", message=".*TBB.*", category=NumbaWarning)

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_C1 = np.uint64(0xBF58476D1CE4E5B9)
_C2 = np.uint64(0x94D049BB133111EB)


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> uint64(30))) * _C1
    z = (z ^ (z >> uint64(27))) * _C2
    return z ^ (z >> uint64(31))


@njit(cache=True, inline="always")
def _pair_score(pl, ql, pr, qr, nl, nr):
    return (float64(pl) * pl + float64(ql) * ql) / nl + \
           (float64(pr) * pr + float64(qr) * qr) / nr


@njit(cache=True, inline="always")
def _node_score(pos, neg, n):
    return (float64(pos) * pos + float64(neg) * neg) / n


@njit(cache=True)
def _fill_bootstrap_counts(seed, n, counts):
    """n draws with replacement from [0, n); same accept/reject sequence as
    rng.Stream.integers for the same stream seed."""
    for i in range(n):
        counts[i] = 0
    un = uint64(n)
    m = (uint64(0) - un) % un  # 2^64 mod n; 0 when n is a power of two
    limit = uint64(0) - m
    pos = uint64(0)
    drawn = 0
    while drawn < n:
        pos += uint64(1)
        raw = _mix64(seed + pos * GAMMA)
        if m == uint64(0) or raw < limit:
            counts[int64(raw % un)] += 1
            drawn += 1


@njit(cache=True)
def _expand_sorted(global_order, counts, X, f, rows_out, vals_out):
    """Walk a feature's globally sorted row order, emitting each row with
    its bootstrap multiplicity; result is the per-tree sorted segment."""
    k = 0
    for i in range(global_order.shape[0]):
        r = global_order[i]
        c = counts[r]
        if c > 0:
            v = X[r, f]
            for _ in range(c):
                rows_out[k] = r
                vals_out[k] = v
                k += 1
    return k


@njit(cache=True)
def _build_tree(X, y, rows, vals, n, max_depth, min_split, min_leaf, m,
                feat_seed, feature, threshold, left, right, leaf_value,
                n_node, go_left, tmp_rows, tmp_vals):
    """Grow one tree over presorted segments. Node ids are preorder."""
    d = X.shape[1]
    cap = feature.shape[0]
    st_s = np.empty(cap, np.int64)
    st_e = np.empty(cap, np.int64)
    st_d = np.empty(cap, np.int64)
    st_p = np.empty(cap, np.int64)
    st_l = np.empty(cap, np.uint8)
    st_s[0] = 0
    st_e[0] = n
    st_d[0] = 0
    st_p[0] = -1
    st_l[0] = 0
    sp = 1
    n_nodes = 0
    feats = np.empty(d, np.int64)
    state = uint64(0)
    while sp > 0:
        sp -= 1
        s = st_s[sp]
        e = st_e[sp]
        depth = st_d[sp]
        parent = st_p[sp]
        isleft = st_l[sp]
        node_id = n_nodes
        n_nodes += 1
        if parent >= 0:
            if isleft == 1:
                left[parent] = node_id
            else:
                right[parent] = node_id
        nn = e - s
        pos = 0
        for i in range(s, e):
            pos += y[rows[0, i]]
        neg = nn - pos
        best_feat = -1
        best_thr = 0.0
        best_score = _node_score(pos, neg, nn)
        if depth < max_depth and nn >= min_split and pos > 0 and neg > 0:
            n_feats = d
            for j in range(d):
                feats[j] = j
            if m < d:
                for j in range(m):
                    state += uint64(1)
                    v = _mix64(feat_seed + state * GAMMA)
                    k = j + int64(v % uint64(d - j))
                    t = feats[j]
                    feats[j] = feats[k]
                    feats[k] = t
                n_feats = m
                for a in range(1, m):
                    key = feats[a]
                    b = a - 1
                    while b >= 0 and feats[b] > key:
                        feats[b + 1] = feats[b]
                        b -= 1
                    feats[b + 1] = key
            for fj in range(n_feats):
                f = feats[fj]
                cpos = 0
                for i in range(s, e - 1):
                    cpos += y[rows[f, i]]
                    vi = vals[f, i]
                    vn = vals[f, i + 1]
                    if vi == vn:
                        continue
                    nl = i - s + 1
                    nr = nn - nl
                    if nl < min_leaf or nr < min_leaf:
                        continue
                    pl = cpos
                    ql = nl - pl
                    pr = pos - pl
                    qr = neg - ql
                    score = _pair_score(pl, ql, pr, qr, nl, nr)
                    if score > best_score:
                        best_score = score
                        best_feat = f
                        thr = (vi + vn) / 2.0
                        if thr == vn:
                            thr = vi
                        best_thr = thr
        if best_feat < 0:
            feature[node_id] = -1
            threshold[node_id] = 0.0
            left[node_id] = -1
            right[node_id] = -1
            leaf_value[node_id] = float64(pos) / nn
            n_node[node_id] = nn
        else:
            n_l = 0
            for i in range(s, e):
                r = rows[best_feat, i]
                if vals[best_feat, i] <= best_thr:
                    go_left[r] = 1
                    n_l += 1
                else:
                    go_left[r] = 0
            for f in range(d):
                kl = 0
                kr = 0
                for i in range(s, e):
                    r = rows[f, i]
                    if go_left[r] == 1:
                        tmp_rows[kl] = r
                        tmp_vals[kl] = vals[f, i]
                        kl += 1
                    else:
                        tmp_rows[nn - 1 - kr] = r
                        tmp_vals[nn - 1 - kr] = vals[f, i]
                        kr += 1
                for i in range(kl):
                    rows[f, s + i] = tmp_rows[i]
                    vals[f, s + i] = tmp_vals[i]
                for i in range(kr):
                    rows[f, s + kl + i] = tmp_rows[nn - 1 - i]
                    vals[f, s + kl + i] = tmp_vals[nn - 1 - i]
            mid = s + n_l
            feature[node_id] = best_feat
            threshold[node_id] = best_thr
            leaf_value[node_id] = float64(pos) / nn
            n_node[node_id] = nn
            st_s[sp] = mid
            st_e[sp] = e
            st_d[sp] = depth + 1
            st_p[sp] = node_id
            st_l[sp] = 0
            sp += 1
            st_s[sp] = s
            st_e[sp] = mid
            st_d[sp] = depth + 1
            st_p[sp] = node_id
            st_l[sp] = 1
            sp += 1
    return n_nodes


@njit(cache=True, parallel=True)
def _build_forest_batch(X, y, global_orders, boot_seeds, feat_seeds,
                        use_bootstrap, max_depth, min_split, min_leaf, m,
                        out_feature, out_threshold, out_left, out_right,
                        out_leaf, out_nn, out_counts):
    """Build a batch of trees in parallel; per-tree streams make the result
    independent of thread count and schedule."""
    B = boot_seeds.shape[0]
    n = X.shape[0]
    d = X.shape[1]
    for b in prange(B):
        counts = np.empty(n, np.int64)
        if use_bootstrap == 1:
            _fill_bootstrap_counts(boot_seeds[b], n, counts)
        else:
            for i in range(n):
                counts[i] = 1
        rows = np.empty((d, n), np.int32)
        vals = np.empty((d, n), np.float64)
        for f in range(d):
            _expand_sorted(global_orders[f], counts, X, f, rows[f], vals[f])
        go_left = np.zeros(n, np.uint8)
        tmp_rows = np.empty(n, np.int32)
        tmp_vals = np.empty(n, np.float64)
        out_counts[b] = _build_tree(
            X, y, rows, vals, n, max_depth, min_split, min_leaf, m,
            feat_seeds[b], out_feature[b], out_threshold[b], out_left[b],
            out_right[b], out_leaf[b], out_nn[b], go_left, tmp_rows, tmp_vals,
        )


@njit(cache=True, parallel=True)
def _predict_ensemble(X, feature, threshold, left, right, leaf_value,
                      offsets, vote, out):
    """Mean leaf fraction over trees (vote=0) or mean hard vote (vote=1)."""
    n = X.shape[0]
    K = offsets.shape[0] - 1
    for i in prange(n):
        acc = 0.0
        for t in range(K):
            node = offsets[t]
            f = feature[node]
            while f >= 0:
                if X[i, f] <= threshold[node]:
                    node = left[node]
                else:
                    node = right[node]
                f = feature[node]
            v = leaf_value[node]
            if vote == 1:
                if v >= 0.5:
                    acc += 1.0
            else:
                acc += v
        out[i] = acc / K


@njit(cache=True)
def _best_split_kernel(Xn, yn, cands, min_leaf):
    """Sort-at-node split search over explicit candidate features.

    Returns (feature, threshold, best_score, pos); feature is -1 when no
    split strictly improves on the parent. Selection logic is expression-
    identical to _build_tree.
    """
    n = Xn.shape[0]
    pos = 0
    for i in range(n):
        pos += yn[i]
    neg = n - pos
    best_score = _node_score(pos, neg, n)
    best_feat = -1
    best_thr = 0.0
    if pos == 0 or neg == 0:
        return best_feat, best_thr, best_score, pos
    vals = np.empty(n, np.float64)
    for fj in range(cands.shape[0]):
        f = cands[fj]
        for i in range(n):
            vals[i] = Xn[i, f]
        order = np.argsort(vals)
        cpos = 0
        for i in range(n - 1):
            oi = order[i]
            cpos += yn[oi]
            vi = vals[oi]
            vn = vals[order[i + 1]]
            if vi == vn:
                continue
            nl = i + 1
            nr = n - nl
            if nl < min_leaf or nr < min_leaf:
                continue
            pl = cpos
            ql = nl - pl
            pr = pos - pl
            qr = neg - ql
            score = _pair_score(pl, ql, pr, qr, nl, nr)
            if score > best_score:
                best_score = score
                best_feat = f
                thr = (vi + vn) / 2.0
                if thr == vn:
                    thr = vi
                best_thr = thr
    return best_feat, best_thr, best_score, pos
