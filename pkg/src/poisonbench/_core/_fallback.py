"""Pure numpy versions of the tree kernels.

Arithmetic order mirrors ``_kernels.pyx`` exactly (sequential class
accumulation, same gini expression) so both backends grow identical trees.
"""
import numpy as np

TIE_EPS = 1e-12


def node_totals(y, w, rows, n_classes):
    totals = np.bincount(y[rows], weights=w[rows], minlength=n_classes).astype(np.float64)
    total = 0.0
    for c in range(n_classes):
        total = total + totals[c]
    return totals, total


def _gini_terms(counts, total):
    """1 - sum_c (counts_c / total)^2, accumulated class by class."""
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.zeros_like(total)
        for c in range(counts.shape[-1]):
            p = counts[..., c] / total
            s = s + p * p
        g = 1.0 - s
    return np.where(total > 0, g, 0.0)


def best_split(X, y, w, rows, features, n_classes):
    """Best weighted-gini split over ``features`` for the node holding ``rows``.

    Returns (feature, threshold, gain); feature is -1 when no split gains more
    than TIE_EPS. Among near-equal gains (within TIE_EPS of the best) the
    lowest feature index, then lowest threshold, wins.
    """
    rows = np.asarray(rows, dtype=np.int64)
    m = rows.size
    if m < 2:
        return -1, 0.0, 0.0
    totals, total = node_totals(y, w, rows, n_classes)
    if not total > 0:
        return -1, 0.0, 0.0
    parent = float(_gini_terms(totals, np.float64(total)))
    yr = y[rows]
    wr = w[rows]
    onehot = np.zeros((m, n_classes))
    onehot[np.arange(m), yr] = wr

    all_gain, all_feat, all_thr = [], [], []
    for f in sorted(int(f) for f in features):
        vals = X[rows, f]
        order = np.argsort(vals, kind="stable")
        v = vals[order]
        boundary = np.flatnonzero(v[:-1] < v[1:])
        if boundary.size == 0:
            continue
        left = np.cumsum(onehot[order], axis=0)[boundary]
        right = totals - left
        wl = np.zeros(boundary.size)
        wrr = np.zeros(boundary.size)
        for c in range(n_classes):
            wl = wl + left[:, c]
            wrr = wrr + right[:, c]
        gl = _gini_terms(left, wl)
        gr = _gini_terms(right, wrr)
        gain = parent - (wl / total) * gl - (wrr / total) * gr
        a, b = v[boundary], v[boundary + 1]
        thr = 0.5 * (a + b)
        thr = np.where(thr < b, thr, a)
        all_gain.append(gain)
        all_feat.append(np.full(boundary.size, f, dtype=np.int64))
        all_thr.append(thr)
    if not all_gain:
        return -1, 0.0, 0.0
    gain = np.concatenate(all_gain)
    best = gain.max()
    if not best > TIE_EPS:
        return -1, 0.0, 0.0
    i = int(np.argmax(gain >= best - TIE_EPS))
    return int(np.concatenate(all_feat)[i]), float(np.concatenate(all_thr)[i]), float(gain[i])


def apply_tree(X, feature, threshold, left, right):
    """Leaf node id reached by each row of X (value <= threshold goes left)."""
    n = X.shape[0]
    node = np.zeros(n, dtype=np.int64)
    active = np.flatnonzero(feature[node] >= 0)
    while active.size:
        nd = node[active]
        go_left = X[active, feature[nd]] <= threshold[nd]
        node[active] = np.where(go_left, left[nd], right[nd])
        active = active[feature[node[active]] >= 0]
    return node
