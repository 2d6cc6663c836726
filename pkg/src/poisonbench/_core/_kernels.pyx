# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
# distutils: language = c++
"""Compiled split search and tree traversal; same contract as _fallback."""
import numpy as np

from libcpp.algorithm cimport sort
from libcpp.pair cimport pair
from libcpp.vector cimport vector

DEF MAX_CLASSES = 16

cdef double TIE_EPS = 1e-12


cdef inline double _gini(const double* counts, double total, int k) nogil:
    cdef double s = 0.0, p
    cdef int c
    if not total > 0:
        return 0.0
    for c in range(k):
        p = counts[c] / total
        s = s + p * p
    return 1.0 - s


def best_split(const double[:, ::1] X, const long[::1] y, const double[::1] w,
               rows, features, int n_classes):
    cdef const long[::1] r = np.ascontiguousarray(rows, dtype=np.int64)
    cdef long[::1] feats = np.array(sorted(int(f) for f in features), dtype=np.int64)
    cdef Py_ssize_t m = r.shape[0], nf = feats.shape[0]
    cdef Py_ssize_t i, j, fi
    cdef int c
    cdef long f
    cdef double totals[MAX_CLASSES]
    cdef double left[MAX_CLASSES]
    cdef double right[MAX_CLASSES]
    cdef double total = 0.0, parent, wl, wr, gain, a, b, thr
    cdef vector[pair[double, Py_ssize_t]] keyed
    cdef vector[double] gains
    cdef vector[double] thrs
    cdef vector[long] fs
    cdef double best
    cdef Py_ssize_t nc

    if n_classes > MAX_CLASSES:
        raise ValueError("too many classes for compiled kernel")
    if m < 2:
        return -1, 0.0, 0.0

    with nogil:
        for c in range(n_classes):
            totals[c] = 0.0
        for j in range(m):
            totals[y[r[j]]] += w[r[j]]
        for c in range(n_classes):
            total = total + totals[c]
    if not total > 0:
        return -1, 0.0, 0.0

    with nogil:
        parent = _gini(totals, total, n_classes)
        keyed.resize(m)
        for fi in range(nf):
            f = feats[fi]
            for j in range(m):
                keyed[j].first = X[r[j], f]
                keyed[j].second = j
            sort(keyed.begin(), keyed.end())
            for c in range(n_classes):
                left[c] = 0.0
            for i in range(m - 1):
                j = keyed[i].second
                left[y[r[j]]] += w[r[j]]
                a = keyed[i].first
                b = keyed[i + 1].first
                if not a < b:
                    continue
                wl = 0.0
                wr = 0.0
                for c in range(n_classes):
                    right[c] = totals[c] - left[c]
                for c in range(n_classes):
                    wl = wl + left[c]
                    wr = wr + right[c]
                gain = parent - (wl / total) * _gini(left, wl, n_classes) - (wr / total) * _gini(right, wr, n_classes)
                thr = 0.5 * (a + b)
                if not thr < b:
                    thr = a
                gains.push_back(gain)
                thrs.push_back(thr)
                fs.push_back(f)

        nc = gains.size()
        best = -1.0
        for i in range(nc):
            if gains[i] > best:
                best = gains[i]
    if nc == 0 or not best > TIE_EPS:
        return -1, 0.0, 0.0
    for i in range(nc):
        if gains[i] >= best - TIE_EPS:
            return int(fs[i]), float(thrs[i]), float(gains[i])
    return -1, 0.0, 0.0


def apply_tree(const double[:, ::1] X, const long[::1] feature, const double[::1] threshold,
               const long[::1] left, const long[::1] right):
    cdef Py_ssize_t n = X.shape[0], i
    cdef long node
    out = np.empty(n, dtype=np.int64)
    cdef long[::1] o = out
    with nogil:
        for i in range(n):
            node = 0
            while feature[node] >= 0:
                if X[i, feature[node]] <= threshold[node]:
                    node = left[node]
                else:
                    node = right[node]
            o[i] = node
    return out
