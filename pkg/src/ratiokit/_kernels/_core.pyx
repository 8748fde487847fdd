# Compiled hot kernels: adjacent-pair ratio transforms, closed-bin hit
# counting for the Monte Carlo mass estimator, and fused ratio+binning for
# sequence batches.  Bin placement follows searchsorted(side="right")
# semantics: half-open [e_k, e_{k+1}) bins, the final bin closed.
#
# The numpy fallback (_fallback.py) evaluates the same IEEE expressions, so
# both backends produce bit-identical results for identical inputs.

import numpy as np


cdef inline Py_ssize_t _find_bin(double x, const double[::1] edges) noexcept nogil:
    cdef Py_ssize_t n_edges = edges.shape[0]
    cdef Py_ssize_t k
    if x < edges[0] or x > edges[n_edges - 1]:
        return -1
    if x == edges[n_edges - 1]:
        return n_edges - 2
    k = 0
    while x >= edges[k + 1]:
        k += 1
    return k


def ratio_r_values(intervals):
    """r_k = i_k / (i_k + i_{k+1}) for each adjacent pair."""
    iv = np.ascontiguousarray(intervals, dtype=np.float64)
    cdef const double[::1] x = iv
    cdef Py_ssize_t n = x.shape[0]
    out = np.empty(max(n - 1, 0), dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t k
    with nogil:
        for k in range(n - 1):
            o[k] = x[k] / (x[k] + x[k + 1])
    return out


def ratio_q_values(intervals):
    """q_k = i_{k+1} / i_k for each adjacent pair."""
    iv = np.ascontiguousarray(intervals, dtype=np.float64)
    cdef const double[::1] x = iv
    cdef Py_ssize_t n = x.shape[0]
    out = np.empty(max(n - 1, 0), dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t k
    with nogil:
        for k in range(n - 1):
            o[k] = x[k + 1] / x[k]
    return out


def count_between_closed(values, double lo, double hi):
    """Number of values in the closed interval [lo, hi]."""
    arr = np.ascontiguousarray(values, dtype=np.float64)
    cdef const double[::1] x = arr
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t k
    cdef long long hits = 0
    with nogil:
        for k in range(n):
            # branchless: comparisons are 0/1 ints
            hits += (x[k] >= lo) & (x[k] <= hi)
    return int(hits)


def pair_ratio_r_hits(i1, i2, double lo, double hi):
    """Count pairs whose ratio i1/(i1+i2) lands in the closed bin [lo, hi]."""
    a_arr = np.ascontiguousarray(i1, dtype=np.float64)
    b_arr = np.ascontiguousarray(i2, dtype=np.float64)
    cdef const double[::1] a = a_arr
    cdef const double[::1] b = b_arr
    cdef Py_ssize_t n = min(a.shape[0], b.shape[0])
    cdef Py_ssize_t k
    cdef double r
    cdef long long hits = 0
    with nogil:
        for k in range(n):
            r = a[k] / (a[k] + b[k])
            hits += (r >= lo) & (r <= hi)
    return int(hits)


def pair_ratio_q_hits(i1, i2, double lo, double hi):
    """Count pairs whose fraction i2/i1 lands in the closed bin [lo, hi]."""
    a_arr = np.ascontiguousarray(i1, dtype=np.float64)
    b_arr = np.ascontiguousarray(i2, dtype=np.float64)
    cdef const double[::1] a = a_arr
    cdef const double[::1] b = b_arr
    cdef Py_ssize_t n = min(a.shape[0], b.shape[0])
    cdef Py_ssize_t k
    cdef double q
    cdef long long hits = 0
    with nogil:
        for k in range(n):
            q = b[k] / a[k]
            hits += (q >= lo) & (q <= hi)
    return int(hits)


def bin_counts(values, edges):
    """Per-bin counts of values; out-of-layout values are dropped."""
    v_arr = np.ascontiguousarray(values, dtype=np.float64)
    e_arr = np.ascontiguousarray(edges, dtype=np.float64)
    cdef const double[::1] x = v_arr
    cdef const double[::1] e = e_arr
    out = np.zeros(e_arr.shape[0] - 1, dtype=np.int64)
    cdef long long[::1] c = out
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t k, b
    with nogil:
        for k in range(n):
            b = _find_bin(x[k], e)
            if b >= 0:
                c[b] += 1
    return out


def sequence_r_bin_counts(intervals, edges):
    """Per-sequence bin counts of r ratios for a (S, L) interval matrix."""
    iv = np.ascontiguousarray(intervals, dtype=np.float64)
    e_arr = np.ascontiguousarray(edges, dtype=np.float64)
    cdef const double[:, ::1] m = iv
    cdef const double[::1] e = e_arr
    out = np.zeros((iv.shape[0], e_arr.shape[0] - 1), dtype=np.int64)
    cdef long long[:, ::1] c = out
    cdef Py_ssize_t n_seq = m.shape[0]
    cdef Py_ssize_t length = m.shape[1]
    cdef Py_ssize_t s, k, b
    cdef double r
    with nogil:
        for s in range(n_seq):
            for k in range(length - 1):
                r = m[s, k] / (m[s, k] + m[s, k + 1])
                b = _find_bin(r, e)
                if b >= 0:
                    c[s, b] += 1
    return out
