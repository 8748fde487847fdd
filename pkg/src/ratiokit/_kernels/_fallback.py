"""Pure numpy implementations of the hot kernels.

Semantics (and, for identical float64 inputs, bit-level results) match the
compiled versions in ``_core.pyx``: the per-element arithmetic uses the same
IEEE expressions, so counts and ratio values agree exactly across backends.
"""

import numpy as np


def _as_f64(x):
    return np.ascontiguousarray(x, dtype=np.float64)


def ratio_r_values(intervals):
    """r_k = i_k / (i_k + i_{k+1}) for each adjacent pair."""
    iv = _as_f64(intervals)
    return iv[:-1] / (iv[:-1] + iv[1:])


def ratio_q_values(intervals):
    """q_k = i_{k+1} / i_k for each adjacent pair."""
    iv = _as_f64(intervals)
    return iv[1:] / iv[:-1]


def count_between_closed(values, lo, hi):
    """Number of values in the closed interval [lo, hi]."""
    x = _as_f64(values)
    return int(np.count_nonzero((x >= lo) & (x <= hi)))


def pair_ratio_r_hits(i1, i2, lo, hi):
    """Count pairs whose ratio i1/(i1+i2) lands in the closed bin [lo, hi]."""
    a = _as_f64(i1)
    b = _as_f64(i2)
    r = a / (a + b)
    return int(np.count_nonzero((r >= lo) & (r <= hi)))


def pair_ratio_q_hits(i1, i2, lo, hi):
    """Count pairs whose fraction i2/i1 lands in the closed bin [lo, hi]."""
    a = _as_f64(i1)
    b = _as_f64(i2)
    q = b / a
    return int(np.count_nonzero((q >= lo) & (q <= hi)))


def _bin_indices(values, edges):
    """Bin index per value: half-open [e_k, e_{k+1}), final bin closed.

    Values outside [edges[0], edges[-1]] get index -1.
    """
    nbins = edges.size - 1
    idx = np.searchsorted(edges, values, side="right") - 1
    idx[values == edges[-1]] = nbins - 1
    idx[(values < edges[0]) | (values > edges[-1])] = -1
    return idx


def bin_counts(values, edges):
    """Per-bin counts of values; out-of-layout values are dropped."""
    x = _as_f64(values)
    e = _as_f64(edges)
    nbins = e.size - 1
    idx = _bin_indices(x, e)
    return np.bincount(idx[idx >= 0], minlength=nbins).astype(np.int64)


def sequence_r_bin_counts(intervals, edges):
    """Per-sequence bin counts of r ratios for a (S, L) interval matrix."""
    iv = np.ascontiguousarray(intervals, dtype=np.float64)
    e = _as_f64(edges)
    nbins = e.size - 1
    n_seq = iv.shape[0]
    r = iv[:, :-1] / (iv[:, :-1] + iv[:, 1:])
    idx = _bin_indices(r.ravel(), e)
    rows = np.repeat(np.arange(n_seq), r.shape[1])
    keep = idx >= 0
    flat = rows[keep] * nbins + idx[keep]
    counts = np.bincount(flat, minlength=n_seq * nbins)
    return counts.reshape(n_seq, nbins).astype(np.int64)
