"""Shared fixtures and oracle helpers for the test suite."""

import itertools

import numpy as np
from scipy.stats import rankdata

from ratiokit import Tabulated


def tabulated_triangle() -> Tabulated:
    """A 9-knot triangular density on [0.5, 2.5]."""
    d = np.linspace(0.5, 2.5, 9)
    return Tabulated(d, np.minimum(d - 0.5, 2.5 - d))


def one_to_one_mass_on(a: float, b: float) -> float:
    """Published closed form for the 1:1 on-bin mass under Uniform(a, b)."""
    return 0.5 - (4 * b - 5 * a) ** 2 / (40.0 * (b - a) ** 2)


def one_to_one_mass_off(a: float, b: float) -> float:
    """Published closed form for the 1:1 off-bin mass under Uniform(a, b)."""
    return (4 * b - 5 * a) ** 2 / (40.0 * (b - a) ** 2) - (2 * b - 3 * a) ** 2 / (
        12.0 * (b - a) ** 2
    )


def brute_force_wilcoxon_p(diffs) -> float:
    """Two-sided signed-rank p by enumerating all 2^n sign patterns.

    Counts patterns at least as extreme on either side of the observed
    T = min(W+, W-); independent of the convolution used in production.
    """
    d = np.asarray(diffs, dtype=float)
    d = d[d != 0.0]
    ranks = rankdata(np.abs(d), method="average")
    w_plus = ranks[d > 0].sum()
    w_minus = ranks[d < 0].sum()
    t = min(w_plus, w_minus)
    total = ranks.sum()
    eps = 1e-9
    count = 0
    for bits in itertools.product((0, 1), repeat=d.size):
        w = sum(r for r, b in zip(ranks, bits) if b)
        if w <= t + eps or w >= total - t - eps:
            count += 1
    return min(1.0, count / 2.0 ** d.size)
