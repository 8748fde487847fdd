"""Reusable numeric machinery.

Adaptive Gauss-Kronrod quadrature, bracketed inversion of monotone
functions, and the Monte Carlo bin-mass estimator used to approximate
normalization constants when no closed form is available.
"""

from __future__ import annotations

import heapq
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, NonConvergenceError

__all__ = [
    "QuadratureResult",
    "McEstimate",
    "integrate_adaptive",
    "invert_monotone",
    "mc_bin_mass",
]

# 15-point Kronrod extension of 7-point Gauss (QUADPACK constants).
_KRONROD_NODES = np.array(
    [
        -0.991455371120813,
        -0.949107912342759,
        -0.864864423359769,
        -0.741531185599394,
        -0.586087235467691,
        -0.405845151377397,
        -0.207784955007898,
        0.0,
        0.207784955007898,
        0.405845151377397,
        0.586087235467691,
        0.741531185599394,
        0.864864423359769,
        0.949107912342759,
        0.991455371120813,
    ]
)
_KRONROD_WEIGHTS = np.array(
    [
        0.022935322010529,
        0.063092092629979,
        0.104790010322250,
        0.140653259715525,
        0.169004726639267,
        0.190350578064785,
        0.204432940075298,
        0.209482141084728,
        0.204432940075298,
        0.190350578064785,
        0.169004726639267,
        0.140653259715525,
        0.104790010322250,
        0.063092092629979,
        0.022935322010529,
    ]
)
# Gauss weights apply to the odd-indexed Kronrod nodes.
_GAUSS_WEIGHTS = np.array(
    [
        0.129484966168870,
        0.279705391489277,
        0.381830050505119,
        0.417959183673469,
        0.381830050505119,
        0.279705391489277,
        0.129484966168870,
    ]
)


@dataclass(frozen=True)
class QuadratureResult:
    """Outcome of an adaptive quadrature run."""

    value: float
    abs_error_estimate: float
    panels_used: int


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo estimate of the probability mass in a ratio bin."""

    mass: float
    n: int
    std_error: float
    seed: int

    def __post_init__(self):
        if not 0.0 <= self.mass <= 1.0:
            raise ValueError(f"mass {self.mass} outside [0, 1]")
        if self.std_error < 0.0:
            raise ValueError("std_error must be >= 0")


def _panel(f, lo: float, hi: float):
    """Evaluate one Gauss-Kronrod panel; returns (value, error, midpoint)."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    fx = np.asarray(f(mid + half * _KRONROD_NODES), dtype=float)
    if fx.shape != _KRONROD_NODES.shape:
        raise ValueError("integrand must be vectorized over numpy arrays")
    if not np.all(np.isfinite(fx)):
        raise DomainError(f"integrand not finite on [{lo}, {hi}]")
    kronrod = half * float(fx @ _KRONROD_WEIGHTS)
    gauss = half * float(fx[1::2] @ _GAUSS_WEIGHTS)
    return kronrod, abs(kronrod - gauss), mid


def integrate_adaptive(
    f,
    lo: float,
    hi: float,
    tol: float = 1e-8,
    *,
    breakpoints=(),
    max_panels: int = 4096,
) -> QuadratureResult:
    """Integrate ``f`` over ``[lo, hi]`` to absolute tolerance ``tol``.

    Uses Gauss-Kronrod 7/15 panels with adaptive bisection of the panel
    carrying the largest error estimate.  ``f`` must accept numpy arrays.
    ``breakpoints`` seeds the initial partition; pass the locations of
    kinks or support edges to keep panels inside smooth pieces.

    Raises :class:`NonConvergenceError` (carrying the best estimate) when
    ``max_panels`` panels are not enough.
    """
    if not lo < hi:
        raise DomainError(f"empty integration interval [{lo}, {hi}]")
    if tol <= 0.0:
        raise DomainError("tol must be positive")

    cuts = sorted({lo, hi, *(b for b in breakpoints if lo < b < hi)})
    heap = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        value, err, _ = _panel(f, a, b)
        heap.append((-err, a, b, value, err))
    heapq.heapify(heap)
    panels = len(heap)

    while True:
        total_err = sum(item[4] for item in heap)
        if total_err <= tol:
            break
        if panels >= max_panels:
            value = sum(item[3] for item in heap)
            best = QuadratureResult(value, total_err, panels)
            raise NonConvergenceError(
                f"quadrature did not reach tol={tol} within {max_panels} panels "
                f"(error estimate {total_err:.3e})",
                best=best,
            )
        _, a, b, _, _ = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            # Interval collapsed to machine precision; keep its estimate.
            value, err, _ = _panel(f, a, b)
            heap.append((0.0, a, b, value, 0.0))
            heapq.heapify(heap)
            continue
        for c, d in ((a, mid), (mid, b)):
            value, err, _ = _panel(f, c, d)
            heapq.heappush(heap, (-err, c, d, value, err))
        panels += 1

    value = sum(item[3] for item in heap)
    return QuadratureResult(value, total_err, panels)


def invert_monotone(F, target: float, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Solve ``F(x) = target`` for monotone ``F`` on ``[lo, hi]``.

    Bracketed bisection with secant acceleration; works for increasing and
    decreasing ``F``.  Returns ``x`` with ``|F(x) - target| <= tol``.
    """
    if not lo < hi:
        raise DomainError(f"empty bracket [{lo}, {hi}]")
    f_lo = float(F(lo))
    f_hi = float(F(hi))
    increasing = f_hi >= f_lo
    a, b = (lo, hi)
    fa, fb = (f_lo, f_hi) if increasing else (f_hi, f_lo)
    if not fa <= target <= fb:
        raise DomainError(
            f"target {target} outside function range [{fa}, {fb}] on bracket"
        )
    if abs(f_lo - target) <= tol:
        return lo
    if abs(f_hi - target) <= tol:
        return hi

    ga, gb = f_lo - target, f_hi - target
    for _ in range(200):
        # Secant proposal, guarded to stay inside the bracket.
        if gb != ga:
            x = a - ga * (b - a) / (gb - ga)
            if not a < x < b:
                x = 0.5 * (a + b)
        else:
            x = 0.5 * (a + b)
        gx = float(F(x)) - target
        if abs(gx) <= tol:
            return x
        if (gx > 0) == (gb > 0):
            b, gb = x, gx
        else:
            a, ga = x, gx
        if b - a <= max(abs(a), abs(b), 1.0) * 1e-16:
            break
    x = 0.5 * (a + b)
    if abs(float(F(x)) - target) <= tol:
        return x
    raise NonConvergenceError(
        f"monotone inversion stalled at x={x} (bracket width {b - a:.3e})"
    )


# Internal chunk size keeps peak memory for sample buffers bounded; it is a
# fixed constant so a given seed always consumes the stream identically.
_MC_CHUNK = 1 << 21


def _mc_hits(model, transform, u, v, n, rng) -> int:
    """Count ratio hits in the closed bin [u, v] over n fresh pairs."""
    hits = 0
    done = 0
    while done < n:
        m = min(_MC_CHUNK, n - done)
        draws = model.sample(2 * m, rng)
        i1 = draws[0::2]
        i2 = draws[1::2]
        if transform.kind == "r":
            hits += _kernels.pair_ratio_r_hits(i1, i2, u, v)
        elif transform.kind == "q":
            hits += _kernels.pair_ratio_q_hits(i1, i2, u, v)
        else:
            values = transform.from_pair(i1, i2)
            hits += _kernels.count_between_closed(values, u, v)
        done += m
    return hits


def mc_bin_mass(
    model,
    transform,
    u: float,
    v: float,
    n: int = 10**6,
    seed: int | None = None,
    *,
    n_chunks: int = 1,
    n_jobs: int = 1,
) -> McEstimate:
    """Estimate the probability mass a null model puts in a ratio bin.

    Draws ``n`` independent interval pairs from ``model``, maps each pair
    through ``transform`` and counts hits in the closed bin ``u <= s <= v``.
    Returns the hit fraction with its binomial standard error; the estimate
    is reproducible from ``seed``.

    With ``n_chunks > 1`` the trials are split into independently seeded
    chunks (seeds derived from ``seed``) whose hit counts are summed; the
    result does not depend on ``n_jobs``.
    """
    lo, hi = transform.codomain
    if not (lo <= u < v <= hi):
        raise DomainError(f"bin [{u}, {v}] invalid for codomain ({lo}, {hi})")
    if n < 1:
        raise DomainError("n must be >= 1")
    if n_chunks < 1:
        raise DomainError("n_chunks must be >= 1")

    if seed is None:
        seed = int(np.random.SeedSequence().entropy % (2**63))
    root = np.random.SeedSequence(seed)

    if n_chunks == 1:
        hits = _mc_hits(model, transform, u, v, n, np.random.default_rng(root))
    else:
        children = root.spawn(n_chunks)
        sizes = [n // n_chunks] * n_chunks
        sizes[-1] += n - sum(sizes)
        jobs = [
            (size, np.random.default_rng(child))
            for size, child in zip(sizes, children)
            if size > 0
        ]
        if n_jobs > 1:
            with ThreadPoolExecutor(max_workers=n_jobs) as pool:
                counts = list(
                    pool.map(lambda sr: _mc_hits(model, transform, u, v, *sr), jobs)
                )
        else:
            counts = [_mc_hits(model, transform, u, v, size, rng) for size, rng in jobs]
        hits = sum(counts)

    mass = hits / n
    std_error = math.sqrt(mass * (1.0 - mass) / n)
    return McEstimate(mass=mass, n=n, std_error=std_error, seed=seed)
