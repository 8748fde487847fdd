"""Interval-duration null hypotheses and the ratio distributions they induce.

Each model describes i.i.d. interval durations.  The density of the
fraction q = i2/i1 of two independent intervals is

    p_Q(q) = integral over t of  t * p_I(t) * p_I(q t) dt

and every other ratio quantity follows by change of variables: the standard
rhythm ratio r = 1/(1+q) has p_R(r) = p_Q((1-r)/r) / r^2 and
P_R(r) = 1 - P_Q((1-r)/r).  Exponential and uniform models carry exact
closed forms; other models are evaluated by adaptive quadrature, using the
identity P_Q(q) = integral of p_I(t) * F_I(q t) dt for the CDF.

An exponential model (Poisson point process) makes r exactly uniform on
(0, 1), independent of the rate, which is why bin-width normalization
implicitly assumes a Poisson null.
"""

from __future__ import annotations

import csv
import math
import weakref
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import erf, erfcinv

from .errors import DomainError, ValidationError
from .numerics import integrate_adaptive, invert_monotone
from .ratios import FractionQ, IntervalSequence, RescaledMinus, RescaledPlus, StandardR

__all__ = [
    "Exponential",
    "Uniform",
    "HalfNormal",
    "Tabulated",
    "RatioDistribution",
    "rescale_plus",
    "rescale_minus",
    "bin_mass_analytic",
    "sample_sequence",
]

# Unbounded supports are truncated where the interval CDF leaves less mass
# outside than this; the bound is surfaced in describe() metadata.
_TAIL_MASS = 1e-12
_QUAD_TOL = 1e-8
_GRID_SIZE = 1025


def _maybe_scalar(out, scalar: bool):
    return float(out[0]) if scalar else out


def _prepare(x, name: str, lower=None, upper=None, strict=False):
    """Coerce to float64 array, validate an open/closed domain."""
    arr = np.asarray(x, dtype=np.float64)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    if lower is not None:
        bad = arr <= lower if strict else arr < lower
        if np.any(bad):
            raise DomainError(f"{name} must be {'>' if strict else '>='} {lower}")
    if upper is not None:
        bad = arr >= upper if strict else arr > upper
        if np.any(bad):
            raise DomainError(f"{name} must be {'<' if strict else '<='} {upper}")
    return arr, scalar


class _ModelBase:
    """Shared q-space machinery; subclasses provide interval pdf/cdf/sample."""

    has_closed_ratio_forms = False

    # -- interval space ----------------------------------------------------
    def pdf(self, i):
        """Interval density p_I(i); domain i >= 0."""
        arr, scalar = _prepare(i, "interval", lower=0.0)
        return _maybe_scalar(self._pdf(arr), scalar)

    def cdf(self, i):
        """Interval CDF; 0 below the support."""
        arr = np.atleast_1d(np.asarray(i, dtype=np.float64))
        scalar = np.asarray(i).ndim == 0
        return _maybe_scalar(self._cdf(arr), scalar)

    def sample(self, n: int, rng) -> np.ndarray:
        """n i.i.d. interval draws; rng is a numpy Generator or a seed."""
        if n < 1:
            raise DomainError("sample size must be >= 1")
        return self._sample(int(n), np.random.default_rng(rng))

    @property
    def breakpoints(self):
        """Interior kink locations of the interval density."""
        return ()

    # -- q space -----------------------------------------------------------
    @property
    def q_support(self):
        lo, hi = self.support
        q_lo = 0.0 if math.isinf(hi) else lo / hi
        q_hi = math.inf if lo == 0.0 else hi / lo
        return (q_lo, q_hi)

    @property
    def r_support(self):
        lo, hi = self.support
        r_lo = 0.0 if math.isinf(hi) else lo / (lo + hi)
        r_hi = 1.0 if lo == 0.0 else hi / (lo + hi)
        return (r_lo, r_hi)

    def ratio_q_pdf(self, q):
        """Density of q = i2/i1 under this model (closed form or quadrature)."""
        arr, scalar = _prepare(q, "q", lower=0.0, strict=True)
        if self.has_closed_ratio_forms:
            return _maybe_scalar(self._q_pdf_closed(arr), scalar)
        out = np.array([_q_pdf_quad(self, float(v)) for v in arr])
        return _maybe_scalar(out, scalar)

    def ratio_q_cdf(self, q):
        """CDF of q = i2/i1; the rescale-plus transform of this model."""
        arr, scalar = _prepare(q, "q", lower=0.0, strict=True)
        if self.has_closed_ratio_forms:
            return _maybe_scalar(self._q_cdf_closed(arr), scalar)
        return _maybe_scalar(_grid_cdf(self, arr), scalar)

    def ratio_q_quantile(self, t):
        """Inverse of ratio_q_cdf on [0, 1]."""
        arr, scalar = _prepare(t, "probability", lower=0.0, upper=1.0)
        if self.has_closed_ratio_forms:
            return _maybe_scalar(self._q_quantile_closed(arr), scalar)
        return _maybe_scalar(_grid_quantile(self, arr), scalar)


@dataclass(frozen=True)
class Exponential(_ModelBase):
    """Exponentially distributed intervals: a homogeneous Poisson process.

    p_I(i) = rate * exp(-rate * i); mean waiting time 1/rate.  The induced
    ratio distributions are rate-free: p_Q(q) = 1/(1+q)^2 and p_R(r) = 1.
    """

    rate: float
    has_closed_ratio_forms = True

    def __post_init__(self):
        if not self.rate > 0.0:
            raise ValidationError(f"rate must be positive, got {self.rate}")

    @property
    def support(self):
        return (0.0, math.inf)

    @property
    def tail_bound(self) -> float:
        # exp(-40) ~ 4e-18 of mass beyond this point.
        return 40.0 / self.rate

    def _pdf(self, i):
        return self.rate * np.exp(-self.rate * i)

    def _cdf(self, i):
        return np.where(i <= 0.0, 0.0, 1.0 - np.exp(-self.rate * np.maximum(i, 0.0)))

    def _sample(self, n, rng):
        return rng.exponential(scale=1.0 / self.rate, size=n)

    def _q_pdf_closed(self, q):
        return 1.0 / (1.0 + q) ** 2

    def _q_cdf_closed(self, q):
        return q / (1.0 + q)

    def _q_quantile_closed(self, t):
        with np.errstate(divide="ignore"):
            return np.where(t >= 1.0, np.inf, t / (1.0 - t))

    def _r_pdf_closed(self, r):
        return np.ones_like(r)

    def _r_cdf_closed(self, r):
        return np.clip(r, 0.0, 1.0)

    def describe(self) -> dict:
        return {"kind": "exponential", "rate": self.rate}


@dataclass(frozen=True)
class Uniform(_ModelBase):
    """Intervals uniform on [a, b], 0 <= a < b.

    Only the shape ratio c = b/a matters for the ratio distributions;
    rescaling (a, b) to (ka, kb) leaves them unchanged.  The rhythm ratio
    density is supported on [a/(a+b), b/(a+b)] and peaks at r = 1/2, which
    is why a bounded-interval null concentrates ratios around 1:1.
    """

    a: float
    b: float
    has_closed_ratio_forms = True

    def __post_init__(self):
        if not (0.0 <= self.a < self.b) or not math.isfinite(self.b):
            raise ValidationError(f"need 0 <= a < b, got a={self.a}, b={self.b}")

    @property
    def support(self):
        return (self.a, self.b)

    @property
    def tail_bound(self) -> float:
        return self.b

    @property
    def shape_ratio(self) -> float:
        return math.inf if self.a == 0.0 else self.b / self.a

    def _pdf(self, i):
        inside = (i >= self.a) & (i <= self.b)
        return np.where(inside, 1.0 / (self.b - self.a), 0.0)

    def _cdf(self, i):
        return np.clip((i - self.a) / (self.b - self.a), 0.0, 1.0)

    def _sample(self, n, rng):
        return rng.uniform(self.a, self.b, size=n)

    def _q_pdf_closed(self, q):
        a, b = self.a, self.b
        norm = 2.0 * (b - a) ** 2
        q_lo, q_hi = self.q_support
        out = np.zeros_like(q)
        m1 = (q >= q_lo) & (q <= 1.0)
        m2 = (q > 1.0) & (q <= q_hi)
        lower_term = (a / q[m1]) ** 2 if a > 0.0 else 0.0
        out[m1] = (b * b - lower_term) / norm
        out[m2] = ((b / q[m2]) ** 2 - a * a) / norm
        return out

    def _q_cdf_closed(self, q):
        a, b = self.a, self.b
        norm = 2.0 * (b - a) ** 2
        q_lo, q_hi = self.q_support
        out = np.zeros_like(q)
        m1 = (q >= q_lo) & (q <= 1.0)
        m2 = (q > 1.0) & (q < q_hi)
        out[m1] = (q[m1] * b * b + (a * a / q[m1] if a > 0.0 else 0.0) - 2 * a * b) / norm
        out[m2] = 1.0 - (b * b / q[m2] + q[m2] * a * a - 2 * a * b) / norm
        out[q >= q_hi] = 1.0
        return np.clip(out, 0.0, 1.0)

    def _q_quantile_closed(self, t):
        a, b = self.a, self.b
        q_lo, q_hi = self.q_support
        out = np.empty_like(t)
        lower = t <= 0.0
        upper = t >= 1.0
        m1 = ~lower & ~upper & (t <= 0.5)
        m2 = ~lower & ~upper & (t > 0.5)
        out[lower] = q_lo
        out[upper] = q_hi
        if a == 0.0:
            out[m1] = 2.0 * t[m1]
            out[m2] = 0.5 / (1.0 - t[m2])
            return out
        coef = 2.0 * (b - a) ** 2
        beta1 = 2.0 * a * b + coef * t[m1]
        out[m1] = (beta1 + np.sqrt(beta1 * beta1 - 4.0 * a * a * b * b)) / (2.0 * b * b)
        beta2 = 2.0 * a * b + coef * (1.0 - t[m2])
        out[m2] = (beta2 - np.sqrt(beta2 * beta2 - 4.0 * a * a * b * b)) / (2.0 * a * a)
        return out

    def _r_pdf_closed(self, r):
        a, b = self.a, self.b
        norm = 2.0 * (b - a) ** 2
        r_lo, r_hi = self.r_support
        out = np.zeros_like(r)
        m1 = (r >= r_lo) & (r <= 0.5)
        m2 = (r > 0.5) & (r <= r_hi)
        lower_term = (a / r[m1]) ** 2 if a > 0.0 else 0.0
        upper_term = (a / (1.0 - r[m2])) ** 2 if a > 0.0 else 0.0
        out[m1] = ((b / (1.0 - r[m1])) ** 2 - lower_term) / norm
        out[m2] = ((b / r[m2]) ** 2 - upper_term) / norm
        return out

    def _r_cdf_closed(self, r):
        a, b = self.a, self.b
        norm = 2.0 * (b - a) ** 2
        r_lo, r_hi = self.r_support
        out = np.zeros_like(r)
        m1 = (r >= r_lo) & (r <= 0.5)
        m2 = (r > 0.5) & (r < r_hi)
        s = (a + b) ** 2
        out[m1] = (b * b / (1.0 - r[m1]) + (a * a / r[m1] if a > 0.0 else 0.0) - s) / norm
        out[m2] = 1.0 - (b * b / r[m2] + (a * a / (1.0 - r[m2]) if a > 0.0 else 0.0) - s) / norm
        out[r >= r_hi] = 1.0
        return np.clip(out, 0.0, 1.0)

    def describe(self) -> dict:
        return {
            "kind": "uniform",
            "a": self.a,
            "b": self.b,
            "shape_ratio": self.shape_ratio,
        }


@dataclass(frozen=True)
class HalfNormal(_ModelBase):
    """Intervals |X| with X ~ Normal(0, scale^2).

    p_I(i) = sqrt(2/pi)/scale * exp(-i^2 / (2 scale^2)) on [0, inf).  No
    closed ratio forms are exposed; ratio quantities are evaluated by
    quadrature.  The scale drops out of all ratio distributions.
    """

    scale: float

    def __post_init__(self):
        if not self.scale > 0.0:
            raise ValidationError(f"scale must be positive, got {self.scale}")

    @property
    def support(self):
        return (0.0, math.inf)

    @property
    def tail_bound(self) -> float:
        return float(self.scale * math.sqrt(2.0) * erfcinv(_TAIL_MASS))

    def _pdf(self, i):
        s = self.scale
        return math.sqrt(2.0 / math.pi) / s * np.exp(-(i * i) / (2.0 * s * s))

    def _cdf(self, i):
        return np.where(i <= 0.0, 0.0, erf(np.maximum(i, 0.0) / (self.scale * math.sqrt(2.0))))

    def _sample(self, n, rng):
        return np.abs(rng.normal(0.0, self.scale, size=n))

    def describe(self) -> dict:
        return {"kind": "halfnormal", "scale": self.scale}


@dataclass(frozen=True, eq=False)
class Tabulated(_ModelBase):
    """Interval density given on a grid, linearly interpolated between knots.

    The density is renormalized to unit mass at construction; the CDF is the
    exact integral of the interpolant (piecewise quadratic) and sampling
    inverts it.  Needs at least 8 strictly increasing grid points.
    """

    durations: np.ndarray
    densities: np.ndarray

    def __post_init__(self):
        d = np.array(self.durations, dtype=np.float64, copy=True)
        p = np.array(self.densities, dtype=np.float64, copy=True)
        if d.ndim != 1 or p.ndim != 1 or d.size != p.size:
            raise ValidationError("durations and densities must be 1-d and equal length")
        if d.size < 8:
            raise ValidationError(f"need at least 8 grid rows, got {d.size}")
        if not np.all(np.isfinite(d)) or not np.all(np.isfinite(p)):
            raise ValidationError("grid values must be finite")
        if d[0] < 0.0:
            raise ValidationError("durations must be >= 0")
        if np.any(np.diff(d) <= 0.0):
            raise ValidationError("durations must be strictly increasing")
        if np.any(p < 0.0):
            raise ValidationError("densities must be >= 0")
        mass = float(np.trapezoid(p, d))
        if mass <= 0.0:
            raise ValidationError("density grid has zero total mass")
        p = p / mass
        cum = np.concatenate(([0.0], np.cumsum(np.diff(d) * 0.5 * (p[:-1] + p[1:]))))
        cum[-1] = 1.0
        for arr in (d, p, cum):
            arr.flags.writeable = False
        object.__setattr__(self, "durations", d)
        object.__setattr__(self, "densities", p)
        object.__setattr__(self, "_cum", cum)

    @classmethod
    def from_csv(cls, path) -> "Tabulated":
        """Load a two-column CSV with header (duration_s, density)."""
        durations, densities = [], []
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header[:2]] != ["duration_s", "density"]:
                raise ValidationError(
                    f"{path}: expected header 'duration_s,density', got {header}"
                )
            for lineno, row in enumerate(reader, start=2):
                if not row or all(not c.strip() for c in row):
                    continue
                try:
                    durations.append(float(row[0]))
                    densities.append(float(row[1]))
                except (ValueError, IndexError) as exc:
                    raise ValidationError(f"{path}:{lineno}: malformed row {row}") from exc
        return cls(np.array(durations), np.array(densities))

    @property
    def support(self):
        return (float(self.durations[0]), float(self.durations[-1]))

    @property
    def tail_bound(self) -> float:
        return float(self.durations[-1])

    @property
    def breakpoints(self):
        return tuple(self.durations[1:-1])

    def _pdf(self, i):
        return np.interp(i, self.durations, self.densities, left=0.0, right=0.0)

    def _cdf(self, i):
        d, p, cum = self.durations, self.densities, self._cum
        i = np.asarray(i, dtype=np.float64)
        seg = np.clip(np.searchsorted(d, i, side="right") - 1, 0, d.size - 2)
        x0 = d[seg]
        within = i - x0
        dens_here = np.interp(i, d, p)
        out = cum[seg] + 0.5 * (p[seg] + dens_here) * within
        out = np.where(i <= d[0], 0.0, out)
        out = np.where(i >= d[-1], 1.0, out)
        return np.clip(out, 0.0, 1.0)

    def _sample(self, n, rng):
        d, p, cum = self.durations, self.densities, self._cum
        u = rng.random(n)
        seg = np.clip(np.searchsorted(cum, u, side="right") - 1, 0, d.size - 2)
        h = d[seg + 1] - d[seg]
        slope = (p[seg + 1] - p[seg]) / h
        p0 = p[seg]
        residual = u - cum[seg]
        with np.errstate(divide="ignore", invalid="ignore"):
            disc = np.sqrt(np.maximum(p0 * p0 + 2.0 * slope * residual, 0.0))
            x_slope = (disc - p0) / slope
            x_flat = residual / np.where(p0 > 0.0, p0, 1.0)
        x = np.where(np.abs(slope) > 1e-300, x_slope, x_flat)
        return d[seg] + np.clip(x, 0.0, h)

    def describe(self) -> dict:
        return {
            "kind": "tabulated",
            "rows": int(self.durations.size),
            "support": [float(self.durations[0]), float(self.durations[-1])],
        }


# -- quadrature evaluation of ratio quantities -------------------------------

def _domain_hi(model) -> float:
    lo, hi = model.support
    return model.tail_bound if math.isinf(hi) else hi


def _q_pdf_quad(model, q: float, tol: float = _QUAD_TOL) -> float:
    """p_Q(q) by direct integration of t * p_I(t) * p_I(q t)."""
    lo, _ = model.support
    hi = _domain_hi(model)
    t_lo = max(lo, lo / q)
    t_hi = min(hi, hi / q)
    if not t_lo < t_hi:
        return 0.0
    knots = list(model.breakpoints) + [lo, hi]
    cuts = [k for k in knots] + [k / q for k in knots]

    def integrand(t):
        return t * model._pdf(t) * model._pdf(q * t)

    return integrate_adaptive(integrand, t_lo, t_hi, tol, breakpoints=cuts).value


def _q_cdf_quad(model, q: float, tol: float = _QUAD_TOL) -> float:
    """P_Q(q) via the single integral of p_I(t) * F_I(q t)."""
    lo, _ = model.support
    hi = _domain_hi(model)
    knots = list(model.breakpoints) + [lo, hi]
    cuts = [k / q for k in knots] + list(model.breakpoints)

    def integrand(t):
        return model._pdf(t) * model._cdf(q * t)

    value = integrate_adaptive(integrand, lo, hi, tol, breakpoints=cuts).value
    return min(max(value, 0.0), 1.0)


_GRID_CACHE: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def _cdf_grid(model):
    """Cached monotone interpolant of P_Q on the compactified axis u = q/(1+q)."""
    grid = _GRID_CACHE.get(model)
    if grid is None:
        u = np.linspace(0.0, 1.0, _GRID_SIZE)
        values = np.empty_like(u)
        values[0] = 0.0
        values[-1] = 1.0
        for k in range(1, u.size - 1):
            q = u[k] / (1.0 - u[k])
            values[k] = _q_cdf_quad(model, q)
        values = np.maximum.accumulate(np.clip(values, 0.0, 1.0))
        grid = PchipInterpolator(u, values)
        _GRID_CACHE[model] = grid
    return grid


def _grid_cdf(model, q):
    grid = _cdf_grid(model)
    q = np.asarray(q, dtype=np.float64)
    with np.errstate(invalid="ignore"):
        u = np.where(np.isinf(q), 1.0, q / (1.0 + q))
    return np.clip(grid(u), 0.0, 1.0)


def _grid_quantile(model, t):
    grid = _cdf_grid(model)
    q_lo, q_hi = model.q_support
    out = np.empty_like(t)
    for k, target in enumerate(t):
        if target <= 0.0:
            out[k] = q_lo
        elif target >= 1.0:
            out[k] = q_hi
        else:
            u = invert_monotone(grid, float(target), 0.0, 1.0, tol=1e-12)
            out[k] = u / (1.0 - u)
    return out


# -- the distribution facade --------------------------------------------------

_MODES = ("auto", "closed-form", "quadrature")


class RatioDistribution:
    """Ratio distribution induced by a null model under a ratio transform.

    Evaluation mode 'closed-form' uses the exact exponential/uniform
    formulas; 'quadrature' evaluates the defining integrals numerically
    (the independent route used to cross-check the closed forms); 'auto'
    picks closed forms when the model has them.
    """

    def __init__(self, model, transform=None, mode: str = "auto"):
        if mode not in _MODES:
            raise ValidationError(f"mode must be one of {_MODES}")
        if mode == "closed-form" and not model.has_closed_ratio_forms:
            raise ValidationError(
                f"model {model.describe()['kind']} has no closed ratio forms"
            )
        self.model = model
        self.transform = transform if transform is not None else StandardR()
        self.mode = (
            mode
            if mode != "auto"
            else ("closed-form" if model.has_closed_ratio_forms else "quadrature")
        )

    # q space
    def q_pdf(self, q):
        arr, scalar = _prepare(q, "q", lower=0.0, strict=True)
        if self.mode == "closed-form":
            out = self.model._q_pdf_closed(arr)
        else:
            out = np.array([_q_pdf_quad(self.model, float(v)) for v in arr])
        return _maybe_scalar(out, scalar)

    def q_cdf(self, q):
        arr, scalar = _prepare(q, "q", lower=0.0, strict=True)
        return _maybe_scalar(self._q_cdf_arr(arr), scalar)

    def _q_cdf_arr(self, arr):
        if self.mode == "closed-form":
            return self.model._q_cdf_closed(arr)
        return np.array([_q_cdf_quad(self.model, float(v)) for v in arr])

    # r space
    def r_pdf(self, r):
        arr, scalar = _prepare(r, "r", lower=0.0, upper=1.0, strict=True)
        return _maybe_scalar(self._r_pdf_arr(arr), scalar)

    def _r_pdf_arr(self, arr):
        if self.mode == "closed-form":
            return self.model._r_pdf_closed(arr)
        q = (1.0 - arr) / arr
        vals = np.array([_q_pdf_quad(self.model, float(v)) for v in q])
        return vals / (arr * arr)

    def r_cdf(self, r):
        arr, scalar = _prepare(r, "r", lower=0.0, upper=1.0, strict=True)
        return _maybe_scalar(self._r_cdf_arr(arr), scalar)

    def _r_cdf_arr(self, arr):
        if self.mode == "closed-form":
            return self.model._r_cdf_closed(arr)
        q = (1.0 - arr) / arr
        return 1.0 - self._q_cdf_arr(q)

    # transform (s) space
    @property
    def q_support(self):
        return self.model.q_support

    @property
    def r_support(self):
        return self.model.r_support

    @property
    def s_support(self):
        t = self.transform
        if t.kind == "q":
            return self.q_support
        if t.kind == "r":
            return self.r_support
        # Rescaled transforms map q through a CDF; at the q-support edges the
        # transform value is its own limit (from_q cannot take q=0 or inf).
        q_lo, q_hi = self.q_support
        if q_lo == 0.0:
            at_lo = 0.0 if t.increasing else 1.0
        else:
            at_lo = float(np.asarray(t.from_q(q_lo)))
        if math.isinf(q_hi):
            at_hi = 1.0 if t.increasing else 0.0
        else:
            at_hi = float(np.asarray(t.from_q(q_hi)))
        return (min(at_lo, at_hi), max(at_lo, at_hi))

    def s_pdf(self, s):
        t = self.transform
        if t.kind == "q":
            return self.q_pdf(s)
        if t.kind == "r":
            return self.r_pdf(s)
        arr, scalar = _prepare(s, "s", lower=0.0, upper=1.0, strict=True)
        q = np.asarray(t.to_q(arr), dtype=np.float64)
        dens = np.array(
            [
                self.q_pdf(float(v)) * float(t.abs_dq_ds(float(x)))
                if 0.0 < v < math.inf
                else 0.0
                for v, x in zip(q, arr)
            ]
        )
        return _maybe_scalar(dens, scalar)

    def s_cdf(self, s):
        t = self.transform
        if t.kind == "q":
            return self.q_cdf(s)
        if t.kind == "r":
            return self.r_cdf(s)
        arr, scalar = _prepare(s, "s", lower=0.0, upper=1.0, strict=True)
        return _maybe_scalar(self._s_cdf_arr(arr), scalar)

    def _s_cdf_arr(self, arr):
        t = self.transform
        if t.kind == "q":
            return self._q_cdf_arr(arr)
        if t.kind == "r":
            return self._r_cdf_arr(arr)
        q = np.asarray(t.to_q(arr), dtype=np.float64)
        probs = np.zeros_like(q)
        probs[np.isinf(q)] = 1.0
        inner = np.isfinite(q) & (q > 0.0)
        if np.any(inner):
            probs[inner] = self._q_cdf_arr(q[inner])
        return probs if t.increasing else 1.0 - probs

    def bin_mass(self, u: float, v: float) -> float:
        """Probability mass the null assigns to the ratio bin [u, v].

        The normalization constant that replaces bin width when counts are
        tested against this null; equals v - u exactly for an exponential
        null under the standard rhythm ratio.
        """
        lo, hi = self.transform.codomain
        if not (lo <= u < v <= hi):
            raise DomainError(f"bin [{u}, {v}] invalid for codomain ({lo}, {hi})")
        edges = np.array([u, v])
        if self.transform.kind == "q":
            cdf_vals = np.where(edges <= 0.0, 0.0, self._q_cdf_arr(np.maximum(edges, 1e-300)))
        elif self.transform.kind == "r":
            cdf_vals = self._bounded_cdf(edges, self._r_cdf_arr)
        else:
            cdf_vals = self._bounded_cdf(edges, self._s_cdf_arr)
        return float(cdf_vals[1] - cdf_vals[0])

    @staticmethod
    def _bounded_cdf(edges, fn):
        inner = np.clip(edges, 1e-300, 1.0 - 1e-16)
        vals = fn(inner)
        vals = np.where(edges <= 0.0, 0.0, vals)
        vals = np.where(edges >= 1.0, 1.0, vals)
        return vals

    def describe(self) -> dict:
        info = {
            "model": self.model.describe(),
            "transform": self.transform.describe(),
            "mode": self.mode,
        }
        lo, hi = self.model.support
        if math.isinf(hi):
            info["truncation_bound"] = self.model.tail_bound
        return info


def rescale_plus(model, q):
    """Ratio transform f+(q) = P_Q(q), increasing in q.

    Pushes ratios sampled under the model's null to uniform(0, 1); for an
    exponential model this is q/(1+q).
    """
    arr, scalar = _prepare(q, "q", lower=0.0, strict=True)
    return _maybe_scalar(np.asarray(model.ratio_q_cdf(arr), dtype=np.float64), scalar)


def rescale_minus(model, q):
    """Ratio transform f-(q) = 1 - P_Q(q), decreasing in q.

    For an exponential model this is 1/(1+q), the standard rhythm ratio.
    """
    arr, scalar = _prepare(q, "q", lower=0.0, strict=True)
    out = 1.0 - np.asarray(model.ratio_q_cdf(arr), dtype=np.float64)
    return _maybe_scalar(out, scalar)


def bin_mass_analytic(dist: RatioDistribution, u: float, v: float) -> float:
    """Analytic probability mass in the bin [u, v]; see RatioDistribution.bin_mass."""
    return dist.bin_mass(u, v)


def sample_sequence(model, n: int, rng, source_id: str = "sim") -> IntervalSequence:
    """Draw an i.i.d. interval sequence of length n from a null model."""
    if n < 2:
        raise DomainError(f"sequence length must be >= 2, got {n}")
    return IntervalSequence(model.sample(n, rng), source_id=source_id)
