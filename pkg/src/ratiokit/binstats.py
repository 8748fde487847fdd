"""Bin layouts around integer-ratio anchors and the on/off-bin statistics.

A layout carves the ratio axis around an anchor like 1:1 into on-ratio and
off-ratio bins.  Bin counts are normalized as m / (N * w) where w is either
the bin width (implicitly a Poisson null) or the probability mass a chosen
null model assigns to the bin.  Per-sequence on/off normalized counts are
then compared with a Wilcoxon signed-rank test; whole ratio samples can be
compared to a null CDF with a one-sample Kolmogorov-Smirnov test.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np
from scipy.special import kolmogorov, log_ndtr, ndtr
from scipy.stats import rankdata

from . import _kernels
from .errors import DomainError, ValidationError
from .numerics import mc_bin_mass
from .nulls import RatioDistribution
from .ratios import StandardR

__all__ = [
    "BinRole",
    "BinLayout",
    "BinWidth",
    "ModelMass",
    "NormalizedCounts",
    "CombinedCounts",
    "TestReport",
    "one_to_one_layout",
    "thirds_layout",
    "count_bins",
    "resolve_normalizers",
    "apply_normalizers",
    "normalize_counts",
    "combine_off_bins",
    "wilcoxon_signed_rank",
    "ks_test",
    "paired_experiment",
]

_LN10 = math.log(10.0)


class BinRole(enum.Enum):
    ON = "on"
    OFF = "off"


@dataclass(frozen=True, eq=False)
class BinLayout:
    """Ordered ratio-space bin edges with on/off roles around an anchor."""

    anchor: tuple[int, int]
    edges: np.ndarray
    roles: tuple[BinRole, ...]

    def __post_init__(self):
        m, n = self.anchor
        if m < 1 or n < 1:
            raise ValidationError(f"anchor must be positive integers, got {self.anchor}")
        edges = np.array(self.edges, dtype=np.float64)
        if edges.ndim != 1 or edges.size < 3:
            raise ValidationError("need at least 3 edges (2 bins)")
        if np.any(np.diff(edges) <= 0.0):
            raise ValidationError(f"edges must be strictly increasing: {edges}")
        if edges[0] <= 0.0 or edges[-1] >= 1.0:
            raise ValidationError(f"edges must lie inside (0, 1): {edges}")
        if len(self.roles) != edges.size - 1:
            raise ValidationError("need one role per bin")
        if BinRole.ON not in self.roles or BinRole.OFF not in self.roles:
            raise ValidationError("layout needs at least one on and one off bin")
        r = self.anchor_r
        covered = any(
            edges[k] <= r <= edges[k + 1]
            for k in range(edges.size - 1)
            if self.roles[k] is BinRole.ON
        )
        if not covered:
            raise ValidationError(f"anchor r={r} outside the on-ratio bins")
        edges.flags.writeable = False
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "roles", tuple(self.roles))

    @property
    def anchor_r(self) -> float:
        m, n = self.anchor
        return m / (m + n)

    @property
    def label(self) -> str:
        return f"{self.anchor[0]}:{self.anchor[1]}"

    @property
    def n_bins(self) -> int:
        return self.edges.size - 1

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    def bins(self):
        """Iterate (lo, hi, role) per bin."""
        for k in range(self.n_bins):
            yield float(self.edges[k]), float(self.edges[k + 1]), self.roles[k]

    def describe(self) -> dict:
        return {
            "anchor": self.label,
            "anchor_r": self.anchor_r,
            "edges": [float(e) for e in self.edges],
            "roles": [role.value for role in self.roles],
        }


def one_to_one_layout() -> BinLayout:
    """The conventional bins around the 1:1 ratio.

    Two on-ratio bins [4/9, 1/2] and [1/2, 5/9] flanked by the off-ratio
    bins [2/5, 4/9] and [5/9, 3/5]; edge values follow the published 1:1
    analysis convention.
    """
    return BinLayout(
        anchor=(1, 1),
        edges=np.array([2 / 5, 4 / 9, 1 / 2, 5 / 9, 3 / 5]),
        roles=(BinRole.OFF, BinRole.ON, BinRole.ON, BinRole.OFF),
    )


def thirds_layout(anchors) -> list[BinLayout]:
    """Equal-thirds layouts for a list of integer-ratio anchors.

    The gap between neighboring anchors is split into three equal parts:
    the third adjacent to an anchor is its on-ratio zone, the middle third
    its off-ratio zone.  Boundary anchors mirror their single neighbor's
    gap.  For anchors {1:2, 1:1} this reproduces the conventional 1:1
    on-edge at 4/9 (the outer off-edge differs from the 1:1 convention's
    0.4; see one_to_one_layout).
    """
    anchors = [(int(m), int(n)) for m, n in anchors]
    if len(anchors) < 2:
        raise ValidationError("need at least 2 anchors")
    positions = []
    for m, n in anchors:
        if m < 1 or n < 1:
            raise ValidationError(f"anchor must be positive integers, got {m}:{n}")
        positions.append((Fraction(m, m + n), (m, n)))
    positions.sort(key=lambda pair: pair[0])
    values = [p for p, _ in positions]
    if len(set(values)) != len(values):
        raise ValidationError(f"duplicate anchors (equal anchor_r): {anchors}")

    layouts = []
    for k, (r, anchor) in enumerate(positions):
        gap_left = r - values[k - 1] if k > 0 else None
        gap_right = values[k + 1] - r if k < len(values) - 1 else None
        if gap_left is None:
            gap_left = gap_right
        if gap_right is None:
            gap_right = gap_left
        edges = [
            r - 2 * gap_left / 3,
            r - gap_left / 3,
            r,
            r + gap_right / 3,
            r + 2 * gap_right / 3,
        ]
        layouts.append(
            BinLayout(
                anchor=anchor,
                edges=np.array([float(e) for e in edges]),
                roles=(BinRole.OFF, BinRole.ON, BinRole.ON, BinRole.OFF),
            )
        )
    return layouts


class BinWidth:
    """Normalize counts by bin width (the implicit Poisson-null convention)."""

    kind = "width"

    def describe(self) -> dict:
        return {"kind": self.kind}

    def __repr__(self):
        return "BinWidth()"


@dataclass(frozen=True)
class ModelMass:
    """Normalize counts by the probability mass a null model puts in each bin.

    method 'analytic' integrates the null ratio density; 'mc' runs the
    Monte Carlo estimator with ``n`` pair draws per bin (per-bin seeds
    derived from ``seed``).
    """

    model: object
    transform: object = field(default_factory=StandardR)
    method: str = "analytic"
    n: int = 10**6
    seed: int | None = None

    def __post_init__(self):
        if self.method not in ("analytic", "mc"):
            raise ValidationError(f"method must be 'analytic' or 'mc', got {self.method}")

    @property
    def kind(self) -> str:
        return f"model-mass-{self.method}"

    def describe(self) -> dict:
        info = {
            "kind": self.kind,
            "model": self.model.describe(),
            "transform": self.transform.describe(),
        }
        if self.method == "mc":
            info["n"] = self.n
            info["seed"] = self.seed
        return info


def _seed_int(seed_seq: np.random.SeedSequence) -> int:
    return int(seed_seq.generate_state(1, np.uint64)[0])


def resolve_normalizers(layout: BinLayout, normalizer):
    """Per-bin normalizer values for a layout; returns (values, metadata)."""
    if isinstance(normalizer, BinWidth):
        return layout.widths.copy(), {"kind": "width"}
    if not isinstance(normalizer, ModelMass):
        raise ValidationError(f"unknown normalizer {normalizer!r}")
    meta = normalizer.describe()
    if normalizer.method == "analytic":
        dist = RatioDistribution(normalizer.model, normalizer.transform)
        values = np.array([dist.bin_mass(u, v) for u, v, _ in layout.bins()])
        return values, meta
    seed = normalizer.seed
    if seed is None:
        seed = _seed_int(np.random.SeedSequence())
    children = np.random.SeedSequence(seed).spawn(layout.n_bins)
    estimates = [
        mc_bin_mass(
            normalizer.model,
            normalizer.transform,
            u,
            v,
            n=normalizer.n,
            seed=_seed_int(child),
        )
        for (u, v, _), child in zip(layout.bins(), children)
    ]
    meta["seed"] = seed
    meta["std_errors"] = [est.std_error for est in estimates]
    meta["bin_seeds"] = [est.seed for est in estimates]
    return np.array([est.mass for est in estimates]), meta


@dataclass
class NormalizedCounts:
    """Per-bin raw counts and, after normalization, m / (N * normalizer)."""

    layout: BinLayout
    counts: np.ndarray
    n_total: int
    normalizers: np.ndarray | None = None
    values: np.ndarray | None = None
    normalizer_meta: dict | None = None

    def describe(self) -> dict:
        out = {
            "layout": self.layout.describe(),
            "counts": [int(c) for c in self.counts],
            "n_total": int(self.n_total),
        }
        if self.normalizers is not None:
            out["normalizers"] = [float(w) for w in self.normalizers]
            out["normalized"] = [float(v) for v in self.values]
            out["normalizer_meta"] = self.normalizer_meta
        return out


@dataclass
class CombinedCounts:
    """On/off rollup of a normalized count set (merged on and off bins)."""

    on_count: int
    off_count: int
    n_total: int
    on_normalizer: float
    off_normalizer: float
    on_value: float
    off_value: float

    def describe(self) -> dict:
        return {
            "on": {"count": self.on_count, "normalizer": self.on_normalizer, "value": self.on_value},
            "off": {"count": self.off_count, "normalizer": self.off_normalizer, "value": self.off_value},
            "n_total": self.n_total,
        }


def count_bins(ratios, layout: BinLayout) -> NormalizedCounts:
    """Raw per-bin counts with half-open [u, v) bins (final bin closed).

    N is the total number of input ratios; ratios outside the layout stay
    in N but are not counted in any bin.
    """
    arr = np.ascontiguousarray(ratios, dtype=np.float64)
    if arr.size == 0:
        raise ValidationError("empty ratio list")
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError("ratios must lie inside (0, 1)")
    counts = _kernels.bin_counts(arr, layout.edges)
    return NormalizedCounts(layout=layout, counts=counts, n_total=int(arr.size))


def apply_normalizers(counts: NormalizedCounts, values, meta=None) -> NormalizedCounts:
    """Attach precomputed per-bin normalizer values to raw counts."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (counts.layout.n_bins,):
        raise ValidationError("need one normalizer value per bin")
    if np.any(values <= 0.0):
        k = int(np.argmin(values))
        raise ValidationError(f"normalizer for bin {k} is {values[k]}; cannot normalize")
    return NormalizedCounts(
        layout=counts.layout,
        counts=counts.counts,
        n_total=counts.n_total,
        normalizers=values,
        values=counts.counts / (counts.n_total * values),
        normalizer_meta=meta or {},
    )


def normalize_counts(counts: NormalizedCounts, normalizer) -> NormalizedCounts:
    """Attach per-bin normalizers and the normalized values m / (N * w).

    With ``BinWidth`` the normalizer is v - u; with ``ModelMass`` it is the
    null model's bin mass (for an exponential null under the standard ratio
    the two coincide).
    """
    values, meta = resolve_normalizers(counts.layout, normalizer)
    return apply_normalizers(counts, values, meta)


def combine_off_bins(counts: NormalizedCounts) -> CombinedCounts:
    """Merge all off bins (and all on bins): summed counts over summed mass.

    The combined value sum(m) / (N * sum(w)) equals the mass-weighted
    average of the per-bin normalized values.
    """
    if counts.normalizers is None:
        raise ValidationError("normalize_counts must run before combining")
    roles = counts.layout.roles
    on = [k for k, role in enumerate(roles) if role is BinRole.ON]
    off = [k for k, role in enumerate(roles) if role is BinRole.OFF]
    on_count = int(counts.counts[on].sum())
    off_count = int(counts.counts[off].sum())
    on_norm = float(counts.normalizers[on].sum())
    off_norm = float(counts.normalizers[off].sum())
    n = counts.n_total
    return CombinedCounts(
        on_count=on_count,
        off_count=off_count,
        n_total=n,
        on_normalizer=on_norm,
        off_normalizer=off_norm,
        on_value=on_count / (n * on_norm),
        off_value=off_count / (n * off_norm),
    )


@dataclass(frozen=True)
class TestReport:
    """Outcome of a statistical test, with a log-safe p-value."""

    method: str
    statistic: float
    n_effective: int
    p_value: float
    log10_p: float
    seed: int | None = None
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "statistic": self.statistic,
            "n_effective": self.n_effective,
            "p_value": self.p_value,
            "log10_p": self.log10_p,
            "seed": self.seed,
            "metadata": self.metadata,
        }


def _exact_signed_rank_p(scaled_ranks: np.ndarray, scaled_t: int) -> float:
    """Two-sided exact p over all sign patterns of the observed ranks.

    ``scaled_ranks`` are the |d| ranks times 2 (integers even with average
    ranks for ties); the null distribution of 2*W+ is built by convolution,
    and by its symmetry the two-sided p is 2 * P(W+ <= T).
    """
    total = int(scaled_ranks.sum())
    pmf = np.zeros(total + 1)
    pmf[0] = 1.0
    for t in scaled_ranks:
        shifted = np.zeros_like(pmf)
        shifted[t:] = pmf[:-t] if t > 0 else pmf
        pmf = pmf + shifted
    below = pmf[: scaled_t + 1].sum()
    return min(1.0, 2.0 * below / 2.0 ** len(scaled_ranks))


def _normal_approx_p(t_stat: float, n: int, tie_counts: np.ndarray):
    """Two-sided p for T = min(W+, W-) by normal approximation.

    Tie-corrected variance, continuity correction toward the mean, and the
    log10 p-value computed in log space.  Returns (p, log10_p, z).
    """
    mean = n * (n + 1) / 4.0
    tie_term = float(np.sum(tie_counts**3 - tie_counts))
    var = (n * (n + 1) * (2 * n + 1) - tie_term / 2.0) / 24.0
    sigma = math.sqrt(var)
    z = (t_stat - mean + 0.5) / sigma
    p = min(1.0, 2.0 * float(ndtr(z)))
    log10_p = min(0.0, (math.log(2.0) + float(log_ndtr(z))) / _LN10)
    return p, log10_p, z


def wilcoxon_signed_rank(on_values, off_values) -> TestReport:
    """Two-sided Wilcoxon signed-rank test on paired on/off values.

    Differences d = on - off; zero differences are dropped (their count is
    recorded in the report metadata).  The statistic is T = min(W+, W-).
    For n <= 25 usable pairs the p-value is exact over all 2^n sign
    patterns; above that a normal approximation with tie-corrected variance
    and continuity correction is used, with log10_p evaluated in log space
    so extreme significance never silently underflows.
    """
    on = np.asarray(on_values, dtype=np.float64)
    off = np.asarray(off_values, dtype=np.float64)
    if on.shape != off.shape or on.ndim != 1:
        raise ValidationError("on/off values must be 1-d arrays of equal length")
    d = on - off
    if not np.all(np.isfinite(d)):
        raise ValidationError("differences must be finite")
    n_zero = int(np.count_nonzero(d == 0.0))
    d = d[d != 0.0]
    n = d.size
    if n < 5:
        raise ValidationError(f"need at least 5 non-zero differences, got {n}")

    ranks = rankdata(np.abs(d), method="average")
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    t_stat = min(w_plus, w_minus)
    _, tie_counts = np.unique(np.abs(d), return_counts=True)

    metadata = {
        "w_plus": w_plus,
        "w_minus": w_minus,
        "n_zero_dropped": n_zero,
        "has_ties": bool(np.any(tie_counts > 1)),
    }

    if n <= 25:
        scaled = np.rint(2.0 * ranks).astype(np.int64)
        p = _exact_signed_rank_p(scaled, int(round(2.0 * t_stat)))
        log10_p = math.log10(p)
        metadata["p_method"] = "exact"
    else:
        p, log10_p, z = _normal_approx_p(t_stat, n, tie_counts)
        metadata["p_method"] = "normal-approx"
        metadata["z"] = z

    return TestReport(
        method="wilcoxon_signed_rank",
        statistic=t_stat,
        n_effective=n,
        p_value=p,
        log10_p=log10_p,
        metadata=metadata,
    )


def ks_test(ratios, null_cdf) -> TestReport:
    """One-sample two-sided Kolmogorov-Smirnov test against a null ratio CDF.

    D = sup |F_emp - F_null|; the p-value uses the asymptotic Kolmogorov
    distribution of sqrt(n) * D.
    """
    x = np.sort(np.asarray(ratios, dtype=np.float64))
    n = x.size
    if n < 5:
        raise ValidationError(f"need at least 5 ratios, got {n}")
    try:
        f_null = np.asarray(null_cdf(x), dtype=np.float64)
        if f_null.shape != x.shape:
            raise TypeError
    except (TypeError, ValueError):
        f_null = np.array([float(null_cdf(v)) for v in x])
    if np.any(np.diff(f_null) < -1e-12) or f_null[0] < -1e-12 or f_null[-1] > 1 + 1e-12:
        raise ValidationError("null_cdf is not a monotone CDF on the sample")

    grid = np.arange(1, n + 1) / n
    d_plus = float(np.max(grid - f_null))
    d_minus = float(np.max(f_null - (grid - 1.0 / n)))
    statistic = max(d_plus, d_minus, 0.0)

    arg = math.sqrt(n) * statistic
    p = float(kolmogorov(arg))
    if p > 1e-300:
        log10_p = math.log10(p) if p < 1.0 else 0.0
    else:
        # First term of the Kolmogorov series, in log space.
        log10_p = (math.log(2.0) - 2.0 * arg * arg) / _LN10
    return TestReport(
        method="kolmogorov_smirnov",
        statistic=statistic,
        n_effective=n,
        p_value=p,
        log10_p=log10_p,
        metadata={"d_plus": d_plus, "d_minus": d_minus},
    )


def _sequence_bin_counts(model, transform, layout, n_sequences, seq_len, seed_seq):
    """Per-sequence bin counts; sequences drawn with per-sequence child seeds."""
    children = seed_seq.spawn(n_sequences)
    intervals = np.empty((n_sequences, seq_len))
    for k, child in enumerate(children):
        intervals[k] = model.sample(seq_len, np.random.default_rng(child))
    if transform.kind == "r":
        return _kernels.sequence_r_bin_counts(intervals, layout.edges)
    values = transform.from_q(intervals[:, 1:] / intervals[:, :-1])
    counts = np.empty((n_sequences, layout.n_bins), dtype=np.int64)
    for k in range(n_sequences):
        counts[k] = _kernels.bin_counts(values[k], layout.edges)
    return counts


def paired_experiment(
    model,
    transform,
    layout: BinLayout,
    normalizer,
    n_sequences: int,
    seq_len: int,
    seed=None,
    *,
    combine_off: bool = True,
) -> TestReport:
    """Simulate sequences under a model and test on- vs off-ratio counts.

    Each of ``n_sequences`` sequences of ``seq_len`` intervals is drawn
    with a per-sequence seed derived from ``seed``, its ratios are binned
    on ``layout`` and normalized, and the per-sequence on/off values feed a
    Wilcoxon signed-rank test.  With ``combine_off=False`` each off bin is
    paired separately against the combined on value instead of merging the
    off bins first.
    """
    if n_sequences < 5:
        raise ValidationError("need at least 5 sequences")
    if seq_len < 3:
        raise ValidationError("need sequences of at least 3 intervals")
    if isinstance(seed, np.random.SeedSequence):
        seed_seq = seed
        seed_label = _seed_int(seed)
    else:
        if seed is None:
            seed = _seed_int(np.random.SeedSequence())
        seed_seq = np.random.SeedSequence(seed)
        seed_label = int(seed)

    if (
        isinstance(normalizer, ModelMass)
        and normalizer.method == "mc"
        and normalizer.seed is None
    ):
        # Derive the estimator seed from the experiment seed so the whole
        # run is reproducible from one number.
        normalizer = replace(normalizer, seed=_seed_int(seed_seq.spawn(1)[0]))
    norm_values, norm_meta = resolve_normalizers(layout, normalizer)
    if np.any(norm_values <= 0.0):
        raise ValidationError("normalizer assigns zero mass to a bin")

    counts = _sequence_bin_counts(model, transform, layout, n_sequences, seq_len, seed_seq)
    n_ratios = seq_len - 1
    roles = layout.roles
    on_idx = [k for k, role in enumerate(roles) if role is BinRole.ON]
    off_idx = [k for k, role in enumerate(roles) if role is BinRole.OFF]

    on_values = counts[:, on_idx].sum(axis=1) / (n_ratios * norm_values[on_idx].sum())
    if combine_off:
        off_values = counts[:, off_idx].sum(axis=1) / (n_ratios * norm_values[off_idx].sum())
        pairs_on, pairs_off = on_values, off_values
    else:
        per_off = [counts[:, k] / (n_ratios * norm_values[k]) for k in off_idx]
        pairs_on = np.concatenate([on_values] * len(per_off))
        pairs_off = np.concatenate(per_off)

    report = wilcoxon_signed_rank(pairs_on, pairs_off)
    metadata = dict(report.metadata)
    metadata.update(
        {
            "model": model.describe(),
            "transform": transform.describe(),
            "layout": layout.describe(),
            "normalizer": norm_meta,
            "normalizer_values": [float(w) for w in norm_values],
            "n_sequences": n_sequences,
            "seq_len": seq_len,
            "combine_off": combine_off,
        }
    )
    return TestReport(
        method=report.method,
        statistic=report.statistic,
        n_effective=report.n_effective,
        p_value=report.p_value,
        log10_p=report.log10_p,
        seed=seed_label,
        metadata=metadata,
    )
