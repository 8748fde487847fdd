"""Interval and ratio primitives.

Converts onset times to inter-onset intervals and maps adjacent interval
pairs to scalar rhythm ratios.  Every transform here is a function of the
fraction q = i2/i1 alone, which makes it scale-invariant by construction:
rescaling both intervals by any positive constant leaves the ratio
unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DomainError, ValidationError

__all__ = [
    "OnsetSequence",
    "IntervalSequence",
    "FractionQ",
    "StandardR",
    "RescaledPlus",
    "RescaledMinus",
    "intervals_from_onsets",
    "ratio_q",
    "ratio_r",
    "sequence_ratios",
]


@dataclass(frozen=True)
class OnsetSequence:
    """Strictly increasing event times (seconds) from one display."""

    onsets: np.ndarray
    source_id: str = ""

    def __post_init__(self):
        arr = np.array(self.onsets, dtype=np.float64, copy=True)
        if arr.ndim != 1:
            raise ValidationError("onsets must be one-dimensional")
        if not np.all(np.isfinite(arr)):
            raise ValidationError(f"non-finite onset in sequence {self.source_id!r}")
        bad = np.nonzero(np.diff(arr) <= 0.0)[0]
        if bad.size:
            raise ValidationError(
                f"onsets not strictly increasing at index {bad[0] + 1} "
                f"in sequence {self.source_id!r}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "onsets", arr)

    def __len__(self) -> int:
        return self.onsets.size


@dataclass(frozen=True)
class IntervalSequence:
    """Ordered positive durations (seconds) from one display.

    At least two intervals are needed before ratios can be extracted
    (n intervals yield n - 1 ratios).
    """

    intervals: np.ndarray
    source_id: str = ""

    def __post_init__(self):
        arr = np.array(self.intervals, dtype=np.float64, copy=True)
        if arr.ndim != 1:
            raise ValidationError("intervals must be one-dimensional")
        if arr.size == 0:
            raise ValidationError("empty interval sequence")
        if not np.all(np.isfinite(arr)):
            raise ValidationError(f"non-finite interval in sequence {self.source_id!r}")
        bad = np.nonzero(arr <= 0.0)[0]
        if bad.size:
            raise ValidationError(
                f"non-positive interval {arr[bad[0]]} at index {bad[0]} "
                f"in sequence {self.source_id!r}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "intervals", arr)

    def __len__(self) -> int:
        return self.intervals.size


def intervals_from_onsets(onsets: OnsetSequence) -> IntervalSequence:
    """Successive differences of an onset sequence.

    Requires at least 3 onsets so the resulting intervals support ratio
    extraction downstream.
    """
    if len(onsets) < 3:
        raise ValidationError(
            f"need at least 3 onsets, got {len(onsets)} "
            f"in sequence {onsets.source_id!r}"
        )
    return IntervalSequence(np.diff(onsets.onsets), source_id=onsets.source_id)


def _check_pair(i1: float, i2: float) -> None:
    if not (i1 > 0.0 and i2 > 0.0):
        raise DomainError(f"intervals must be positive, got ({i1}, {i2})")


def ratio_q(i1: float, i2: float) -> float:
    """Direct fraction q = i2 / i1 of two adjacent intervals."""
    _check_pair(i1, i2)
    return i2 / i1


def ratio_r(i1: float, i2: float) -> float:
    """Rhythm ratio r = i1 / (i1 + i2), bounded in (0, 1).

    Equals 1/(1+q) with q = i2/i1; r = 0.5 means equal intervals, and
    inverse ratios m:n and n:m land symmetrically around 0.5.
    """
    _check_pair(i1, i2)
    return i1 / (i1 + i2)


class FractionQ:
    """Identity transform on q = i2/i1; codomain (0, inf)."""

    kind = "q"
    codomain = (0.0, np.inf)
    increasing = True
    label = "q"

    def from_pair(self, i1, i2):
        i1 = np.asarray(i1, dtype=np.float64)
        i2 = np.asarray(i2, dtype=np.float64)
        return i2 / i1

    def from_q(self, q):
        return np.asarray(q, dtype=np.float64)

    def to_q(self, s):
        return np.asarray(s, dtype=np.float64)

    def abs_dq_ds(self, s):
        return np.ones_like(np.asarray(s, dtype=np.float64))

    def describe(self) -> dict:
        return {"kind": self.kind}

    def __repr__(self):
        return "FractionQ()"

    def __eq__(self, other):
        return type(other) is FractionQ

    def __hash__(self):
        return hash("FractionQ")


class StandardR:
    """Rhythm ratio transform r = i1/(i1+i2) = 1/(1+q); codomain (0, 1)."""

    kind = "r"
    codomain = (0.0, 1.0)
    increasing = False
    label = "r"

    def from_pair(self, i1, i2):
        i1 = np.asarray(i1, dtype=np.float64)
        i2 = np.asarray(i2, dtype=np.float64)
        return i1 / (i1 + i2)

    def from_q(self, q):
        q = np.asarray(q, dtype=np.float64)
        return 1.0 / (1.0 + q)

    def to_q(self, s):
        s = np.asarray(s, dtype=np.float64)
        return (1.0 - s) / s

    def abs_dq_ds(self, s):
        s = np.asarray(s, dtype=np.float64)
        return 1.0 / (s * s)

    def describe(self) -> dict:
        return {"kind": self.kind}

    def __repr__(self):
        return "StandardR()"

    def __eq__(self, other):
        return type(other) is StandardR

    def __hash__(self):
        return hash("StandardR")


@dataclass(frozen=True)
class RescaledPlus:
    """Null-rescaled ratio s = P_Q(q): the model's own q-CDF.

    Monotonically increasing in q.  Under the model's null hypothesis the
    pushforward of q through this map is uniform on (0, 1), so bin width
    becomes a valid normalizer for that null.
    """

    model: object
    kind: str = field(default="rescale-plus", init=False)
    codomain = (0.0, 1.0)
    increasing = True
    label = "s+"

    def from_pair(self, i1, i2):
        i1 = np.asarray(i1, dtype=np.float64)
        i2 = np.asarray(i2, dtype=np.float64)
        return self.from_q(i2 / i1)

    def from_q(self, q):
        return self.model.ratio_q_cdf(q)

    def to_q(self, s):
        return self.model.ratio_q_quantile(s)

    def abs_dq_ds(self, s):
        return 1.0 / self.model.ratio_q_pdf(self.to_q(s))

    def describe(self) -> dict:
        return {"kind": self.kind, "model": self.model.describe()}


@dataclass(frozen=True)
class RescaledMinus:
    """Null-rescaled ratio s = 1 - P_Q(q), monotonically decreasing in q.

    For an exponential (Poisson) null this reduces to the standard rhythm
    ratio 1/(1+q).
    """

    model: object
    kind: str = field(default="rescale-minus", init=False)
    codomain = (0.0, 1.0)
    increasing = False
    label = "s-"

    def from_pair(self, i1, i2):
        i1 = np.asarray(i1, dtype=np.float64)
        i2 = np.asarray(i2, dtype=np.float64)
        return self.from_q(i2 / i1)

    def from_q(self, q):
        return 1.0 - self.model.ratio_q_cdf(q)

    def to_q(self, s):
        return self.model.ratio_q_quantile(1.0 - np.asarray(s, dtype=np.float64))

    def abs_dq_ds(self, s):
        return 1.0 / self.model.ratio_q_pdf(self.to_q(s))

    def describe(self) -> dict:
        return {"kind": self.kind, "model": self.model.describe()}


def sequence_ratios(seq: IntervalSequence, transform=None) -> np.ndarray:
    """Apply a ratio transform to each adjacent interval pair.

    Returns len(seq) - 1 ratio values; defaults to the standard rhythm
    ratio.
    """
    if transform is None:
        transform = StandardR()
    if len(seq) < 2:
        raise ValidationError(
            f"need at least 2 intervals for ratios, got {len(seq)} "
            f"in sequence {seq.source_id!r}"
        )
    if transform.kind == "r":
        return _kernels.ratio_r_values(seq.intervals)
    if transform.kind == "q":
        return _kernels.ratio_q_values(seq.intervals)
    return transform.from_q(_kernels.ratio_q_values(seq.intervals))
