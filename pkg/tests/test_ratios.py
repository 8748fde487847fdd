"""Ratio primitives: sequences, transforms, and their invariants."""

import numpy as np
import pytest

from ratiokit import (
    DomainError,
    Exponential,
    FractionQ,
    IntervalSequence,
    OnsetSequence,
    RescaledMinus,
    RescaledPlus,
    StandardR,
    Uniform,
    ValidationError,
    intervals_from_onsets,
    ratio_q,
    ratio_r,
    sequence_ratios,
)


class TestIntervalsFromOnsets:
    def test_successive_differences(self):
        seq = intervals_from_onsets(OnsetSequence([0.0, 1.0, 3.0, 4.0]))
        assert seq.intervals.tolist() == [1.0, 2.0, 1.0]

    def test_too_short(self):
        with pytest.raises(ValidationError):
            intervals_from_onsets(OnsetSequence([0.0, 0.5]))

    def test_non_increasing_reports_index(self):
        with pytest.raises(ValidationError, match="index 1"):
            OnsetSequence([2.0, 2.0, 3.0])

    def test_source_id_propagates(self):
        seq = intervals_from_onsets(OnsetSequence([0.0, 1.0, 2.0], source_id="a"))
        assert seq.source_id == "a"


class TestIntervalSequence:
    def test_rejects_zero_interval(self):
        with pytest.raises(ValidationError, match="index 1"):
            IntervalSequence([1.0, 0.0, 2.0])

    def test_rejects_negative(self):
        with pytest.raises(ValidationError):
            IntervalSequence([1.0, -0.5])

    def test_immutable_and_detached(self):
        src = np.array([1.0, 2.0])
        seq = IntervalSequence(src)
        src[0] = 99.0
        assert seq.intervals[0] == 1.0
        with pytest.raises(ValueError):
            seq.intervals[0] = 5.0


class TestRatioOps:
    def test_ratio_r_values(self):
        assert ratio_r(1.0, 1.0) == 0.5
        assert ratio_r(3.0, 1.0) == 0.75
        assert ratio_r(1.0, 2.0) == pytest.approx(1.0 / 3.0, rel=1e-15)

    def test_ratio_q_values(self):
        assert ratio_q(1.0, 1.0) == 1.0
        assert ratio_q(2.0, 1.0) == 0.5
        assert ratio_q(1.0, 3.0) == 3.0

    def test_non_positive_rejected(self):
        for bad in [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0)]:
            with pytest.raises(DomainError):
                ratio_r(*bad)
            with pytest.raises(DomainError):
                ratio_q(*bad)

    def test_sequence_ratios(self):
        iso = IntervalSequence([1.0, 1.0, 1.0, 1.0])
        assert sequence_ratios(iso, StandardR()).tolist() == [0.5, 0.5, 0.5]
        seq = IntervalSequence([1.0, 2.0, 1.0])
        np.testing.assert_allclose(sequence_ratios(seq, StandardR()), [1 / 3, 2 / 3], rtol=1e-15)
        assert sequence_ratios(seq, FractionQ()).tolist() == [2.0, 0.5]

    def test_sequence_too_short(self):
        with pytest.raises(ValidationError):
            sequence_ratios(IntervalSequence([1.0]), StandardR())

    def test_default_transform_is_standard_r(self):
        seq = IntervalSequence([1.0, 2.0, 1.0])
        np.testing.assert_array_equal(sequence_ratios(seq), sequence_ratios(seq, StandardR()))


class TestInvariants:
    """Seeded property checks over random interval pairs."""

    pairs = np.random.default_rng(7).uniform(0.01, 100.0, size=(500, 2))

    @pytest.mark.parametrize("c", [1e-6, 0.37, 1.0, 42.0, 1e6])
    def test_scale_invariance(self, c):
        for i1, i2 in self.pairs[:100]:
            assert ratio_r(c * i1, c * i2) == pytest.approx(ratio_r(i1, i2), rel=1e-12)
            assert ratio_q(c * i1, c * i2) == pytest.approx(ratio_q(i1, i2), rel=1e-12)

    def test_boundedness(self):
        for i1, i2 in self.pairs:
            assert 0.0 < ratio_r(i1, i2) < 1.0

    def test_inverse_symmetry(self):
        for i1, i2 in self.pairs:
            assert ratio_r(i1, i2) + ratio_r(i2, i1) == pytest.approx(1.0, abs=1e-12)

    def test_monotone_decreasing_in_q(self):
        rng = np.random.default_rng(11)
        q = np.sort(rng.uniform(0.01, 50.0, 200))
        r = StandardR().from_q(q)
        assert np.all(np.diff(r) < 0.0)


class TestRescaledTransforms:
    def test_exponential_minus_equals_standard_r(self):
        model = Exponential(1.3)
        q = np.random.default_rng(3).uniform(0.01, 20.0, 200)
        np.testing.assert_allclose(
            RescaledMinus(model).from_q(q), StandardR().from_q(q), rtol=1e-14
        )

    def test_complement(self):
        model = Uniform(0.0, 1.0)
        q = np.linspace(0.05, 5.0, 50)
        total = RescaledPlus(model).from_q(q) + RescaledMinus(model).from_q(q)
        np.testing.assert_allclose(total, 1.0, atol=1e-15)

    def test_monotonicity(self):
        model = Uniform(1.0, 3.0)
        q = np.linspace(0.4, 2.9, 100)
        plus = RescaledPlus(model).from_q(q)
        minus = RescaledMinus(model).from_q(q)
        assert np.all(np.diff(plus) >= 0.0)
        assert np.all(np.diff(minus) <= 0.0)

    def test_round_trip_through_inverse(self):
        model = Uniform(1.0, 2.0)
        t = RescaledPlus(model)
        q = np.linspace(0.55, 1.9, 25)
        np.testing.assert_allclose(t.to_q(t.from_q(q)), q, rtol=1e-9)

    def test_from_pair_matches_from_q(self):
        model = Exponential(2.0)
        t = RescaledPlus(model)
        assert t.from_pair(2.0, 3.0) == pytest.approx(float(t.from_q(1.5)), rel=1e-15)
