"""Quadrature, monotone inversion, and the Monte Carlo mass estimator."""

import numpy as np
import pytest

from ratiokit import (
    DomainError,
    Exponential,
    HalfNormal,
    NonConvergenceError,
    RatioDistribution,
    StandardR,
    Tabulated,
    Uniform,
    integrate_adaptive,
    invert_monotone,
    mc_bin_mass,
    one_to_one_layout,
)


class TestIntegrateAdaptive:
    def test_constant(self):
        res = integrate_adaptive(lambda x: np.ones_like(x), 0.0, 1.0, tol=1e-10)
        assert res.value == pytest.approx(1.0, abs=1e-10)
        assert res.abs_error_estimate <= 1e-10
        assert res.panels_used >= 1

    def test_linear(self):
        res = integrate_adaptive(lambda x: x, 0.0, 2.0, tol=1e-10)
        assert res.value == pytest.approx(2.0, abs=1e-10)

    def test_poisson_q_density_long_tail(self):
        # Antiderivative -1/(1+q): integral over [0, 1e6] is 1 - 1/(1+1e6).
        res = integrate_adaptive(
            lambda q: 1.0 / (1.0 + q) ** 2,
            0.0,
            1e6,
            tol=1e-7,
            breakpoints=[1.0, 10.0, 100.0, 1e3, 1e4, 1e5],
        )
        assert res.value == pytest.approx(1.0, abs=1e-5)

    def test_kink_with_breakpoint(self):
        res = integrate_adaptive(lambda x: np.abs(x), -1.0, 1.0, tol=1e-12, breakpoints=[0.0])
        assert res.value == pytest.approx(1.0, abs=1e-12)

    def test_oscillatory(self):
        res = integrate_adaptive(lambda x: np.sin(x), 0.0, np.pi, tol=1e-10)
        assert res.value == pytest.approx(2.0, abs=1e-9)

    def test_non_convergence_carries_best_estimate(self):
        def needle(x):
            return 1.0 / np.sqrt(np.abs(x - 1.0 / 3.0) + 1e-14)

        with pytest.raises(NonConvergenceError) as err:
            integrate_adaptive(needle, 0.0, 1.0, tol=1e-12, max_panels=8)
        best = err.value.best
        assert best is not None
        assert best.panels_used == 8
        assert best.value > 0.0

    def test_bad_interval(self):
        with pytest.raises(DomainError):
            integrate_adaptive(lambda x: x, 1.0, 1.0)


class TestInvertMonotone:
    def test_square(self):
        x = invert_monotone(lambda x: x * x, 4.0, 0.0, 10.0, tol=1e-12)
        assert x == pytest.approx(2.0, abs=1e-6)

    def test_exponential_q_cdf(self):
        # Algebraic inverse of q/(1+q) is t/(1-t); at t=0.5 that is 1.0.
        x = invert_monotone(lambda q: q / (1.0 + q), 0.5, 0.0, 100.0, tol=1e-14)
        assert x == pytest.approx(1.0, abs=1e-9)

    def test_identity(self):
        assert invert_monotone(lambda x: x, 0.3, 0.0, 1.0) == pytest.approx(0.3, abs=1e-12)

    def test_decreasing(self):
        x = invert_monotone(lambda x: 1.0 - x, 0.25, 0.0, 1.0, tol=1e-14)
        assert x == pytest.approx(0.75, abs=1e-9)

    def test_target_outside_range(self):
        with pytest.raises(DomainError):
            invert_monotone(lambda x: x, 2.0, 0.0, 1.0)


ON_BIN = (4.0 / 9.0, 0.5)
OFF_BIN = (0.4, 4.0 / 9.0)


class TestMcBinMass:
    def test_total_mass(self):
        est = mc_bin_mass(Exponential(1.0), StandardR(), 0.0, 1.0, n=1000, seed=1)
        assert est.mass == 1.0
        assert est.std_error == 0.0

    def test_exponential_flat_off_bin(self):
        est = mc_bin_mass(Exponential(2.0), StandardR(), *OFF_BIN, n=10**6, seed=11)
        width = OFF_BIN[1] - OFF_BIN[0]
        assert abs(est.mass - width) <= 3.0 * est.std_error

    def test_uniform_on_bin_matches_analytic(self):
        est = mc_bin_mass(Uniform(0.0, 1.0), StandardR(), *ON_BIN, n=10**6, seed=12)
        assert abs(est.mass - 0.1) <= 3.0 * est.std_error

    def test_determinism_bit_for_bit(self):
        a = mc_bin_mass(HalfNormal(1.0), StandardR(), *ON_BIN, n=50_000, seed=99)
        b = mc_bin_mass(HalfNormal(1.0), StandardR(), *ON_BIN, n=50_000, seed=99)
        assert a == b

    def test_additivity_shared_stream(self):
        mid = 0.47
        lo, hi = 0.42, 0.55
        full = mc_bin_mass(Uniform(0.0, 1.0), StandardR(), lo, hi, n=200_000, seed=5)
        left = mc_bin_mass(Uniform(0.0, 1.0), StandardR(), lo, mid, n=200_000, seed=5)
        right = mc_bin_mass(Uniform(0.0, 1.0), StandardR(), mid, hi, n=200_000, seed=5)
        combined_se = np.hypot(left.std_error, right.std_error) + full.std_error
        assert abs(left.mass + right.mass - full.mass) <= 3.0 * combined_se

    def test_parallel_chunks_match_single_stream(self):
        single = mc_bin_mass(Uniform(0.0, 1.0), StandardR(), *ON_BIN, n=400_000, seed=21)
        chunked = mc_bin_mass(
            Uniform(0.0, 1.0), StandardR(), *ON_BIN, n=400_000, seed=21, n_chunks=4
        )
        assert abs(chunked.mass - single.mass) <= 4.0 * single.std_error

    def test_worker_count_does_not_change_result(self):
        serial = mc_bin_mass(
            Exponential(1.0), StandardR(), *ON_BIN, n=200_000, seed=3, n_chunks=4
        )
        threaded = mc_bin_mass(
            Exponential(1.0), StandardR(), *ON_BIN, n=200_000, seed=3, n_chunks=4, n_jobs=3
        )
        assert serial == threaded

    def test_invalid_bin_and_n(self):
        with pytest.raises(DomainError):
            mc_bin_mass(Exponential(1.0), StandardR(), 0.5, 0.4, n=10, seed=0)
        with pytest.raises(DomainError):
            mc_bin_mass(Exponential(1.0), StandardR(), 0.4, 0.5, n=0, seed=0)

    def test_fraction_q_bin(self):
        # P(q <= 1) = 0.5 by i.i.d. symmetry for any continuous model.
        from ratiokit import FractionQ

        est = mc_bin_mass(HalfNormal(1.0), FractionQ(), 1e-12, 1.0, n=200_000, seed=17)
        assert abs(est.mass - 0.5) <= 4.0 * est.std_error


def _tabulated_triangle():
    d = np.linspace(0.5, 2.5, 9)
    dens = np.minimum(d - 0.5, 2.5 - d)
    return Tabulated(d, dens)


class TestMcAgainstAnalyticOracle:
    """|mc - analytic| <= 4 standard errors per bin at n = 1e6, 20 bins."""

    @pytest.mark.parametrize(
        "model",
        [Exponential(1.0), Uniform(0.0, 1.0), HalfNormal(1.0), _tabulated_triangle()],
        ids=["exponential", "uniform", "halfnormal", "tabulated"],
    )
    def test_one_to_one_bins_and_wide_bin(self, model):
        layout = one_to_one_layout()
        dist = RatioDistribution(model, StandardR())
        bins = [(float(u), float(v)) for u, v, _ in layout.bins()]
        bins.append((0.25, 0.75))
        for k, (u, v) in enumerate(bins):
            analytic = dist.bin_mass(u, v)
            est = mc_bin_mass(model, StandardR(), u, v, n=10**6, seed=1000 + k)
            assert abs(est.mass - analytic) <= 4.0 * max(est.std_error, 1e-12), (
                f"{model.describe()['kind']} bin [{u}, {v}]: "
                f"mc {est.mass} vs analytic {analytic}"
            )
