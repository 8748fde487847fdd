"""Backend parity: compiled kernels and the numpy fallback must agree bit-for-bit."""

import os
import subprocess
import sys

import numpy as np
import pytest

from ratiokit._kernels import _fallback, get_backend

try:
    from ratiokit._kernels import _core
except ImportError:
    _core = None

needs_compiled = pytest.mark.skipif(_core is None, reason="compiled kernels not built")

rng = np.random.default_rng(2024)
INTERVALS = rng.exponential(1.0, 5000)
EDGES = np.array([0.4, 4 / 9, 0.5, 5 / 9, 0.6])


@needs_compiled
class TestParity:
    def test_ratio_values(self):
        assert np.array_equal(_core.ratio_r_values(INTERVALS), _fallback.ratio_r_values(INTERVALS))
        assert np.array_equal(_core.ratio_q_values(INTERVALS), _fallback.ratio_q_values(INTERVALS))

    def test_pair_hits(self):
        i1 = rng.exponential(1.0, 20000)
        i2 = rng.exponential(1.0, 20000)
        for lo, hi in [(0.4, 0.6), (0.0, 1.0), (0.5, 0.5000001)]:
            assert _core.pair_ratio_r_hits(i1, i2, lo, hi) == _fallback.pair_ratio_r_hits(i1, i2, lo, hi)
        for lo, hi in [(0.5, 2.0), (1e-9, 1.0)]:
            assert _core.pair_ratio_q_hits(i1, i2, lo, hi) == _fallback.pair_ratio_q_hits(i1, i2, lo, hi)

    def test_count_between_closed(self):
        x = rng.random(10000)
        assert _core.count_between_closed(x, 0.2, 0.8) == _fallback.count_between_closed(x, 0.2, 0.8)

    def test_bin_counts(self):
        x = rng.random(50000)
        assert np.array_equal(_core.bin_counts(x, EDGES), _fallback.bin_counts(x, EDGES))

    def test_bin_counts_with_exact_edge_values(self):
        x = np.array([0.4, 4 / 9, 0.5, 5 / 9, 0.6, 0.3, 0.9])
        assert np.array_equal(_core.bin_counts(x, EDGES), _fallback.bin_counts(x, EDGES))

    def test_sequence_r_bin_counts(self):
        iv = rng.uniform(0.1, 2.0, (50, 200))
        assert np.array_equal(
            _core.sequence_r_bin_counts(iv, EDGES), _fallback.sequence_r_bin_counts(iv, EDGES)
        )


class TestBinningSemantics:
    """Half-open [u, v) bins, final bin closed, out-of-layout dropped."""

    impl = _fallback

    def test_edge_placement(self):
        # 4/9 lands in the first on bin [4/9, 0.5), not the off bin below it.
        counts = self.impl.bin_counts(np.array([4 / 9]), EDGES)
        assert counts.tolist() == [0, 1, 0, 0]

    def test_final_edge_closed(self):
        counts = self.impl.bin_counts(np.array([0.6]), EDGES)
        assert counts.tolist() == [0, 0, 0, 1]

    def test_outside_dropped(self):
        counts = self.impl.bin_counts(np.array([0.39, 0.61, 0.2]), EDGES)
        assert counts.sum() == 0

    def test_interior_placement(self):
        counts = self.impl.bin_counts(np.array([0.41, 0.45, 0.5, 0.58]), EDGES)
        assert counts.tolist() == [1, 1, 1, 1]

    def test_sequence_counts_match_per_sequence(self):
        iv = rng.uniform(0.5, 1.5, (7, 40))
        batch = self.impl.sequence_r_bin_counts(iv, EDGES)
        for k in range(iv.shape[0]):
            r = self.impl.ratio_r_values(iv[k])
            assert np.array_equal(batch[k], self.impl.bin_counts(r, EDGES))


@needs_compiled
class TestBinningSemanticsCompiled(TestBinningSemantics):
    impl = _core


def test_backend_reports_name():
    assert get_backend() in ("compiled", "python")


def test_pure_python_env_forces_fallback():
    env = dict(os.environ, RATIOKIT_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import ratiokit; print(ratiokit.get_backend())"],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    assert out.stdout.strip() == "python"


@needs_compiled
def test_mc_estimate_identical_across_backends():
    """Sampling stays in numpy on both paths, so results match bit-for-bit."""
    code = (
        "from ratiokit import mc_bin_mass, Uniform, StandardR;"
        "e = mc_bin_mass(Uniform(0,1), StandardR(), 4/9, 0.5, n=100000, seed=7);"
        "print(repr((e.mass, e.n, e.std_error, e.seed)))"
    )
    results = []
    for force in ("0", "1"):
        env = dict(os.environ, RATIOKIT_PURE_PYTHON=force)
        out = subprocess.run(
            [sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True
        )
        results.append(out.stdout.strip())
    assert results[0] == results[1]
