import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from pseudosense import _kernels


def _random(shape, seed=0):
    return np.random.default_rng(seed).standard_normal(shape)


class TestSoftThreshold:
    def test_matches_scalar_formula(self, backend):
        x = _random((40, 30), seed=1)
        out = _kernels.soft_threshold_values(x, 0.3)
        expect = np.empty_like(x)
        for i in range(x.shape[0]):
            for j in range(x.shape[1]):
                v = x[i, j]
                expect[i, j] = np.sign(v) * max(abs(v) - 0.3, 0.0)
        np.testing.assert_array_equal(out, expect)

    def test_zero_threshold_is_identity(self, backend):
        x = _random((5, 7), seed=2)
        np.testing.assert_array_equal(_kernels.soft_threshold_values(x, 0.0), x)

    @settings(deadline=None, max_examples=50)
    @given(
        hnp.arrays(
            np.float64,
            hnp.array_shapes(min_dims=2, max_dims=2, max_side=8),
            elements=st.floats(-1e6, 1e6),
        ),
        st.floats(0.0, 10.0),
    )
    def test_shrinks_magnitudes(self, x, a):
        out = _kernels.soft_threshold_values(x, a)
        np.testing.assert_allclose(
            np.abs(out), np.maximum(np.abs(x) - a, 0.0), atol=1e-12
        )
        assert np.all(out * x >= 0)  # never flips sign


class TestThresholdSplit:
    def test_strict_inequality_at_boundary(self, backend):
        e = np.array([[0.5, -0.5, 0.5000001, -0.6, 0.0]])
        s, nnz = _kernels.threshold_split(e, 0.5)
        np.testing.assert_array_equal(s, [[0.0, 0.0, 0.5000001, -0.6, 0.0]])
        assert nnz == 2

    def test_matches_mask_oracle(self, backend):
        e = _random((25, 35), seed=3)
        s, nnz = _kernels.threshold_split(e, 0.8)
        mask = np.abs(e) > 0.8
        np.testing.assert_array_equal(s, np.where(mask, e, 0.0))
        assert nnz == int(mask.sum())
        assert isinstance(nnz, int)


class TestRms:
    def test_matches_numpy_oracle(self, backend):
        x = _random((12, 9), seed=4)
        assert _kernels.rms(x) == pytest.approx(
            float(np.sqrt(np.mean(x**2))), rel=1e-12
        )

    def test_constant_matrix(self, backend):
        assert _kernels.rms(np.full((3, 4), -2.0)) == pytest.approx(2.0)


class TestColumnCosines:
    def test_matches_per_column_oracle(self, backend):
        m = _random((10, 20), seed=5)
        v = _random(10, seed=6)
        out = _kernels.column_cosines(m, v)
        for j in range(m.shape[1]):
            c = m[:, j]
            expect = float(c @ v / (np.linalg.norm(c) * np.linalg.norm(v)))
            assert out[j] == pytest.approx(expect, abs=1e-12)

    def test_zero_column_yields_nan(self, backend):
        m = np.zeros((4, 3))
        m[:, 1] = 1.0
        v = np.ones(4)
        out = _kernels.column_cosines(m, v)
        assert np.isnan(out[0]) and np.isnan(out[2])
        assert out[1] == pytest.approx(1.0)

    def test_unit_cosine_for_parallel_column(self, backend):
        v = _random(6, seed=7)
        m = np.column_stack([3.0 * v, -v])
        out = _kernels.column_cosines(m, v)
        np.testing.assert_allclose(out, [1.0, -1.0], atol=1e-12)


class TestBackendSelection:
    def test_backends_agree(self):
        try:
            _kernels.set_backend("numba")
        except ImportError:
            pytest.skip("numba not installed")
        x = _random((30, 40), seed=8)
        v = _random(30, seed=9)
        results = {}
        for name in ("numba", "numpy"):
            _kernels.set_backend(name)
            results[name] = (
                _kernels.soft_threshold_values(x, 0.2),
                _kernels.threshold_split(x, 0.4)[0],
                _kernels.threshold_split(x, 0.4)[1],
                _kernels.rms(x),
                _kernels.column_cosines(x, v),
            )
        for a, b in zip(results["numba"], results["numpy"]):
            np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)

    def test_unknown_backend_rejected(self):
        with pytest.raises(ValueError, match="unknown kernel backend"):
            _kernels.set_backend("cuda")

    @pytest.mark.parametrize("flag,expected", [("0", "numpy"), ("1", "numba")])
    def test_env_var_controls_initial_backend(self, flag, expected):
        if expected == "numba":
            pytest.importorskip("numba")
        env = dict(os.environ, PSEUDOSENSE_NUMBA=flag)
        out = subprocess.run(
            [
                sys.executable,
                "-c",
                "from pseudosense import _kernels; print(_kernels.active_backend())",
            ],
            env=env,
            capture_output=True,
            text=True,
            check=True,
        )
        assert out.stdout.strip() == expected
