import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudosense.decompose import (
    Decomposition,
    SolverConfig,
    components_of,
    estimate_sigma,
    exrpca_convex,
    exrpca_iterative,
    load_decomposition,
    pca_decompose,
    save_decomposition,
    singular_value_threshold,
    soft_threshold,
)
from pseudosense.diffmatrix import build_diff_matrix
from pseudosense.synth import generate_planted, generate_toy_store


def _rand(shape, seed=0):
    return np.random.default_rng(seed).standard_normal(shape)


# -- oracles ------------------------------------------------------------------

def svt_oracle(x: np.ndarray, a: float) -> np.ndarray:
    """Independent singular-value shrinkage: scalar loop over the spectrum."""
    u, s, vt = np.linalg.svd(x, full_matrices=False)
    shrunk = np.array([max(v - a, 0.0) for v in s])
    return u @ np.diag(shrunk) @ vt


def principal_angle_deg(a: np.ndarray, b: np.ndarray) -> float:
    """Largest principal angle between the column spaces of a and b."""
    qa, _ = np.linalg.qr(a)
    qb, _ = np.linalg.qr(b)
    s = np.linalg.svd(qa.T @ qb, compute_uv=False)
    return float(np.degrees(np.arccos(np.clip(s.min(), -1.0, 1.0))))


def support_scores(sparse, truth, salience=0.0):
    found = np.abs(sparse) > salience
    tp = int((found & truth).sum())
    precision = tp / max(int(found.sum()), 1)
    recall = tp / max(int(truth.sum()), 1)
    return precision, recall


PLANTED = dict(
    d_dim=40, n_cols=200, rank=3, sparse_density=0.01,
    sparse_magnitude=0.2, sigma=0.01,
)


class TestOperators:
    def test_soft_threshold_matches_oracle(self):
        x = _rand((8, 9), seed=1)
        expect = np.sign(x) * np.maximum(np.abs(x) - 0.4, 0.0)
        np.testing.assert_array_equal(soft_threshold(x, 0.4), expect)

    def test_soft_threshold_rejects_negative(self):
        with pytest.raises(ValueError, match="non-negative"):
            soft_threshold(np.zeros((2, 2)), -0.1)

    def test_svt_matches_oracle(self):
        x = _rand((10, 14), seed=2)
        np.testing.assert_allclose(
            singular_value_threshold(x, 0.7), svt_oracle(x, 0.7), atol=1e-10
        )

    def test_svt_large_threshold_kills_matrix(self):
        x = _rand((5, 5), seed=3)
        s_max = np.linalg.norm(x, 2)
        np.testing.assert_allclose(
            singular_value_threshold(x, s_max * 1.01), 0.0, atol=1e-12
        )

    def test_svt_rejects_non_finite(self):
        x = np.full((3, 3), np.nan)
        with pytest.raises(ValueError, match="non-finite"):
            singular_value_threshold(x, 0.1)

    @settings(deadline=None, max_examples=40)
    @given(st.floats(0, 3), st.floats(0, 3), st.integers(0, 2**31 - 1))
    def test_soft_threshold_composes(self, a, b, seed):
        # R_a(R_b(x)) = R_{a+b}(x): shrinkage composes additively
        x = _rand((4, 5), seed=seed)
        lhs = soft_threshold(soft_threshold(x, b), a)
        rhs = soft_threshold(x, a + b)
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_estimate_sigma_monte_carlo(self):
        e = np.random.default_rng(4).normal(0.0, 0.03, size=(400, 500))
        assert estimate_sigma(e) == pytest.approx(0.03, rel=0.01)

    def test_estimate_sigma_empty_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            estimate_sigma(np.zeros((0, 3)))


class TestSolverConfig:
    def test_defaults_resolve_to_inverse_sqrt_max_dim(self):
        cfg = SolverConfig()
        lam1, lam2 = cfg.resolved_lambdas(50, 400)
        assert lam2 == pytest.approx(1.0 / np.sqrt(400))
        assert lam1 == lam2

    def test_explicit_lambdas_win(self):
        cfg = SolverConfig(lambda1=0.5, lambda2=0.25)
        assert cfg.resolved_lambdas(10, 10) == (0.5, 0.25)

    @pytest.mark.parametrize(
        "kwargs,message",
        [
            (dict(target_rank=0), "target_rank"),
            (dict(target_rank=11), "target_rank"),
            (dict(max_iterations=0), "max_iterations"),
            (dict(residual_tolerance=0.0), "tolerances"),
            (dict(epsilon_mu=-1.0), "tolerances"),
            (dict(rho=1.0), "rho"),
            (dict(lambda1=0.0), "lambda1"),
            (dict(lambda2=-2.0), "lambda2"),
        ],
    )
    def test_validation(self, kwargs, message):
        with pytest.raises(ValueError, match=message):
            SolverConfig(**kwargs).validate(10, 30)


class TestPca:
    def test_split_is_exact_and_sparse_is_zero(self):
        data = _rand((12, 30), seed=5)
        dec = pca_decompose(data, 4)
        np.testing.assert_allclose(
            dec.low_rank + dec.gaussian + dec.sparse, data, atol=1e-12
        )
        assert not dec.sparse.any()
        assert dec.method == "pca"

    def test_reconstruction_is_eckart_young_optimal(self):
        data = _rand((15, 40), seed=6)
        dec = pca_decompose(data, 3)
        centered = data - data.mean(axis=1, keepdims=True)
        s = np.linalg.svd(centered, compute_uv=False)
        best = float(np.sqrt(np.sum(s[3:] ** 2)))
        achieved = float(np.linalg.norm(dec.gaussian))
        assert achieved == pytest.approx(best, rel=1e-10)

    def test_components_orthonormal_and_sign_fixed(self):
        dec = pca_decompose(_rand((10, 25), seed=7), 4)
        gram = dec.components.T @ dec.components
        np.testing.assert_allclose(gram, np.eye(4), atol=1e-10)
        for j in range(4):
            col = dec.components[:, j]
            assert col[np.argmax(np.abs(col))] > 0

    def test_variance_ratios_match_sigma_oracle(self):
        data = _rand((9, 20), seed=8)
        dec = pca_decompose(data, 3)
        centered = data - data.mean(axis=1, keepdims=True)
        s = np.linalg.svd(centered, compute_uv=False)
        expect = s[:3] ** 2 / np.sum(s**2)
        np.testing.assert_allclose(dec.explained_variance_ratio, expect, atol=1e-12)
        assert float(np.sum(dec.explained_variance_ratio)) <= 1.0 + 1e-12

    def test_exact_low_rank_input_reports_full_variance(self):
        u = np.linalg.qr(_rand((8, 1), seed=9))[0]
        data = u @ _rand((1, 30), seed=10)
        data = data - data.mean(axis=1, keepdims=True)
        dec = pca_decompose(data, 1)
        assert dec.explained_variance_ratio[0] == pytest.approx(1.0, abs=1e-12)

    def test_rank_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            pca_decompose(_rand((5, 8)), 6)

    def test_rejects_non_finite(self):
        bad = np.full((4, 4), np.inf)
        with pytest.raises(ValueError, match="non-finite"):
            pca_decompose(bad, 1)

    def test_rejects_zero_columns(self):
        with pytest.raises(ValueError, match="no columns"):
            pca_decompose(np.zeros((4, 0)), 1)

    def test_accepts_diff_matrix_wrapper(self):
        store = generate_toy_store(4, 2, 6, seed=11)
        m = build_diff_matrix(store)
        dec = pca_decompose(m, 2)
        assert dec.low_rank.shape == m.shape


class TestIterativeSolver:
    def test_planted_recovery(self):
        inst = generate_planted(seed=21, **PLANTED)
        dec = exrpca_iterative(inst.matrix, SolverConfig(target_rank=3))
        # every planted spike is found
        _, recall = support_scores(dec.sparse, inst.true_sparse_support)
        assert recall == 1.0
        # salient recovered entries sit on true spikes
        precision, _ = support_scores(
            dec.sparse, inst.true_sparse_support,
            salience=PLANTED["sparse_magnitude"] / 2,
        )
        assert precision >= 0.95
        angle = principal_angle_deg(dec.components, inst.true_subspace)
        assert angle <= 5.0

    def test_split_reconstructs_input(self):
        inst = generate_planted(seed=22, **PLANTED)
        dec = exrpca_iterative(inst.matrix, SolverConfig(target_rank=3))
        np.testing.assert_allclose(
            dec.low_rank + dec.gaussian + dec.sparse, inst.matrix, atol=1e-10
        )
        assert dec.final_residual < 1e-12

    def test_clean_gaussian_input_stops_quickly(self):
        # no planted spikes: the sweep still masks the Gaussian tail, but
        # the accumulated sparse mass stays tiny
        inst = generate_planted(
            40, 200, 3, sparse_density=0.0, sparse_magnitude=1.0,
            sigma=0.01, seed=23,
        )
        dec = exrpca_iterative(inst.matrix, SolverConfig(target_rank=3))
        density = np.count_nonzero(dec.sparse) / dec.sparse.size
        assert density <= 0.005

    def test_deterministic(self):
        inst = generate_planted(seed=24, **PLANTED)
        a = exrpca_iterative(inst.matrix, SolverConfig(target_rank=3))
        b = exrpca_iterative(inst.matrix, SolverConfig(target_rank=3))
        np.testing.assert_array_equal(a.sparse, b.sparse)
        np.testing.assert_array_equal(a.components, b.components)

    def test_max_iterations_is_visible_not_fatal(self):
        inst = generate_planted(seed=25, **PLANTED)
        dec = exrpca_iterative(
            inst.matrix, SolverConfig(target_rank=3, max_iterations=2)
        )
        assert dec.iterations_used == 2

    def test_input_matrix_not_mutated(self):
        inst = generate_planted(seed=26, **PLANTED)
        before = inst.matrix.copy()
        exrpca_iterative(inst.matrix, SolverConfig(target_rank=3))
        np.testing.assert_array_equal(inst.matrix, before)


class TestConvexSolver:
    def test_planted_recovery(self):
        inst = generate_planted(seed=31, **PLANTED)
        dec = exrpca_convex(inst.matrix, SolverConfig())
        assert dec.final_residual < 1e-6
        assert dec.num_components == 3
        angle = principal_angle_deg(dec.components, inst.true_subspace)
        assert angle <= 5.0

    def test_split_reconstructs_input(self):
        inst = generate_planted(seed=32, **PLANTED)
        dec = exrpca_convex(inst.matrix, SolverConfig())
        rel = np.linalg.norm(
            inst.matrix - dec.low_rank - dec.gaussian - dec.sparse
        ) / np.linalg.norm(inst.matrix)
        assert rel < 1e-6

    def test_sparse_term_finds_spikes_with_scaled_lambda1(self):
        # stationarity puts an entry into S only once |E| would exceed
        # lambda2 / (2 * lambda1); tying that activation point to 3*sigma
        # makes the convex split separate spikes from noise
        inst = generate_planted(seed=33, **PLANTED)
        lam2 = 1.0 / np.sqrt(PLANTED["n_cols"])
        lam1 = lam2 / (6.0 * PLANTED["sigma"])
        dec = exrpca_convex(
            inst.matrix, SolverConfig(lambda1=lam1, lambda2=lam2)
        )
        precision, recall = support_scores(
            dec.sparse, inst.true_sparse_support,
            salience=PLANTED["sparse_magnitude"] / 4,
        )
        assert precision == 1.0
        assert recall == 1.0

    def test_zero_matrix_short_circuits(self):
        dec = exrpca_convex(np.zeros((6, 9)), SolverConfig())
        assert dec.num_components == 0
        assert dec.final_residual == 0.0
        assert not dec.low_rank.any()

    def test_deterministic(self):
        inst = generate_planted(seed=34, **PLANTED)
        a = exrpca_convex(inst.matrix, SolverConfig())
        b = exrpca_convex(inst.matrix, SolverConfig())
        np.testing.assert_array_equal(a.low_rank, b.low_rank)
        assert a.iterations_used == b.iterations_used

    def test_components_orthonormal(self):
        inst = generate_planted(seed=35, **PLANTED)
        dec = exrpca_convex(inst.matrix, SolverConfig())
        gram = dec.components.T @ dec.components
        np.testing.assert_allclose(gram, np.eye(dec.num_components), atol=1e-8)


class TestDecompositionIO:
    def _roundtrip(self, tmp_path, dec, labels=None, config=None):
        out = tmp_path / "dec"
        save_decomposition(dec, out, labels=labels, config=config)
        return load_decomposition(out)

    def test_round_trip_pca(self, tmp_path):
        store = generate_toy_store(5, 2, 7, seed=41)
        m = build_diff_matrix(store)
        dec = pca_decompose(m, 2)
        loaded = self._roundtrip(tmp_path, dec, labels=m.labels)
        np.testing.assert_array_equal(loaded.low_rank, dec.low_rank)
        np.testing.assert_array_equal(loaded.gaussian, dec.gaussian)
        np.testing.assert_array_equal(loaded.sparse, dec.sparse)
        np.testing.assert_array_equal(loaded.components, dec.components)
        np.testing.assert_array_equal(loaded.singular_values, dec.singular_values)
        assert loaded.method == dec.method
        assert loaded.iterations_used == dec.iterations_used

    def test_round_trip_convex_with_config(self, tmp_path):
        inst = generate_planted(seed=42, **PLANTED)
        cfg = SolverConfig(lambda2=0.05)
        dec = exrpca_convex(inst.matrix, cfg)
        loaded = self._roundtrip(tmp_path, dec, config=cfg)
        np.testing.assert_array_equal(loaded.sparse, dec.sparse)
        assert loaded.final_residual == dec.final_residual

    def test_components_of_range_checks(self):
        dec = pca_decompose(_rand((6, 12), seed=43), 3)
        assert len(components_of(dec, 2)) == 2
        with pytest.raises(ValueError, match="out of range"):
            components_of(dec, 4)
        with pytest.raises(ValueError, match="out of range"):
            components_of(dec, 0)
