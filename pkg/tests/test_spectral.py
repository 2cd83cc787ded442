"""Truncation, USVT, and eigenvalue extraction."""

import numpy as np
import pytest

from graphcorr import (
    GraphCorrError,
    RankZeroWarning,
    UsvtConfig,
    lambda1,
    top_singular_truncation,
    usvt,
)
from graphcorr.samplers import cosine_link
from graphcorr.spectral import usvt_rank


def sym(n, seed, scale=1.0):
    m = np.random.default_rng(seed).random((n, n)) * scale
    return (m + m.T) / 2


def charpoly_max_root(M):
    """Characteristic polynomial root oracle via the Faddeev-LeVerrier trace
    recursion; independent of the symmetric eigensolver under test."""
    n = M.shape[0]
    coeffs = [1.0]
    Mk = np.eye(n)
    for k in range(1, n + 1):
        Mk = M @ Mk
        ck = -np.trace(Mk) / k
        coeffs.append(ck)
        Mk = Mk + ck * np.eye(n)
    roots = np.roots(coeffs)
    real = roots[np.abs(roots.imag) < 1e-6].real
    return float(real.max())


class TestTruncation:
    def test_rank_one_matrix_recovered_exactly(self):
        v = np.random.default_rng(1).random(20)
        M = np.outer(v, v)
        assert np.linalg.norm(top_singular_truncation(M, 1) - M) < 1e-8

    def test_full_rank_truncation_is_identity(self):
        M = sym(10, 2)
        np.testing.assert_allclose(top_singular_truncation(M, 10), M, atol=1e-10)

    def test_flat_offdiagonal_matches_dense_svd_oracle(self):
        """Residual of the rank-1 truncation equals the oracle computed from a
        full singular value decomposition."""
        n = 100
        M = 0.5 * (np.ones((n, n)) - np.eye(n))
        approx = top_singular_truncation(M, 1)
        U, s, Vt = np.linalg.svd(M)
        oracle = s[0] * np.outer(U[:, 0], Vt[0])
        assert abs(
            np.linalg.norm(M - approx) - np.linalg.norm(M - oracle)
        ) < 1e-6

    def test_result_is_symmetric(self):
        M = sym(30, 3)
        out = top_singular_truncation(M, 4)
        assert np.max(np.abs(out - out.T)) < 1e-10

    def test_residual_equals_discarded_singular_values(self):
        """Eckart-Young check on small random matrices."""
        rng = np.random.default_rng(4)
        for _ in range(20):
            n = int(rng.integers(3, 9))
            M = sym(n, int(rng.integers(1e6)))
            s = np.sort(np.abs(np.linalg.eigvalsh(M)))[::-1]
            for k in range(1, n + 1):
                resid = np.linalg.norm(M - top_singular_truncation(M, k)) ** 2
                assert abs(resid - np.sum(s[k:] ** 2)) < 1e-8

    def test_rank_out_of_range(self):
        M = sym(5, 5)
        with pytest.raises(GraphCorrError):
            top_singular_truncation(M, 0)
        with pytest.raises(GraphCorrError):
            top_singular_truncation(M, 6)

    def test_lanczos_path_matches_dense_path(self):
        """Large-matrix truncation (iterative solver) agrees with the direct
        dense computation."""
        rng = np.random.default_rng(6)
        X = rng.standard_normal((450, 2))
        P = cosine_link(X)
        A = (rng.random((450, 450)) < P).astype(float)
        A = np.triu(A, 1)
        A = A + A.T
        fast = top_singular_truncation(A, 3)
        w, V = np.linalg.eigh(A)
        order = np.argsort(np.abs(w))[::-1][:3]
        dense = (V[:, order] * w[order]) @ V[:, order].T
        np.testing.assert_allclose(fast, dense, atol=1e-8)


class TestUsvt:
    def test_noiseless_low_rank_matrix_recovered(self):
        """Exact rank-2 input with both components above the threshold comes
        back unchanged."""
        n = 120
        z = np.repeat([0, 1], n // 2)
        P = np.where(np.equal.outer(z, z), 0.9, 0.1)  # eigenvalues 0.5n, 0.4n
        est = usvt(P, UsvtConfig(c0=4.01))
        assert usvt_rank(P, UsvtConfig(c0=4.01)) == 2
        assert np.linalg.norm(est - P) < 1e-6

    def test_er_graph_threshold_keeps_rank_one(self):
        rng = np.random.default_rng(8)
        n = 600
        A = np.triu((rng.random((n, n)) < 0.5).astype(float), 1)
        A = A + A.T
        assert usvt_rank(A, UsvtConfig()) == 1
        est = usvt(A, UsvtConfig())
        iu = np.triu_indices(n, 1)
        assert abs(est[iu].mean() - 0.5) < 0.05

    def test_fixed_rank_error_decreases_with_size(self):
        """Median relative estimation error shrinks as graphs grow."""
        rng = np.random.default_rng(9)
        med = []
        for n in (100, 200, 400):
            errs = []
            for _ in range(10):
                X = rng.standard_normal((n, 2))
                P = cosine_link(X)
                A = np.triu((rng.random((n, n)) < P).astype(float), 1)
                A = A + A.T
                est = usvt(A, UsvtConfig(rank=2))
                errs.append(np.linalg.norm(est - P) / n)
            med.append(np.median(errs))
        assert med[0] > med[1] > med[2]

    def test_clip_keeps_unit_interval(self):
        A = (sym(50, 10) > 0.5).astype(float)
        np.fill_diagonal(A, 0)
        est = usvt(A, UsvtConfig(rank=5, clip=True))
        assert est.min() >= 0.0 and est.max() <= 1.0

    def test_unclipped_may_leave_unit_interval(self):
        A = (sym(50, 11) > 0.5).astype(float)
        np.fill_diagonal(A, 0)
        est = usvt(A, UsvtConfig(rank=5, clip=False))
        assert est.min() < 0.0 or est.max() > 1.0

    def test_fixed_rank_residual_monotone_in_rank(self):
        A = (sym(40, 12) > 0.6).astype(float)
        np.fill_diagonal(A, 0)
        resid = [
            np.linalg.norm(A - usvt(A, UsvtConfig(rank=k, clip=False)))
            for k in range(1, 8)
        ]
        assert all(resid[i + 1] <= resid[i] + 1e-12 for i in range(len(resid) - 1))

    def test_all_below_threshold_warns_and_returns_zero(self):
        A = np.zeros((6, 6))
        A[0, 1] = A[1, 0] = 1.0
        with pytest.warns(RankZeroWarning):
            est = usvt(A, UsvtConfig(c0=50.0))
        assert np.all(est == 0)

    def test_config_validation(self):
        with pytest.raises(GraphCorrError):
            UsvtConfig(rank=0)
        with pytest.raises(GraphCorrError):
            UsvtConfig(c0=-1.0)


class TestLambda1:
    def test_identity(self):
        assert lambda1(np.eye(5)) == pytest.approx(1.0)

    def test_complete_graph(self):
        n = 9
        assert lambda1(np.ones((n, n)) - np.eye(n)) == pytest.approx(n - 1.0)

    def test_matches_characteristic_polynomial_oracle(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            M = sym(8, int(rng.integers(1e6)), scale=2.0) - 1.0
            assert lambda1(M) == pytest.approx(charpoly_max_root(M), abs=1e-8)

    def test_large_matrix_iterative_path(self):
        rng = np.random.default_rng(14)
        n = 500
        A = np.triu((rng.random((n, n)) < 0.3).astype(float), 1)
        A = A + A.T
        assert lambda1(A) == pytest.approx(float(np.linalg.eigvalsh(A)[-1]), abs=1e-8)

    def test_zero_matrix(self):
        assert lambda1(np.zeros((450, 450))) == 0.0
