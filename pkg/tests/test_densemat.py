"""Dense matrix kernel, Jacobi SVD and msign."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lowprec_lab.errors import DimMismatch, NoConvergence, NonFiniteEntries, ZeroMatrix
from lowprec_lab.linalg.densemat import (
    OrthoMethod,
    add,
    as_mat,
    elementwise_map,
    frob_norm,
    hadamard,
    jacobi_svd,
    matmul,
    msign,
    msign_tolerance,
    nuclear_norm,
    spectral_norm,
    symmetric_jacobi_eigvalsh,
)


class TestCheckedArithmetic:

    def test_shape_errors(self):
        with pytest.raises(DimMismatch):
            matmul(np.ones((2, 3)), np.ones((2, 3)))
        with pytest.raises(DimMismatch):
            add(np.ones((2, 3)), np.ones((3, 2)))
        with pytest.raises(DimMismatch):
            hadamard(np.ones((2, 2)), np.ones((2, 3)))
        with pytest.raises(DimMismatch):
            as_mat(np.ones(3))

    def test_non_finite_entries(self):
        with pytest.raises(NonFiniteEntries):
            as_mat(np.array([[1.0, np.nan]]))

    def test_elementwise_map(self):
        A = np.array([[-2.0, 0.5], [3.0, -0.25]])
        np.testing.assert_array_equal(elementwise_map(A, lambda z: np.clip(z, -1.0, 1.0)),
                                      [[-1.0, 0.5], [1.0, -0.25]])
        assert A[0, 0] == -2.0
        with pytest.raises(DimMismatch):
            elementwise_map(A, lambda z: z.ravel())


class TestJacobiSvd:

    @pytest.mark.parametrize("shape", [(7, 5), (5, 7), (6, 6), (1, 4), (4, 1)])
    def test_reconstructs_and_matches_lapack(self, shape, gen):
        A = gen.standard_normal(shape)
        svd = jacobi_svd(A)
        np.testing.assert_allclose(svd.reconstruct(), A, atol=1e-10)
        np.testing.assert_allclose(svd.S, np.linalg.svd(A, compute_uv=False), rtol=1e-10, atol=1e-12)
        assert np.all(np.diff(svd.S) <= 0.0)
        r = min(shape)
        np.testing.assert_allclose(svd.U.T @ svd.U, np.eye(r), atol=1e-10)
        np.testing.assert_allclose(svd.V.T @ svd.V, np.eye(r), atol=1e-10)

    def test_rank_deficient_has_orthonormal_u(self, gen):
        A = gen.standard_normal((6, 2)) @ gen.standard_normal((2, 4))
        svd = jacobi_svd(A)
        np.testing.assert_allclose(svd.U.T @ svd.U, np.eye(4), atol=1e-10)
        np.testing.assert_allclose(svd.reconstruct(), A, atol=1e-10)

    def test_sweep_cap(self, gen):
        with pytest.raises(NoConvergence):
            jacobi_svd(gen.standard_normal((4, 4)), max_sweeps=0)

    def test_eigenvalue_oracle_agrees(self, gen):
        A = gen.standard_normal((6, 4))
        eig = symmetric_jacobi_eigvalsh(A.T @ A)
        np.testing.assert_allclose(eig, jacobi_svd(A).S ** 2, rtol=1e-9)

    def test_norm_ordering(self, gen):
        A = gen.standard_normal((5, 3))
        assert spectral_norm(A) <= frob_norm(A) <= nuclear_norm(A)


class TestMsign:

    def test_exact_is_orthogonal(self, gen):
        O = msign(gen.standard_normal((8, 5)))
        np.testing.assert_allclose(O.T @ O, np.eye(5), atol=1e-10)

    def test_exact_matches_polar_factor(self, gen):
        A = gen.standard_normal((5, 5))
        U, _, Vt = np.linalg.svd(A)
        np.testing.assert_allclose(msign(A), U @ Vt, atol=1e-10)

    def test_rank_deficient_is_partial_isometry(self, gen):
        A = gen.standard_normal((5, 2)) @ gen.standard_normal((2, 5))
        assert frob_norm(msign(A)) ** 2 == pytest.approx(2.0, rel=1e-9)

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)),
                  elements=st.integers(-10, 10).map(float)))
    def test_norm_within_tolerance(self, A):
        if frob_norm(A) < 1e-6:
            return
        r = min(A.shape)
        for method in OrthoMethod:
            assert frob_norm(msign(A, method)) ** 2 <= r * (1.0 + msign_tolerance(method))

    def test_newton_schulz_close_to_exact_on_well_conditioned(self, gen):
        Q, _ = np.linalg.qr(gen.standard_normal((6, 6)))
        A = Q @ np.diag(np.linspace(1.0, 2.0, 6))
        O = msign(A, OrthoMethod.NEWTON_SCHULZ, ns_iters=10)
        singular = np.linalg.svd(O, compute_uv=False)
        assert np.all(singular > 0.6) and np.all(singular < 1.25)

    @pytest.mark.parametrize("ns_iters", [0, 1, 5, 10, 40])
    def test_newton_schulz_singular_values_stay_bounded(self, gen, ns_iters):
        for _ in range(30):
            m, n = (int(k) for k in gen.integers(1, 9, size=2))
            k = int(gen.integers(1, min(m, n) + 1))
            A = (gen.standard_normal((m, k)) * np.logspace(0, -6, k)) @ gen.standard_normal((k, n))
            O = msign(A, OrthoMethod.NEWTON_SCHULZ, ns_iters=ns_iters)
            singular = np.linalg.svd(O, compute_uv=False)
            assert np.all(singular <= 1.2025)
            assert frob_norm(O) ** 2 <= min(m, n) * (1.0 + msign_tolerance(OrthoMethod.NEWTON_SCHULZ))

    def test_zero_matrix(self):
        with pytest.raises(ZeroMatrix):
            msign(np.zeros((3, 2)))
