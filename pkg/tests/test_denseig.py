"""Tests for the dense complex QZ eigensolver and its helpers.

scipy.linalg supplies independent oracles (eig, ordqz, svd); the package
itself never calls scipy.
"""

import numpy as np
import pytest
import scipy.linalg
from numpy.testing import assert_allclose

from pepbound.denseig import (
    GEPEigenpair,
    eigenvalues,
    generalized_schur,
    gep_eigenpairs,
    inverse_iteration_vector,
    separation,
    singular_values,
    smallest_singular_value,
    spectral_norm,
    unitary_completion,
)
from pepbound.exceptions import (
    DomainError,
    InfiniteEigenvalue,
    NotAnEigenvector,
)
from pepbound.rng import SplitMix64


def _random_pencil(seed: int, N: int):
    gen = SplitMix64(seed)
    return gen.complex_normal_matrix(N, N), gen.complex_normal_matrix(N, N)


def _match_multisets(a, b, tol):
    """Greedy nearest matching of two complex multisets."""
    b = list(b)
    for x in sorted(a, key=abs):
        j = min(range(len(b)), key=lambda k: abs(b[k] - x))
        assert abs(b[j] - x) <= tol * max(1.0, abs(x)), (x, b[j])
        b.pop(j)
    assert not b


# =======================
# generalized Schur (QZ)
# =======================

@pytest.mark.parametrize("N", [1, 2, 3, 5, 8, 13, 25])
def test_qz_reconstruction_and_unitarity(N):
    A, B = _random_pencil(500 + N, N)
    s = generalized_schur(A, B)
    eye = np.eye(N)
    assert np.linalg.norm(s.Q @ s.TA @ s.Z.conj().T - A) <= 1e-12 * N * np.linalg.norm(A)
    assert np.linalg.norm(s.Q @ s.TB @ s.Z.conj().T - B) <= 1e-12 * N * np.linalg.norm(B)
    assert np.linalg.norm(s.Q.conj().T @ s.Q - eye) <= 1e-13 * N
    assert np.linalg.norm(s.Z.conj().T @ s.Z - eye) <= 1e-13 * N
    # exact triangularity is enforced structurally
    assert np.all(np.tril(s.TA, -1) == 0)
    assert np.all(np.tril(s.TB, -1) == 0)


def test_qz_eigenvalues_match_scipy():
    for seed, N in [(1, 4), (2, 7), (3, 10), (4, 12)]:
        A, B = _random_pencil(600 + seed, N)
        ours = [p.lam for p in gep_eigenpairs(A, B) if p.finite]
        oracle = scipy.linalg.eigvals(A, B)
        _match_multisets(ours, oracle, 1e-8)


def test_qz_2x2_quadratic_formula_oracle():
    # det(A - lam B) = c2 lam^2 + c1 lam + c0, roots by the quadratic formula
    for seed in range(50):
        A, B = _random_pencil(700 + seed, 2)
        c2 = B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0]
        c1 = -(A[0, 0] * B[1, 1] + A[1, 1] * B[0, 0]
               - A[0, 1] * B[1, 0] - A[1, 0] * B[0, 1])
        c0 = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
        disc = np.sqrt(c1 * c1 - 4 * c2 * c0)
        roots = [(-c1 + disc) / (2 * c2), (-c1 - disc) / (2 * c2)]
        ours = [p.lam for p in gep_eigenpairs(A, B) if p.finite]
        _match_multisets(ours, roots, 1e-13)


def test_qz_diagonal_pencil():
    A = np.diag([3.0 + 1j, -2.0, 0.5j]).astype(np.complex128)
    s = generalized_schur(A, np.eye(3, dtype=np.complex128))
    _match_multisets(np.diag(s.TA) / np.diag(s.TB), np.diag(A), 1e-13)


def test_eigenvalues_from_triangular_pair():
    s = generalized_schur(np.diag([2.0, 3.0]).astype(complex), np.eye(2, dtype=complex))
    lams = eigenvalues(s)
    _match_multisets([l for l in lams], [2.0, 3.0], 1e-13)


def test_qz_input_validation():
    with pytest.raises(DomainError):
        generalized_schur(np.zeros((2, 3)), np.zeros((2, 3)))
    with pytest.raises(DomainError):
        generalized_schur(np.zeros((2, 2)), np.zeros((3, 3)))
    bad = np.zeros((2, 2), dtype=complex)
    bad[0, 0] = np.inf
    with pytest.raises(DomainError):
        generalized_schur(bad, np.eye(2, dtype=complex))


# =======================
# inverse iteration
# =======================

def test_inverse_iteration_diagonal_pencil():
    A = np.diag([1.0, 2.0, 3.0]).astype(np.complex128)
    B = np.eye(3, dtype=np.complex128)
    v = inverse_iteration_vector(A, B, 2.0 + 1e-12)
    assert abs(abs(v[1]) - 1.0) <= 1e-10
    assert np.linalg.norm((A - 2.0 * B) @ v) <= 1e-10


def test_inverse_iteration_residuals_random():
    for seed, N in [(1, 5), (2, 9)]:
        A, B = _random_pencil(800 + seed, N)
        scale = np.linalg.norm(A) + np.linalg.norm(B)
        for p in gep_eigenpairs(A, B):
            if not p.finite:
                continue
            r = np.linalg.norm((A - p.lam * B) @ p.v)
            assert r <= 1e-11 * max(1.0, abs(p.lam)) * scale
            assert abs(np.linalg.norm(p.v) - 1.0) <= 1e-13


# =======================
# unitary completion
# =======================

def test_unitary_completion_basis_vector():
    e1 = np.zeros(4, dtype=np.complex128)
    e1[0] = 1.0
    W = unitary_completion(e1)
    assert_allclose(np.abs(W[:, 0]), np.abs(e1), atol=1e-14)
    assert np.linalg.norm(W.conj().T @ W - np.eye(4)) <= 1e-13


def test_unitary_completion_single_vector():
    u = np.array([0.6 + 0.8j], dtype=np.complex128)
    W = unitary_completion(u)
    assert W.shape == (1, 1)
    assert abs(abs(W[0, 0]) - 1.0) <= 1e-14


def test_unitary_completion_random():
    gen = SplitMix64(900)
    for N in (2, 5, 11):
        u = np.array([gen.complex_normal() for _ in range(N)])
        W = unitary_completion(u / np.linalg.norm(u))
        assert np.linalg.norm(W.conj().T @ W - np.eye(N)) <= 1e-13
        # first column spans u
        overlap = abs(np.vdot(W[:, 0], u / np.linalg.norm(u)))
        assert abs(overlap - 1.0) <= 1e-13


# =======================
# singular values
# =======================

def test_singular_values_against_numpy():
    gen = SplitMix64(901)
    for N in (1, 3, 6, 12):
        A = gen.complex_normal_matrix(N, N)
        ours = singular_values(A)
        oracle = np.linalg.svd(A, compute_uv=False)
        assert_allclose(ours, oracle, rtol=1e-12, atol=1e-12 * oracle[0])
        assert np.all(np.diff(ours) <= 1e-12 * oracle[0])  # descending


def test_singular_values_diagonal_example():
    A = np.diag([3.0, 1e-5]).astype(np.complex128)
    assert_allclose(singular_values(A), [3.0, 1e-5], rtol=1e-13)
    assert_allclose(smallest_singular_value(A), 1e-5, rtol=1e-13)


def test_tiny_singular_value_high_relative_accuracy():
    # sigma_min buried 10 decades below sigma_max, still accurate relatively
    gen = SplitMix64(902)
    u = np.array([gen.complex_normal() for _ in range(4)])
    U = unitary_completion(u / np.linalg.norm(u))
    v = np.array([gen.complex_normal() for _ in range(4)])
    V = unitary_completion(v / np.linalg.norm(v))
    S = np.diag([2.0, 1.0, 1e-4, 1e-10])
    A = U @ S @ V.conj().T
    assert abs(smallest_singular_value(A) - 1e-10) <= 1e-6 * 1e-10


def test_spectral_norm():
    gen = SplitMix64(903)
    A = gen.complex_normal_matrix(7, 7)
    assert abs(spectral_norm(A) - np.linalg.norm(A, 2)) <= 1e-12 * np.linalg.norm(A, 2)
    u = np.array([gen.complex_normal() for _ in range(5)])
    Q = unitary_completion(u / np.linalg.norm(u))
    assert abs(spectral_norm(Q) - 1.0) <= 1e-13


# =======================
# separation
# =======================

def test_separation_diagonal_example():
    A = np.diag([1.0, 2.0]).astype(np.complex128)
    B = np.eye(2, dtype=np.complex128)
    v = np.array([1.0, 0.0], dtype=np.complex128)
    res = separation(A, B, v, 1.1)
    # deflating (1, e1) leaves the 1x1 pencil (2 - lam); |2 - 1.1| = 0.9
    assert abs(res.sep - 0.9) <= 1e-14
    assert res.lambda_used == 1.1
    assert res.flags == ()


def test_separation_hits_other_eigenvalue():
    A = np.diag([1.0, 2.0]).astype(np.complex128)
    B = np.eye(2, dtype=np.complex128)
    v = np.array([1.0, 0.0], dtype=np.complex128)
    res = separation(A, B, v, 2.0)
    assert res.sep <= 1e-14
    assert "tiny_sep" in res.flags


def test_separation_matches_reordered_schur_oracle():
    # oracle: scipy.linalg.ordqz moves the deflated eigenvalue first, then
    # sigma_min of the trailing (N-1) x (N-1) triangular compression
    for seed in range(20):
        N = 10
        A, B = _random_pencil(1000 + seed, N)
        pairs = [p for p in gep_eigenpairs(A, B) if p.finite]
        p = pairs[seed % len(pairs)]
        lam_shift = p.lam + 0.01  # generic probe near the eigenvalue
        ours = separation(A, B, p.v, lam_shift).sep

        target = p.lam
        AA, BB, alpha, beta, _, _ = scipy.linalg.ordqz(
            A, B, sort=lambda a, b: np.abs(a / b - target) < 1e-6
        )
        S22 = AA[1:, 1:] - lam_shift * BB[1:, 1:]
        oracle = np.linalg.svd(S22, compute_uv=False)[-1]
        assert abs(ours - oracle) <= 1e-9 * max(oracle, 1e-15), (seed, ours, oracle)


def test_separation_phase_invariance():
    A, B = _random_pencil(1100, 6)
    p = next(q for q in gep_eigenpairs(A, B) if q.finite)
    s1 = separation(A, B, p.v, p.lam + 0.05).sep
    s2 = separation(A, B, p.v * np.exp(0.7j), p.lam + 0.05).sep
    assert abs(s1 - s2) <= 1e-12 * max(s1, 1e-15)


def test_separation_error_paths():
    A = np.eye(2, dtype=np.complex128)
    B = np.diag([1.0, 0.0]).astype(np.complex128)
    with pytest.raises(InfiniteEigenvalue):
        separation(A, B, np.array([0.0, 1.0], dtype=np.complex128), 1.0)
    A2 = np.diag([1.0, 2.0]).astype(np.complex128)
    with pytest.raises(NotAnEigenvector):
        separation(A2, np.eye(2, dtype=np.complex128),
                   np.array([1.0, 1.0], dtype=np.complex128), 1.0)
    with pytest.raises(DomainError):
        separation(A2, np.eye(2, dtype=np.complex128),
                   np.zeros(2, dtype=np.complex128), 1.0)
    with pytest.raises(DomainError):
        separation(A2, np.eye(2, dtype=np.complex128),
                   np.ones(3, dtype=np.complex128), 1.0)


# =======================
# batched eigenpairs
# =======================

def test_gep_eigenpairs_marks_infinite():
    A = np.eye(2, dtype=np.complex128)
    B = np.diag([1.0, 0.0]).astype(np.complex128)
    pairs = gep_eigenpairs(A, B)
    finite = [p for p in pairs if p.finite]
    infinite = [p for p in pairs if not p.finite]
    assert len(finite) == 1 and len(infinite) == 1
    assert abs(finite[0].lam - 1.0) <= 1e-13
    assert infinite[0].v is None


def test_gep_eigenpairs_reuses_schur():
    A, B = _random_pencil(1200, 5)
    s = generalized_schur(A, B)
    pairs = gep_eigenpairs(A, B, schur=s)
    assert len(pairs) == 5
    assert all(isinstance(p, GEPEigenpair) for p in pairs)
