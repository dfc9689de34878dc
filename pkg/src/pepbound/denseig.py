"""In-house dense complex pencil algebra: QZ, eigenvectors, SVD, separation.

This module wraps the compiled kernels into a small generalized-eigenvalue
toolkit for pencils ``A - lam*B``:

* :func:`generalized_schur` -- Hessenberg-triangular reduction followed by
  single-shift QZ with deflation, yielding ``A = Q @ TA @ Z*`` and
  ``B = Q @ TB @ Z*`` with unitary ``Q, Z`` and upper-triangular ``TA, TB``.
* :func:`eigenvalues` / :func:`gep_eigenpairs` -- diagonal ratios (with an
  infinite marker when the ``TB`` diagonal underflows) and unit eigenvectors
  via shifted inverse iteration.
* :func:`smallest_singular_value` / :func:`spectral_norm` -- one-sided Jacobi
  orthogonalization of columns; the smallest singular value comes out with
  high relative accuracy, which the separation denominators need.
* :func:`separation` -- ``sep(lam, (A1, B1)) = sigma_min`` of the deflated
  trailing pencil after rotating a known eigenvector to the front, the
  denominator of all eigenvector error bounds here.

Everything is dense, complex, and desk-scale; factorizations are
single-threaded internally but independent calls are thread-safe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as _k
from .exceptions import (
    Breakdown,
    DomainError,
    InfiniteEigenvalue,
    NonConvergence,
    NotAnEigenvector,
)
from .rng import SplitMix64

__all__ = [
    "GeneralizedSchur",
    "GEPEigenpair",
    "SepResult",
    "generalized_schur",
    "eigenvalues",
    "gep_eigenpairs",
    "inverse_iteration_vector",
    "unitary_completion",
    "singular_values",
    "smallest_singular_value",
    "spectral_norm",
    "separation",
]

_INF = complex(np.inf, 0.0)

# Seed for the fixed pseudorandom start vector of inverse iteration; any
# constant works, determinism is what matters.
_START_SEED = 0x1A57E11A7E5EED


# --------------------------------------------------------------------------
# types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GeneralizedSchur:
    """Generalized Schur decomposition ``A = Q TA Z*``, ``B = Q TB Z*``."""

    Q: np.ndarray
    Z: np.ndarray
    TA: np.ndarray
    TB: np.ndarray

    @property
    def N(self) -> int:
        return self.TA.shape[0]


@dataclass(frozen=True)
class GEPEigenpair:
    """One generalized eigenpair: diagonal pair (alpha, beta) and vector.

    ``lam = alpha / beta`` when ``finite``; otherwise ``lam`` is an infinite
    marker and ``v`` is ``None`` (inverse iteration needs a finite shift).
    """

    alpha: complex
    beta: complex
    lam: complex
    finite: bool
    v: np.ndarray | None


@dataclass(frozen=True)
class SepResult:
    """Separation value with the shift it was evaluated at and diagnostics."""

    sep: float
    lambda_used: complex
    flags: tuple[str, ...]


# --------------------------------------------------------------------------
# generalized Schur (QZ)
# --------------------------------------------------------------------------

def _checked_square_pair(A, B) -> tuple[np.ndarray, np.ndarray]:
    A = np.ascontiguousarray(A, dtype=np.complex128)
    B = np.ascontiguousarray(B, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError("A must be square")
    if B.shape != A.shape:
        raise DomainError("B must match A's shape")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
        raise DomainError("pencil entries must be finite")
    return A, B


def generalized_schur(A: np.ndarray, B: np.ndarray) -> GeneralizedSchur:
    """Reduce the pencil ``(A, B)`` to generalized Schur form.

    Raises :class:`~pepbound.exceptions.NonConvergence` if the QZ sweep
    budget (60 per dimension) is exhausted.
    """
    A, B = _checked_square_pair(A, B)
    N = A.shape[0]
    H = A.copy()
    T = B.copy()
    Q = np.eye(N, dtype=np.complex128)
    Z = np.eye(N, dtype=np.complex128)
    if N > 0:
        _k.hessenberg_triangular(H, T, Q, Z)
        if _k.qz_iterate(H, T, Q, Z) != 0:
            raise NonConvergence(
                f"QZ did not deflate all subdiagonals within 60*{N} sweeps"
            )
        # The iteration leaves exact zeros below the diagonals; enforce that
        # structurally so downstream triangular logic can rely on it.
        H[:] = np.triu(H)
        T[:] = np.triu(T)
    for M in (H, T, Q, Z):
        M.setflags(write=False)
    return GeneralizedSchur(Q=Q, Z=Z, TA=H, TB=T)


def eigenvalues(S: GeneralizedSchur) -> list[complex]:
    """Diagonal ratios ``TA[i,i] / TB[i,i]`` with infinite-eigenvalue marking.

    A ratio is declared infinite when ``|TB[i,i]| <= 1e-14 * ||TB||_F`` and
    reported as ``complex(inf, 0)``.
    """
    normB = float(np.linalg.norm(S.TB))
    out: list[complex] = []
    for i in range(S.N):
        beta = S.TB[i, i]
        if abs(beta) <= 1e-14 * normB:
            out.append(_INF)
        else:
            out.append(complex(S.TA[i, i] / beta))
    return out


# --------------------------------------------------------------------------
# eigenvectors by inverse iteration
# --------------------------------------------------------------------------

def _canonical_phase(v: np.ndarray) -> np.ndarray:
    """Rotate so the largest-magnitude component is real positive."""
    k = int(np.argmax(np.abs(v)))
    piv = v[k]
    if piv != 0:
        v = v * (abs(piv) / piv)
    return v


def inverse_iteration_vector(A: np.ndarray, B: np.ndarray, lam: complex) -> np.ndarray:
    """Unit eigenvector for the (approximately known) eigenvalue ``lam``.

    Runs at most three solve-and-normalize steps with ``A - lam*B`` from a
    fixed pseudorandom start, keeping the iterate with the smallest residual
    ``||(A - lam*B) v||``.  If the LU factorization hits an exactly-zero
    pivot, the shift is perturbed by ``1e-13 * (1 + |lam|)`` and the whole
    process retried once before giving up.
    """
    A, B = _checked_square_pair(A, B)
    lam = complex(lam)
    if not np.isfinite(lam.real) or not np.isfinite(lam.imag):
        raise DomainError("inverse iteration needs a finite shift")
    N = A.shape[0]
    gen = SplitMix64(_START_SEED)
    start = np.array([gen.complex_normal() for _ in range(N)])
    start /= np.linalg.norm(start)

    def attempt(shift: complex) -> np.ndarray | None:
        M = A - shift * B
        LU = M.copy()
        piv = np.zeros(N, dtype=np.int64)
        if _k.lu_factor(LU, piv) != 0:
            return None
        v = start.copy()
        best = None
        best_res = np.inf
        for _ in range(3):
            _k.lu_solve(LU, piv, v)
            nrm = np.linalg.norm(v)
            if nrm == 0.0 or not np.isfinite(nrm):
                break
            v /= nrm
            res = float(np.linalg.norm(M @ v))
            if res < best_res:
                best_res = res
                best = v.copy()
        return best

    v = attempt(lam)
    if v is None:
        v = attempt(lam + 1e-13 * (1.0 + abs(lam)))
    if v is None:
        raise Breakdown("shifted pencil is singular to working precision")
    return _canonical_phase(v)


# --------------------------------------------------------------------------
# unitary completion and SVD
# --------------------------------------------------------------------------

def unitary_completion(u: np.ndarray) -> np.ndarray:
    """Unitary matrix whose first column is the unit vector ``u``.

    Householder construction: with ``s`` the phase of ``u[0]`` and
    ``v = u + s*e1``, the reflector ``H = I - 2 v v*/(v* v)`` sends ``u`` to
    ``-s*e1``, so ``W = -s*H`` is unitary with ``W @ e1 = u`` exactly.
    """
    u = np.asarray(u, dtype=np.complex128).ravel()
    N = u.shape[0]
    if N == 0:
        raise DomainError("empty vector")
    nrm = np.linalg.norm(u)
    if nrm == 0.0:
        raise DomainError("zero vector has no unitary completion")
    if abs(nrm - 1.0) > 1e-12:
        raise DomainError(f"vector is not unit norm (||u|| = {nrm!r})")
    u0 = u[0]
    s = u0 / abs(u0) if u0 != 0 else 1.0 + 0.0j
    v = u.copy()
    v[0] += s
    H = np.eye(N, dtype=np.complex128) - (2.0 / np.vdot(v, v)) * np.outer(v, v.conj())
    W = -s * H
    W[:, 0] = u
    return W


def singular_values(Mx: np.ndarray) -> np.ndarray:
    """All singular values, descending, via one-sided Jacobi."""
    G = np.ascontiguousarray(Mx, dtype=np.complex128)
    if G.ndim != 2:
        raise DomainError("expected a matrix")
    if G.size == 0:
        return np.zeros(0)
    if G.shape[0] < G.shape[1]:
        G = np.ascontiguousarray(G.conj().T)
    else:
        G = G.copy()
    _sweeps, ok = _k.jacobi_singular_values(G)
    if not ok:
        raise NonConvergence("Jacobi SVD did not converge in 60 sweeps")
    sig = np.linalg.norm(G, axis=0)
    sig.sort()
    return sig[::-1]


def smallest_singular_value(Mx: np.ndarray) -> float:
    """``sigma_min`` of a rectangular matrix; empty matrices give ``+inf``.

    The infinity convention covers the separation of an empty trailing block
    (pencils of size 1, where nothing constrains the bound denominator).
    """
    Mx = np.asarray(Mx)
    if Mx.size == 0:
        return float(np.inf)
    return float(singular_values(Mx)[-1])


def spectral_norm(Mx: np.ndarray) -> float:
    """Largest singular value; 0 for empty matrices."""
    Mx = np.asarray(Mx)
    if Mx.size == 0:
        return 0.0
    return float(singular_values(Mx)[0])


# --------------------------------------------------------------------------
# separation
# --------------------------------------------------------------------------

def separation(
    A: np.ndarray, B: np.ndarray, v_exact: np.ndarray, lam: complex
) -> SepResult:
    """Separation ``sigma_min(Q2* (A - lam*B) Z2)`` after deflating one pair.

    ``v_exact`` must be an eigenvector of the pencil with finite eigenvalue.
    The deflation takes ``z1 = v/||v||`` and ``q1 = B z1 / ||B z1||``,
    completes both to unitary matrices, and measures the smallest singular
    value of the trailing ``(N-1) x (N-1)`` compression.  This equals the
    separation computed from any generalized Schur form with the eigenvalue
    ordered first, because two valid completions differ by a unitary factor
    on the orthogonal complement and ``sigma_min`` is unitarily invariant.

    Raises :class:`~pepbound.exceptions.InfiniteEigenvalue` when
    ``B v`` vanishes and :class:`~pepbound.exceptions.NotAnEigenvector` when
    ``A z1`` is not parallel to ``B z1``.
    """
    A, B = _checked_square_pair(A, B)
    lam = complex(lam)
    v = np.asarray(v_exact, dtype=np.complex128).ravel()
    if v.shape[0] != A.shape[0]:
        raise DomainError("eigenvector length must match the pencil size")
    nv = np.linalg.norm(v)
    if nv == 0.0:
        raise DomainError("zero eigenvector")
    z1 = v / nv
    Bz = B @ z1
    nBz = np.linalg.norm(Bz)
    normB = np.linalg.norm(B)
    if nBz <= 1e-14 * normB:
        raise InfiniteEigenvalue("B @ v vanishes; the eigenvalue is infinite")
    q1 = Bz / nBz
    Az = A @ z1
    lam_est = complex(np.vdot(q1, Az) / nBz)
    normA = np.linalg.norm(A)
    if np.linalg.norm(Az - lam_est * Bz) > 1e-8 * max(normA, 1e-300):
        raise NotAnEigenvector(
            "A v is not parallel to B v; v is not an eigenvector of the pencil"
        )
    Wz = unitary_completion(z1)
    Wq = unitary_completion(q1)
    Z2 = Wz[:, 1:]
    Q2 = Wq[:, 1:]
    compressed = Q2.conj().T @ (A - lam * B) @ Z2
    sep = smallest_singular_value(compressed)
    flags: tuple[str, ...] = ()
    scale = np.linalg.norm(A - lam * B)
    if np.isfinite(sep) and sep <= 1e-13 * max(scale, 1e-300):
        flags = ("tiny_sep",)
    return SepResult(sep=sep, lambda_used=lam, flags=flags)


# --------------------------------------------------------------------------
# batched eigenpairs
# --------------------------------------------------------------------------

def gep_eigenpairs(
    A: np.ndarray, B: np.ndarray, schur: GeneralizedSchur | None = None
) -> list[GEPEigenpair]:
    """All eigenpairs of ``A - lam*B``: QZ eigenvalues plus inverse-iteration
    vectors.  Infinite eigenvalues get ``v=None`` (no finite shift exists)."""
    A, B = _checked_square_pair(A, B)
    if schur is None:
        schur = generalized_schur(A, B)
    normB = float(np.linalg.norm(schur.TB))
    pairs: list[GEPEigenpair] = []
    for i in range(schur.N):
        alpha = complex(schur.TA[i, i])
        beta = complex(schur.TB[i, i])
        if abs(beta) <= 1e-14 * normB:
            pairs.append(
                GEPEigenpair(alpha=alpha, beta=beta, lam=_INF, finite=False, v=None)
            )
        else:
            lam = alpha / beta
            v = inverse_iteration_vector(A, B, lam)
            pairs.append(
                GEPEigenpair(alpha=alpha, beta=beta, lam=lam, finite=True, v=v)
            )
    return pairs
