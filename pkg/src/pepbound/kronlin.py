"""Block Kronecker pencils: assembly, factorizations, and eigenvector recovery.

A block Kronecker pencil for block size ``n`` and split ``eps + eta + 1 = d``
is the ``dn x dn`` pencil

    L(lam) = [[ M(lam),            L_eta(lam)^T (x) I_n ],
              [ L_eps(lam) (x) I_n, 0                   ]]

where ``L_k(lam)`` is the ``k x (k+1)`` bidiagonal pencil with ``-1`` on the
diagonal and ``lam`` on the superdiagonal, and ``M(lam) = lam*M1 + M0c`` is an
arbitrary pencil of conforming block shape.  When the anti-diagonal block sums
of ``M`` reproduce the coefficients of a matrix polynomial ``P``, the pencil
is a strong linearization of ``P``; this module constructs such pencils,
their permuted variants, and the right-sided factorizations

    L(lam) H(lam) = g(lam) (x) P(lam)

that transport eigenvectors and residual norms between ``P`` and ``L``.

Block permutations use gather semantics throughout: ``row_perm[i] = r`` means
assembled block row ``i`` is core block row ``r`` (same for columns), i.e.
``assembled[i, j] = core[row_perm[i], col_perm[j]]`` blockwise.

All pencils here follow the ``Pencil`` convention ``L(lam) = A - lam*B``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import DomainError, NoMatch, NotAnEigenvector
from .polyval import MatrixPolynomial, evaluate
from .rng import SplitMix64

__all__ = [
    "Pencil",
    "MPencil",
    "BlockKroneckerForm",
    "FactorPair",
    "FactorizationReport",
    "lambda_block",
    "lk_block",
    "r_block",
    "s_block",
    "m0_pencil",
    "make_m_pencil",
    "check_antidiagonal_sums",
    "induced_polynomial",
    "assemble",
    "preset_linearization",
    "discover_permutation",
    "right_factor",
    "recover_eigenvector",
    "verify_right_sided_factorization",
]


# --------------------------------------------------------------------------
# types
# --------------------------------------------------------------------------

def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Pencil:
    """Matrix pencil ``L(lam) = A - lam*B`` with square ``A``, ``B``."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self) -> None:
        A = _frozen(self.A)
        B = _frozen(self.B)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != B.shape:
            raise DomainError("pencil needs two equal square matrices")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def N(self) -> int:
        return self.A.shape[0]

    def evaluate(self, lam: complex) -> np.ndarray:
        return self.A - complex(lam) * self.B


@dataclass(frozen=True)
class MPencil:
    """The arbitrary corner pencil ``M(lam) = lam*M1 + M0c``."""

    m1: np.ndarray
    m0c: np.ndarray

    def __post_init__(self) -> None:
        m1 = _frozen(self.m1)
        m0c = _frozen(self.m0c)
        if m1.ndim != 2 or m1.shape != m0c.shape:
            raise DomainError("M1 and M0c must be matrices of equal shape")
        object.__setattr__(self, "m1", m1)
        object.__setattr__(self, "m0c", m0c)

    def evaluate(self, lam: complex) -> np.ndarray:
        return complex(lam) * self.m1 + self.m0c


@dataclass(frozen=True)
class BlockKroneckerForm:
    """A (possibly block-permuted) block Kronecker pencil recipe."""

    eps: int
    eta: int
    n: int
    M: MPencil
    row_perm: tuple[int, ...]
    col_perm: tuple[int, ...]
    label: str = "custom"

    def __post_init__(self) -> None:
        if self.eps < 0 or self.eta < 0 or self.n < 1:
            raise DomainError("need eps, eta >= 0 and n >= 1")
        d = self.d
        shape = ((self.eta + 1) * self.n, (self.eps + 1) * self.n)
        if self.M.m1.shape != shape:
            raise DomainError(
                f"M has shape {self.M.m1.shape}, expected {shape} for "
                f"(eps, eta, n) = ({self.eps}, {self.eta}, {self.n})"
            )
        for name, perm in (("row_perm", self.row_perm), ("col_perm", self.col_perm)):
            perm = tuple(int(p) for p in perm)
            if sorted(perm) != list(range(d)):
                raise DomainError(f"{name} must be a permutation of 0..{d - 1}")
            object.__setattr__(self, name, perm)

    @property
    def d(self) -> int:
        return self.eps + self.eta + 1


@dataclass(frozen=True)
class FactorPair:
    """Right-sided factorization data: ``L(lam) H(lam) = g(lam) (x) P(lam)``.

    ``h`` maps ``lam`` to the ``dn x n`` factor, ``g`` to the length-``d``
    vector.  ``identity_block`` is the 0-based block row of ``h(lam)`` that is
    exactly ``I_n`` (already remapped through the form's column permutation).
    ``domain`` is ``"allC"`` or ``"nonzeroC"``.
    """

    h: Callable[[complex], np.ndarray]
    g: Callable[[complex], np.ndarray]
    identity_block: int
    domain: str
    variant: str
    d: int
    n: int


@dataclass(frozen=True)
class FactorizationReport:
    """Per-sample verification of a right-sided factorization."""

    samples: tuple[complex, ...]
    residuals: tuple[float, ...]
    sigma_mins: tuple[float, ...]
    g_norms: tuple[float, ...]
    passed: bool


# --------------------------------------------------------------------------
# structured blocks
# --------------------------------------------------------------------------

def lambda_block(k: int, lam: complex, n: int) -> np.ndarray:
    """``Lambda_k(lam) (x) I_n``: column stack ``(lam^k I, ..., lam I, I)``."""
    if k < 0:
        raise DomainError("k must be nonnegative")
    lam = complex(lam)
    eye = np.eye(n, dtype=np.complex128)
    return np.concatenate([lam ** (k - j) * eye for j in range(k + 1)], axis=0)


def _lk_parts(k: int) -> tuple[np.ndarray, np.ndarray]:
    """Constant and lam-coefficient of the scalar ``k x (k+1)`` pencil L_k."""
    c0 = np.zeros((k, k + 1), dtype=np.complex128)
    c1 = np.zeros((k, k + 1), dtype=np.complex128)
    for i in range(k):
        c0[i, i] = -1.0
        c1[i, i + 1] = 1.0
    return c0, c1


def lk_block(k: int, lam: complex, n: int) -> np.ndarray:
    """``L_k(lam) (x) I_n``: ``-I`` diagonal, ``lam I`` superdiagonal,
    shape ``kn x (k+1)n`` (empty for k = 0)."""
    if k < 0:
        raise DomainError("k must be nonnegative")
    c0, c1 = _lk_parts(k)
    return np.kron(c0 + complex(lam) * c1, np.eye(n, dtype=np.complex128))


def r_block(k: int, lam: complex, n: int) -> np.ndarray:
    """Lower block-Toeplitz ``R_k(lam) (x) I_n``: block ``(i, j)`` is
    ``lam^(i-j) I`` for ``j <= i`` (0-based), shape ``kn x (k+1)n``; the last
    block column is zero.  ``k = 0`` gives the empty matrix."""
    if k < 0:
        raise DomainError("k must be nonnegative")
    lam = complex(lam)
    core = np.zeros((k, k + 1), dtype=np.complex128)
    for i in range(k):
        for j in range(i + 1):
            core[i, j] = lam ** (i - j)
    return np.kron(core, np.eye(n, dtype=np.complex128))


def s_block(k: int, lam: complex, n: int) -> np.ndarray:
    """Upper block-Toeplitz ``S_k(lam) (x) I_n``: block ``(i, j)`` is
    ``lam^(k-(j-i)) I`` for ``j > i`` (0-based), shape ``kn x (k+1)n``; the
    first block column is zero.  ``k = 0`` gives the empty matrix."""
    if k < 0:
        raise DomainError("k must be nonnegative")
    lam = complex(lam)
    core = np.zeros((k, k + 1), dtype=np.complex128)
    for i in range(k):
        for j in range(i + 1, k + 1):
            core[i, j] = lam ** (k - (j - i))
    return np.kron(core, np.eye(n, dtype=np.complex128))


# --------------------------------------------------------------------------
# M-pencil construction and the anti-diagonal characterization
# --------------------------------------------------------------------------

def _split_shapes(P: MatrixPolynomial, eps: int, eta: int) -> None:
    if eps < 0 or eta < 0 or eps + eta + 1 != P.d:
        raise DomainError(
            f"(eps, eta) = ({eps}, {eta}) does not satisfy eps + eta + 1 = d = {P.d}"
        )


def m0_pencil(P: MatrixPolynomial, eps: int, eta: int) -> MPencil:
    """The canonical corner pencil: top block row
    ``(lam*A_d + A_{d-1}, A_{d-2}, ..., A_eta)`` with the last block column
    continuing ``(A_{eta-1}, ..., A_0)`` downward; all other blocks zero."""
    _split_shapes(P, eps, eta)
    n, d = P.n, P.d
    m1 = np.zeros(((eta + 1) * n, (eps + 1) * n), dtype=np.complex128)
    m0c = np.zeros_like(m1)
    m1[:n, :n] = P.coeffs[d]
    for j in range(eps + 1):
        m0c[:n, j * n:(j + 1) * n] = P.coeffs[d - 1 - j]
    for i in range(1, eta + 1):
        m0c[i * n:(i + 1) * n, eps * n:] = P.coeffs[eta - i]
    return MPencil(m1=m1, m0c=m0c)


def make_m_pencil(
    P: MatrixPolynomial,
    eps: int,
    eta: int,
    Bmat: np.ndarray,
    Cmat: np.ndarray,
) -> MPencil:
    """General solution pencil ``M0 + B (L_eps (x) I) + (L_eta^T (x) I) C``.

    ``Bmat`` must be ``(eta+1)n x eps*n`` and ``Cmat`` must be
    ``eta*n x (eps+1)n``; the structured corrections are expanded into the
    ``(M1, M0c)`` coefficient pair.
    """
    _split_shapes(P, eps, eta)
    n = P.n
    Bmat = np.asarray(Bmat, dtype=np.complex128)
    Cmat = np.asarray(Cmat, dtype=np.complex128)
    if Bmat.shape != ((eta + 1) * n, eps * n):
        raise DomainError(
            f"Bmat has shape {Bmat.shape}, expected {((eta + 1) * n, eps * n)}"
        )
    if Cmat.shape != (eta * n, (eps + 1) * n):
        raise DomainError(
            f"Cmat has shape {Cmat.shape}, expected {(eta * n, (eps + 1) * n)}"
        )
    eye = np.eye(n, dtype=np.complex128)
    e0, e1 = _lk_parts(eps)
    h0, h1 = _lk_parts(eta)
    base = m0_pencil(P, eps, eta)
    m1 = base.m1 + Bmat @ np.kron(e1, eye) + np.kron(h1.T, eye) @ Cmat
    m0c = base.m0c + Bmat @ np.kron(e0, eye) + np.kron(h0.T, eye) @ Cmat
    return MPencil(m1=m1, m0c=m0c)


def _infer_split(M: MPencil, n: int) -> tuple[int, int]:
    rows, cols = M.m1.shape
    if rows % n or cols % n:
        raise DomainError("M shape is not a multiple of the block size")
    return cols // n - 1, rows // n - 1


def _antidiagonal_coefficients(M: MPencil, eps: int, eta: int, n: int) -> np.ndarray:
    """Grade-``d`` coefficient stack of ``(Lambda_eta^T (x) I) M (Lambda_eps (x) I)``.

    Block ``(i, j)`` of ``M`` (0-based) carries ``lam^(eta-i) * lam^(eps-j)``,
    so the coefficient of ``lam^k`` collects ``M0c`` blocks with
    ``i + j = eps + eta - k`` and ``M1`` blocks with ``i + j = eps + eta - k + 1``.
    """
    d = eps + eta + 1
    out = np.zeros((d + 1, n, n), dtype=np.complex128)
    for i in range(eta + 1):
        for j in range(eps + 1):
            blk0 = M.m0c[i * n:(i + 1) * n, j * n:(j + 1) * n]
            blk1 = M.m1[i * n:(i + 1) * n, j * n:(j + 1) * n]
            k0 = eps + eta - i - j
            out[k0] += blk0
            out[k0 + 1] += blk1
    return out


def check_antidiagonal_sums(M: MPencil, P: MatrixPolynomial) -> bool:
    """Whether the anti-diagonal block sums of ``M`` reproduce ``P``'s
    coefficients within ``1e-12 * max_k ||A_k||_F``."""
    eps, eta = _infer_split(M, P.n)
    if eps + eta + 1 != P.d:
        raise DomainError("M block shape is inconsistent with P's grade")
    sums = _antidiagonal_coefficients(M, eps, eta, P.n)
    tol = 1e-12 * max(np.linalg.norm(P.coeffs[k]) for k in range(P.d + 1))
    return all(
        np.linalg.norm(sums[k] - P.coeffs[k]) <= tol for k in range(P.d + 1)
    )


def induced_polynomial(M: MPencil, eps: int, eta: int) -> MatrixPolynomial:
    """The grade ``eps+eta+1`` polynomial
    ``(Lambda_eta(lam)^T (x) I_n) M(lam) (Lambda_eps(lam) (x) I_n)``, expanded
    symbolically in ``lam``."""
    rows, cols = M.m1.shape
    if rows % (eta + 1) or cols % (eps + 1):
        raise DomainError("M shape does not split into the requested blocks")
    n = rows // (eta + 1)
    if cols != (eps + 1) * n:
        raise DomainError("M block shape is inconsistent with (eps, eta)")
    return MatrixPolynomial(_antidiagonal_coefficients(M, eps, eta, n))


# --------------------------------------------------------------------------
# assembly and presets
# --------------------------------------------------------------------------

def _block_gather_indices(perm: tuple[int, ...], n: int) -> np.ndarray:
    return np.concatenate([np.arange(p * n, (p + 1) * n) for p in perm])


def assemble(P: MatrixPolynomial, form: BlockKroneckerForm) -> Pencil:
    """Build the (permuted) block Kronecker pencil as ``Pencil(A, B)``.

    The core pencil ``[[M(lam), L_eta^T (x) I], [L_eps (x) I, 0]]`` is linear
    in ``lam``; its constant part becomes ``A`` and minus its ``lam``
    coefficient becomes ``B`` (so that ``A - lam*B`` evaluates the pencil).
    Block rows/columns are then gathered through the form's permutations.
    """
    if P.n != form.n:
        raise DomainError(f"P has block size {P.n}, form expects {form.n}")
    if P.d != form.d:
        raise DomainError(f"P has grade {P.d}, form expects {form.d}")
    eps, eta, n = form.eps, form.eta, form.n
    d = form.d
    N = d * n
    top = (eta + 1) * n
    eye = np.eye(n, dtype=np.complex128)
    const = np.zeros((N, N), dtype=np.complex128)
    lin = np.zeros((N, N), dtype=np.complex128)
    const[:top, :(eps + 1) * n] = form.M.m0c
    lin[:top, :(eps + 1) * n] = form.M.m1
    if eta > 0:
        h0, h1 = _lk_parts(eta)
        const[:top, (eps + 1) * n:] = np.kron(h0.T, eye)
        lin[:top, (eps + 1) * n:] = np.kron(h1.T, eye)
    if eps > 0:
        e0, e1 = _lk_parts(eps)
        const[top:, :(eps + 1) * n] = np.kron(e0, eye)
        lin[top:, :(eps + 1) * n] = np.kron(e1, eye)
    ridx = _block_gather_indices(form.row_perm, n)
    cidx = _block_gather_indices(form.col_perm, n)
    A = const[np.ix_(ridx, cidx)]
    B = -lin[np.ix_(ridx, cidx)]
    return Pencil(A=A, B=B)


def _identity_perm(d: int) -> tuple[int, ...]:
    return tuple(range(d))


def preset_linearization(P: MatrixPolynomial, label: str) -> BlockKroneckerForm:
    """Named linearization presets, all unpermuted block Kronecker pencils.

    * ``l1``: the block companion form -- ``eps = d-1``, ``eta = 0``, ``M0``
      (any grade).
    * ``l2``: ``eps = d-2``, ``eta = 1``, ``M0`` (grade >= 2).
    * ``l3``: balanced split ``eps = eta = (d-1)/2`` with block-diagonal
      ``M(lam) = diag(lam*A_d + A_{d-1}, lam*A_{d-2} + A_{d-3}, ...)``
      (odd grade).
    """
    key = label.lower()
    d, n = P.d, P.n
    if key == "l1":
        eps, eta = d - 1, 0
        M = m0_pencil(P, eps, eta)
    elif key == "l2":
        if d < 2:
            raise DomainError("preset l2 needs grade >= 2")
        eps, eta = d - 2, 1
        M = m0_pencil(P, eps, eta)
    elif key == "l3":
        if d % 2 != 1:
            raise DomainError("preset l3 needs odd grade")
        eps = eta = (d - 1) // 2
        m1 = np.zeros(((eta + 1) * n, (eps + 1) * n), dtype=np.complex128)
        m0c = np.zeros_like(m1)
        for i in range(eta + 1):
            m1[i * n:(i + 1) * n, i * n:(i + 1) * n] = P.coeffs[d - 2 * i]
            m0c[i * n:(i + 1) * n, i * n:(i + 1) * n] = P.coeffs[d - 2 * i - 1]
        M = MPencil(m1=m1, m0c=m0c)
    else:
        raise DomainError(f"unknown preset {label!r} (choose l1, l2, or l3)")
    return BlockKroneckerForm(
        eps=eps,
        eta=eta,
        n=n,
        M=M,
        row_perm=_identity_perm(d),
        col_perm=_identity_perm(d),
        label=key,
    )


# --------------------------------------------------------------------------
# permutation discovery
# --------------------------------------------------------------------------

def _block_grid(X: np.ndarray, d: int, n: int) -> list[list[np.ndarray]]:
    return [
        [X[i * n:(i + 1) * n, j * n:(j + 1) * n] for j in range(d)]
        for i in range(d)
    ]


def _block_key(blk: np.ndarray, scale: float) -> bytes:
    q = np.round(blk.view(np.float64) * (2.0 ** 36) / scale).astype(np.int64)
    return q.tobytes()


def discover_permutation(
    target: Pencil,
    P: MatrixPolynomial,
    eps: int,
    eta: int,
    M: MPencil,
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Find block permutations mapping the core pencil onto ``target``.

    Searches gather permutations ``(row_perm, col_perm)`` such that
    ``assembled[i, j] = core[row_perm[i], col_perm[j]]`` matches ``target``
    entrywise (relative tolerance 1e-12) at two fixed pseudorandom values of
    ``lam``.  Candidate row maps are pruned by comparing the multisets of
    quantized blocks in each block row, so the search is fast for ``d <= 6``.

    Raises :class:`~pepbound.exceptions.NoMatch` when no permutation works,
    which signals a wrong ``(eps, eta, M)`` hypothesis.
    """
    d = eps + eta + 1
    n = P.n
    if target.N != d * n:
        raise DomainError("target size does not match (eps + eta + 1) * n")
    core_form = BlockKroneckerForm(
        eps=eps, eta=eta, n=n, M=M,
        row_perm=_identity_perm(d), col_perm=_identity_perm(d),
    )
    core = assemble(P, core_form)
    gen = SplitMix64(0xB10CF0F2)
    lams = [gen.complex_normal(), gen.complex_normal()]
    T1 = target.evaluate(lams[0])
    C1 = core.evaluate(lams[0])
    scale = max(1.0, float(np.max(np.abs(T1))), float(np.max(np.abs(C1))))
    tgrid = _block_grid(T1, d, n)
    cgrid = _block_grid(C1, d, n)
    tkeys = [[_block_key(b, scale) for b in row] for row in tgrid]
    ckeys = [[_block_key(b, scale) for b in row] for row in cgrid]
    # Row candidates: core row r can play target row i only if the block
    # multisets agree (column order is free).
    row_cands = [
        [r for r in range(d) if sorted(ckeys[r]) == sorted(tkeys[i])]
        for i in range(d)
    ]
    if any(not c for c in row_cands):
        raise NoMatch("no block-row correspondence exists")

    tol = 1e-12 * scale

    def matches(rp: tuple[int, ...], cp: tuple[int, ...], lam: complex) -> bool:
        Tm = target.evaluate(lam)
        Cm = core.evaluate(lam)
        ridx = _block_gather_indices(rp, n)
        cidx = _block_gather_indices(cp, n)
        return bool(np.max(np.abs(Cm[np.ix_(ridx, cidx)] - Tm)) <= 1e-12 * max(
            1.0, float(np.max(np.abs(Tm)))
        ))

    for rp in itertools.permutations(range(d)):
        if any(rp[i] not in row_cands[i] for i in range(d)):
            continue
        # Columns: determined per position by exact block agreement down the
        # whole column; backtrack over ties.
        col_cands = []
        ok = True
        for j in range(d):
            opts = [
                c
                for c in range(d)
                if all(
                    np.max(np.abs(cgrid[rp[i]][c] - tgrid[i][j])) <= tol
                    for i in range(d)
                )
            ]
            if not opts:
                ok = False
                break
            col_cands.append(opts)
        if not ok:
            continue
        for cp in itertools.product(*col_cands):
            if sorted(cp) != list(range(d)):
                continue
            if matches(rp, cp, lams[1]):
                return tuple(rp), tuple(cp)
    raise NoMatch("no block permutation reproduces the target pencil")


# --------------------------------------------------------------------------
# right-sided factorizations
# --------------------------------------------------------------------------

def right_factor(form: BlockKroneckerForm, variant: str) -> FactorPair:
    """Right-sided factorization of the assembled pencil.

    Variant ``H1`` (valid on all of C): ``H`` stacks ``Lambda_eps (x) I``
    over ``R_eta M (Lambda_eps (x) I)`` and ``g = e_{eta+1}``; the block
    ``eps`` (0-based) of the stack is ``I_n``.  Variant ``H2`` (valid for
    ``lam != 0``): ``H`` stacks ``lam^-eps (Lambda_eps (x) I)`` over
    ``-lam^-(d-1) S_eta M (Lambda_eps (x) I)`` and ``g = lam^-(d-1) e_1``;
    block 0 is ``I_n``.  The minus sign on the ``S_eta`` term is forced by
    this module's block conventions: the contraction
    ``lam^k I - L_k(lam)^T S_k(lam) = e_1 Lambda_k(lam)^T`` holds
    identically, while its plus-sign counterpart already fails at k = 1
    (only the eta = 0 case, where ``S_eta`` is empty, hides this).
    The form's block permutations are folded in:
    ``H <- (Pi_c^T (x) I) H``, ``g <- Pi_r g``, and the identity block index
    is remapped accordingly.
    """
    key = variant.upper()
    if key not in ("H1", "H2"):
        raise DomainError(f"unknown variant {variant!r} (choose H1 or H2)")
    eps, eta, n = form.eps, form.eta, form.n
    d = form.d
    M = form.M
    rp, cp = form.row_perm, form.col_perm
    # (Pi_c^T (x) I) H gathers block row i of the result from block row
    # cp[i] of the unpermuted stack.
    hidx = _block_gather_indices(cp, n)

    if key == "H1":
        core_identity = eps
        domain = "allC"

        def h(lam: complex) -> np.ndarray:
            top = lambda_block(eps, lam, n)
            bottom = r_block(eta, lam, n) @ M.evaluate(lam) @ top
            return np.concatenate([top, bottom], axis=0)[hidx]

        def g(lam: complex) -> np.ndarray:
            out = np.zeros(d, dtype=np.complex128)
            out[rp.index(eta)] = 1.0
            return out

    else:
        core_identity = 0
        domain = "nonzeroC"

        def h(lam: complex) -> np.ndarray:
            lam = complex(lam)
            if lam == 0:
                raise DomainError("variant H2 is not defined at lam = 0")
            top = lam ** (-eps) * lambda_block(eps, lam, n)
            bottom = (
                -lam ** (-(d - 1))
                * (s_block(eta, lam, n) @ M.evaluate(lam) @ lambda_block(eps, lam, n))
            )
            return np.concatenate([top, bottom], axis=0)[hidx]

        def g(lam: complex) -> np.ndarray:
            lam = complex(lam)
            if lam == 0:
                raise DomainError("variant H2 is not defined at lam = 0")
            out = np.zeros(d, dtype=np.complex128)
            out[rp.index(0)] = lam ** (-(d - 1))
            return out

    return FactorPair(
        h=h,
        g=g,
        identity_block=cp.index(core_identity),
        domain=domain,
        variant=key,
        d=d,
        n=n,
    )


def recover_eigenvector(
    v: np.ndarray,
    form: BlockKroneckerForm,
    lam: complex,
    poly: MatrixPolynomial | None = None,
) -> np.ndarray:
    """Extract the polynomial eigenvector from a pencil eigenvector.

    For an exact eigenpair the pencil eigenvector is ``H(lam) x``, so ``x``
    sits verbatim in the identity block of the factorization -- variant H1
    for ``|lam| < 1``, variant H2 otherwise.  If the designated block has
    norm below ``1e-8 * ||v||`` (near-degenerate structure), the fallback
    scans all ``d`` blocks and picks the one minimizing
    ``||P(lam) v_j|| / ||v_j||`` when ``poly`` is given, or the largest-norm
    block otherwise.  The result is normalized to unit Euclidean norm.
    """
    v = np.asarray(v, dtype=np.complex128).ravel()
    d, n = form.d, form.n
    if v.shape[0] != d * n:
        raise DomainError(f"vector has length {v.shape[0]}, expected {d * n}")
    lam = complex(lam)
    variant = "H1" if abs(lam) < 1.0 else "H2"
    fp = right_factor(form, variant)
    blocks = [v[j * n:(j + 1) * n] for j in range(d)]
    norms = [float(np.linalg.norm(b)) for b in blocks]
    total = float(np.linalg.norm(v))
    if total == 0.0:
        raise NotAnEigenvector("all candidate blocks are numerically zero")
    pick = fp.identity_block
    if norms[pick] < 1e-8 * total:
        if poly is not None:
            Pm = evaluate(poly, lam)
            scores = [
                float(np.linalg.norm(Pm @ blocks[j]) / norms[j]) if norms[j] > 0 else np.inf
                for j in range(d)
            ]
            pick = int(np.argmin(scores))
        else:
            pick = int(np.argmax(norms))
        if norms[pick] == 0.0:
            raise NotAnEigenvector("all candidate blocks are numerically zero")
    return blocks[pick] / norms[pick]


def verify_right_sided_factorization(
    L: Pencil,
    fp: FactorPair,
    P: MatrixPolynomial,
    samples,
) -> FactorizationReport:
    """Check ``L(lam) H(lam) = g(lam) (x) P(lam)`` at the given samples.

    Per sample, the entrywise residual is measured relative to the largest
    entry of ``g (x) P``; the full-column-rank witness is ``sigma_min(H)``.
    The report passes iff every residual is ``<= 1e-12`` and every
    ``sigma_min`` exceeds ``1e-10``.
    """
    from .denseig import smallest_singular_value

    residuals = []
    sigmas = []
    gnorms = []
    samples = tuple(complex(s) for s in samples)
    for lam in samples:
        if fp.domain == "nonzeroC" and lam == 0:
            raise DomainError("sample lam = 0 is outside the factorization domain")
        Hm = fp.h(lam)
        gv = fp.g(lam)
        rhs = np.kron(gv.reshape(-1, 1), evaluate(P, lam))
        diff = L.evaluate(lam) @ Hm - rhs
        scale = max(float(np.max(np.abs(rhs))), 1e-300)
        residuals.append(float(np.max(np.abs(diff))) / scale)
        sigmas.append(smallest_singular_value(Hm))
        gnorms.append(float(np.linalg.norm(gv)))
    passed = all(r <= 1e-12 for r in residuals) and all(
        s > 1e-10 for s in sigmas
    ) and all(g > 0 for g in gnorms)
    return FactorizationReport(
        samples=samples,
        residuals=tuple(residuals),
        sigma_mins=tuple(sigmas),
        g_norms=tuple(gnorms),
        passed=passed,
    )
