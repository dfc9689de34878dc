"""Matrix polynomials: representation, evaluation, residuals, scaling, generators.

A matrix polynomial of grade ``d`` is ``P(lam) = sum_{i=0}^{d} lam**i * A_i``
with square complex coefficient matrices ``A_i``.  The grade is declared by
the coefficient list length; the leading coefficient may be zero.  All values
here are immutable after construction and all operations are pure functions,
so everything in this module is safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError
from .rng import SplitMix64

__all__ = [
    "MatrixPolynomial",
    "PolySpec",
    "P2_SCALES_D5",
    "evaluate",
    "eval_derivative",
    "rev",
    "residual_norm",
    "scale_max_norm",
    "random_polynomial",
    "save_polynomial",
    "load_polynomial",
]

# Per-coefficient magnitudes of the widely-scaled generator at degree 5,
# ascending (constant term first).
P2_SCALES_D5 = (1.0, 1.0e4, 1.0e-2, 1.0e5, 1.0, 1.0e-1)

# Fixed probe point for the probabilistic regularity check: an arbitrary
# constant away from structured spectra (not a root of anything by design).
_REGULARITY_PROBE = complex(0.52874523012052684, 0.81624695920962414)


# --------------------------------------------------------------------------
# types
# --------------------------------------------------------------------------

class MatrixPolynomial:
    """Grade-``d`` matrix polynomial with dense complex coefficients.

    Parameters
    ----------
    coeffs:
        Sequence of ``d + 1`` square complex matrices, ascending degree
        (``A_0`` first).  Stored as one read-only ``(d+1, n, n)`` array.
    """

    __slots__ = ("_coeffs", "_regular")

    def __init__(self, coeffs) -> None:
        arr = np.asarray(coeffs, dtype=np.complex128)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise DomainError(
                "coefficients must form a (d+1, n, n) stack of square matrices"
            )
        if arr.shape[0] < 2:
            raise DomainError("grade must be at least 1 (need d+1 >= 2 coefficients)")
        if not np.all(np.isfinite(arr)):
            raise DomainError("coefficients must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        self._coeffs = arr
        self._regular: bool | None = None

    @property
    def coeffs(self) -> np.ndarray:
        """Read-only ``(d+1, n, n)`` coefficient stack, ascending degree."""
        return self._coeffs

    @property
    def n(self) -> int:
        """Matrix dimension."""
        return self._coeffs.shape[1]

    @property
    def d(self) -> int:
        """Grade (declared coefficient count minus one)."""
        return self._coeffs.shape[0] - 1

    def coefficient(self, i: int) -> np.ndarray:
        """The degree-``i`` coefficient ``A_i``."""
        return self._coeffs[i]

    def probably_regular(self) -> bool:
        """Cheap probabilistic regularity check: ``det P(lam*) != 0`` at a
        fixed pseudorandom probe point (cached after the first call)."""
        if self._regular is None:
            val = evaluate(self, _REGULARITY_PROBE)
            sign, logdet = np.linalg.slogdet(val)
            self._regular = bool(sign != 0 and np.isfinite(logdet))
        return self._regular

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"MatrixPolynomial(n={self.n}, d={self.d})"


@dataclass(frozen=True)
class PolySpec:
    """Recipe for a named random test polynomial.

    ``kind`` selects the generator: ``"p1"`` draws every entry of every
    coefficient as a standard complex Gaussian; ``"p2"`` additionally
    multiplies coefficient ``i`` by ``scales[i]`` (defaulting to the d=5
    magnitude ladder :data:`P2_SCALES_D5`); ``"file"`` defers to a JSON file
    at ``path``.
    """

    kind: str
    n: int
    d: int
    seed: int
    scales: tuple[float, ...] | None = None
    path: str | None = None

    def __post_init__(self) -> None:
        kind = self.kind.lower()
        object.__setattr__(self, "kind", kind)
        if kind not in ("p1", "p2", "file"):
            raise DomainError(f"unknown polynomial kind {self.kind!r}")
        if kind == "file":
            if not self.path:
                raise DomainError("kind 'file' requires a path")
            return
        if self.n < 1 or self.d < 1:
            raise DomainError("need n >= 1 and d >= 1")
        if kind == "p2":
            scales = self.scales
            if scales is None:
                if self.d != 5:
                    raise DomainError(
                        "kind 'p2' has default scales only for d=5; "
                        "pass explicit scales for other degrees"
                    )
                scales = P2_SCALES_D5
            scales = tuple(float(s) for s in scales)
            if len(scales) != self.d + 1 or any(s <= 0 for s in scales):
                raise DomainError("scales must be d+1 positive reals")
            object.__setattr__(self, "scales", scales)


# --------------------------------------------------------------------------
# evaluation and residuals
# --------------------------------------------------------------------------

def evaluate(P: MatrixPolynomial, lam: complex) -> np.ndarray:
    """Evaluate ``P(lam)`` by the Horner recurrence."""
    lam = complex(lam)
    res = P.coeffs[P.d].copy()
    for i in range(P.d - 1, -1, -1):
        res *= lam
        res += P.coeffs[i]
    return res


def eval_derivative(P: MatrixPolynomial, lam: complex) -> np.ndarray:
    """Evaluate the first derivative ``P'(lam) = sum i * lam**(i-1) * A_i``."""
    lam = complex(lam)
    d = P.d
    res = d * P.coeffs[d].copy()
    for i in range(d - 1, 0, -1):
        res *= lam
        res += i * P.coeffs[i]
    return res


def rev(P: MatrixPolynomial) -> MatrixPolynomial:
    """Coefficient reversal: grade-``d`` polynomial with ``A_i -> A_{d-i}``.

    Satisfies ``evaluate(rev(P), lam) == lam**d * evaluate(P, 1/lam)`` for
    ``lam != 0`` and ``rev(rev(P)) == P``.
    """
    return MatrixPolynomial(P.coeffs[::-1])


def residual_norm(P: MatrixPolynomial, lam: complex, x: np.ndarray) -> float:
    """Euclidean residual ``||P(lam) @ x||_2``."""
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (P.n,):
        raise DomainError(f"vector has shape {x.shape}, expected ({P.n},)")
    return float(np.linalg.norm(evaluate(P, lam) @ x))


# --------------------------------------------------------------------------
# scaling and random generators
# --------------------------------------------------------------------------

def scale_max_norm(P: MatrixPolynomial) -> tuple[MatrixPolynomial, float]:
    """Divide all coefficients by ``max_i ||A_i||_2`` (spectral norm).

    Returns the scaled polynomial and the factor divided out.  After scaling
    the largest coefficient spectral norm is 1 up to round-off.
    """
    from .denseig import spectral_norm

    factor = max(spectral_norm(P.coeffs[i]) for i in range(P.d + 1))
    if factor == 0.0:
        raise DomainError("cannot scale the zero polynomial")
    return MatrixPolynomial(P.coeffs / factor), float(factor)


def random_polynomial(spec: PolySpec, scale: bool = True) -> MatrixPolynomial:
    """Draw the random polynomial described by ``spec``, deterministically.

    Entries are standard complex Gaussians (independent standard-normal real
    and imaginary parts) from the documented :class:`~pepbound.rng.SplitMix64`
    stream: coefficients ascending, entries row-major, real part before
    imaginary part.  For kind ``"p2"`` coefficient ``i`` is multiplied by
    ``spec.scales[i]``.  Unless ``scale`` is false, the result is passed
    through :func:`scale_max_norm` so the largest coefficient spectral norm
    is 1.
    """
    if spec.kind == "file":
        raise DomainError("random_polynomial requires kind 'p1' or 'p2'")
    gen = SplitMix64(spec.seed)
    coeffs = np.empty((spec.d + 1, spec.n, spec.n), dtype=np.complex128)
    for i in range(spec.d + 1):
        coeffs[i] = gen.complex_normal_matrix(spec.n, spec.n)
    if spec.kind == "p2":
        for i, s in enumerate(spec.scales):
            coeffs[i] *= s
    P = MatrixPolynomial(coeffs)
    if scale:
        P, _ = scale_max_norm(P)
    return P


# --------------------------------------------------------------------------
# JSON interchange
# --------------------------------------------------------------------------

def _matrix_to_json(A: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in A.ravel()]


def _matrix_from_json(entries, n: int, what: str) -> np.ndarray:
    if not isinstance(entries, list) or len(entries) != n * n:
        raise DomainError(f"{what}: expected {n * n} entries")
    out = np.empty(n * n, dtype=np.complex128)
    for k, pair in enumerate(entries):
        if not isinstance(pair, list) or len(pair) != 2:
            raise DomainError(f"{what}: entry {k} is not an [re, im] pair")
        out[k] = complex(float(pair[0]), float(pair[1]))
    return out.reshape(n, n)


def save_polynomial(path: str, P: MatrixPolynomial, extra: dict | None = None) -> None:
    """Write ``P`` to ``path`` in the JSON interchange format.

    ``extra`` merges additional top-level keys (used for reference caches).
    """
    doc = {
        "n": P.n,
        "d": P.d,
        "coeffs": [_matrix_to_json(P.coeffs[i]) for i in range(P.d + 1)],
    }
    if extra:
        doc.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


def load_polynomial(path: str) -> MatrixPolynomial:
    """Read a polynomial written by :func:`save_polynomial` (strict parse).

    Unknown extra keys (for example ``"refs"``) are tolerated and ignored;
    wrong structure or lengths raise :class:`~pepbound.exceptions.DomainError`.
    """
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return polynomial_from_document(doc)


def polynomial_from_document(doc: dict) -> MatrixPolynomial:
    """Strictly parse the JSON document structure into a polynomial."""
    if not isinstance(doc, dict):
        raise DomainError("polynomial document must be a JSON object")
    try:
        n = int(doc["n"])
        d = int(doc["d"])
        raw = doc["coeffs"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed polynomial document: {exc}") from exc
    if n < 1 or d < 1:
        raise DomainError("need n >= 1 and d >= 1")
    if not isinstance(raw, list) or len(raw) != d + 1:
        raise DomainError(f"expected {d + 1} coefficient matrices")
    coeffs = np.stack(
        [_matrix_from_json(raw[i], n, f"coefficient {i}") for i in range(d + 1)]
    )
    return MatrixPolynomial(coeffs)
