"""Tests for matrix-polynomial storage, evaluation and random instances."""

import json

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from pepbound.exceptions import DomainError
from pepbound.polyval import (
    MatrixPolynomial,
    P2_SCALES_D5,
    PolySpec,
    eval_derivative,
    evaluate,
    load_polynomial,
    polynomial_from_document,
    random_polynomial,
    residual_norm,
    rev,
    save_polynomial,
    scale_max_norm,
)
from pepbound.rng import SplitMix64


def _random_poly(seed: int, d: int, n: int) -> MatrixPolynomial:
    gen = SplitMix64(seed)
    return MatrixPolynomial(
        np.stack([gen.complex_normal_matrix(n, n) for _ in range(d + 1)])
    )


# =======================
# type invariants
# =======================

def test_constructor_rejects_bad_shapes():
    with pytest.raises(DomainError):
        MatrixPolynomial(np.zeros((2, 3, 2)))  # non-square
    with pytest.raises(DomainError):
        MatrixPolynomial(np.zeros((1, 2, 2)))  # grade 0
    bad = np.zeros((2, 2, 2), dtype=np.complex128)
    bad[0, 0, 0] = np.nan
    with pytest.raises(DomainError):
        MatrixPolynomial(bad)


def test_coefficients_are_read_only():
    P = _random_poly(1, 2, 3)
    with pytest.raises(ValueError):
        P.coeffs[0, 0, 0] = 0.0
    assert P.n == 3 and P.d == 2
    assert_array_equal(P.coefficient(1), P.coeffs[1])


def test_probably_regular():
    P = _random_poly(2, 3, 4)
    assert P.probably_regular()
    # identically singular polynomial: every coefficient kills e2
    sing = np.zeros((3, 2, 2), dtype=np.complex128)
    sing[:, 0, 0] = [1.0, 2.0, 3.0]
    assert not MatrixPolynomial(sing).probably_regular()


# =======================
# evaluation
# =======================

def test_evaluate_constant_polynomial():
    eye = np.eye(2, dtype=np.complex128)
    P = MatrixPolynomial(np.stack([eye, np.zeros_like(eye)]))
    assert_array_equal(evaluate(P, 7.0), eye)


def test_evaluate_scalar_diagonal_case():
    eye = np.eye(2, dtype=np.complex128)
    P = MatrixPolynomial(np.stack([-eye, np.zeros_like(eye), eye]))
    assert_allclose(evaluate(P, 2.0), 3.0 * eye, rtol=0, atol=1e-15)


def test_evaluate_matches_power_sum_oracle():
    gen = SplitMix64(42)
    for trial in range(30):
        d = 1 + trial % 8
        n = 2 + trial % 9
        P = _random_poly(1000 + trial, d, n)
        lam = gen.complex_normal()
        naive = sum(lam ** i * P.coeffs[i] for i in range(d + 1))
        scale = sum(abs(lam) ** i * np.linalg.norm(P.coeffs[i]) for i in range(d + 1))
        assert np.max(np.abs(evaluate(P, lam) - naive)) <= 1e-13 * scale


def test_eval_derivative_power_rule():
    eye = np.eye(3, dtype=np.complex128)
    P = MatrixPolynomial(np.stack([-eye, np.zeros_like(eye), eye]))
    assert_allclose(eval_derivative(P, 2.0), 4.0 * eye, rtol=0, atol=1e-14)
    const = MatrixPolynomial(np.stack([eye, np.zeros_like(eye)]))
    assert_array_equal(eval_derivative(const, 5.0), np.zeros((3, 3)))


def test_eval_derivative_matches_finite_differences():
    gen = SplitMix64(43)
    for trial in range(10):
        P = _random_poly(2000 + trial, 3 + trial % 3, 3)
        lam = gen.complex_normal()
        h = 1e-6
        fd = (evaluate(P, lam + h) - evaluate(P, lam - h)) / (2 * h)
        dP = eval_derivative(P, lam)
        assert np.max(np.abs(dP - fd)) <= 1e-8 * max(np.max(np.abs(dP)), 1.0)


# =======================
# reversal
# =======================

def test_rev_swaps_coefficients():
    P = _random_poly(3, 1, 2)
    R = rev(P)
    assert_array_equal(R.coeffs[0], P.coeffs[1])
    assert_array_equal(R.coeffs[1], P.coeffs[0])
    assert_array_equal(rev(R).coeffs, P.coeffs)


def test_rev_palindromic_fixed_point():
    A = SplitMix64(4).complex_normal_matrix(2, 2)
    P = MatrixPolynomial(np.stack([A, 2 * A, A]))
    assert_array_equal(rev(P).coeffs, P.coeffs)


def test_rev_evaluation_identity():
    gen = SplitMix64(44)
    for trial in range(10):
        P = _random_poly(3000 + trial, 4, 3)
        lam = 2.0 + 0.3j * gen.normal()
        lhs = evaluate(rev(P), lam)
        rhs = lam ** P.d * evaluate(P, 1.0 / lam)
        assert np.max(np.abs(lhs - rhs)) <= 1e-13 * np.max(np.abs(rhs))


def test_rev_reciprocal_spectrum():
    # finite nonzero eigenvalues of rev(P) are reciprocals of those of P
    from pepbound.denseig import gep_eigenpairs
    from pepbound.kronlin import assemble, preset_linearization

    P = random_polynomial(PolySpec(kind="p1", n=3, d=3, seed=77))
    lams = []
    for Q in (P, rev(P)):
        pencil = assemble(Q, preset_linearization(Q, "l1"))
        vals = [p.lam for p in gep_eigenpairs(pencil.A, pencil.B) if p.finite]
        lams.append(sorted(vals, key=abs))
    recip = sorted((1.0 / lam for lam in lams[1]), key=abs)
    for a, b in zip(lams[0], recip):
        assert abs(a - b) <= 1e-8 * abs(a)


# =======================
# residual norm
# =======================

def test_residual_norm_scalar_case():
    one = np.ones((1, 1), dtype=np.complex128)
    P = MatrixPolynomial(np.stack([-one, one]))  # p(lam) = lam - 1
    assert residual_norm(P, 3.0, np.array([1.0 + 0j])) == 2.0


def test_residual_norm_matches_direct_product():
    gen = SplitMix64(45)
    for trial in range(10):
        P = _random_poly(4000 + trial, 3, 4)
        lam = gen.complex_normal()
        x = np.array([gen.complex_normal() for _ in range(4)])
        assert residual_norm(P, lam, x) == float(
            np.linalg.norm(evaluate(P, lam) @ x)
        )


def test_residual_norm_dimension_mismatch():
    P = _random_poly(5, 2, 3)
    with pytest.raises(DomainError):
        residual_norm(P, 1.0, np.ones(4, dtype=np.complex128))


# =======================
# scaling
# =======================

def test_scale_max_norm_single_coefficient():
    eye = np.eye(3, dtype=np.complex128)
    P = MatrixPolynomial(np.stack([2 * eye, np.zeros_like(eye)]))
    Q, factor = scale_max_norm(P)
    assert_allclose(factor, 2.0, rtol=1e-14)
    assert_allclose(Q.coeffs[0], eye, rtol=1e-14)


def test_scale_max_norm_idempotent():
    P = _random_poly(6, 3, 4)
    Q, _ = scale_max_norm(P)
    R, factor = scale_max_norm(Q)
    assert abs(factor - 1.0) <= 1e-13
    assert np.max(np.abs(R.coeffs - Q.coeffs)) <= 1e-13


def test_scale_max_norm_rejects_zero_polynomial():
    with pytest.raises(DomainError):
        scale_max_norm(MatrixPolynomial(np.zeros((2, 2, 2))))


def test_scaled_polynomial_has_unit_max_spectral_norm():
    # oracle: numpy's SVD, independent of the in-house one used for scaling
    P = random_polynomial(PolySpec(kind="p2", n=6, d=5, seed=11))
    norms = [np.linalg.svd(P.coeffs[i], compute_uv=False)[0] for i in range(6)]
    assert 1 - 1e-12 <= max(norms) <= 1 + 1e-12


def test_scaling_preserves_eigenvalues():
    from pepbound.denseig import gep_eigenpairs
    from pepbound.kronlin import assemble, preset_linearization

    P = random_polynomial(PolySpec(kind="p1", n=4, d=3, seed=88), scale=False)
    Q, _ = scale_max_norm(P)
    spectra = []
    for poly in (P, Q):
        pencil = assemble(poly, preset_linearization(poly, "l1"))
        vals = sorted(
            (p.lam for p in gep_eigenpairs(pencil.A, pencil.B) if p.finite),
            key=lambda z: (abs(z), z.real, z.imag),
        )
        spectra.append(vals)
    for a, b in zip(*spectra):
        assert abs(a - b) <= 1e-10 * max(abs(a), 1.0)


# =======================
# random instances
# =======================

def test_random_polynomial_is_deterministic():
    spec = PolySpec(kind="p1", n=4, d=3, seed=123)
    assert_array_equal(
        random_polynomial(spec).coeffs, random_polynomial(spec).coeffs
    )


def test_random_polynomial_draw_order():
    # coefficients ascending, entries row-major, from one documented stream
    spec = PolySpec(kind="p1", n=3, d=2, seed=55)
    P = random_polynomial(spec, scale=False)
    ref = SplitMix64(55)
    expected = np.stack([ref.complex_normal_matrix(3, 3) for _ in range(3)])
    assert_array_equal(P.coeffs, expected)


def test_p1_entry_second_moment():
    # law of large numbers over 6 * 25 * 25 = 3750 entries; E|z|^2 = 2
    P = random_polynomial(PolySpec(kind="p1", n=25, d=5, seed=9), scale=False)
    m = float(np.mean(np.abs(P.coeffs) ** 2))
    assert 1.6 <= m <= 2.4


def test_p2_applies_scale_ladder():
    p1 = random_polynomial(PolySpec(kind="p1", n=4, d=5, seed=10), scale=False)
    p2 = random_polynomial(PolySpec(kind="p2", n=4, d=5, seed=10), scale=False)
    assert P2_SCALES_D5 == (1.0, 1e4, 1e-2, 1e5, 1.0, 1e-1)
    for i, s in enumerate(P2_SCALES_D5):
        assert_array_equal(p2.coeffs[i], p1.coeffs[i] * s)


def test_p2_default_scales_require_degree_5():
    with pytest.raises(DomainError):
        PolySpec(kind="p2", n=3, d=4, seed=1)
    spec = PolySpec(kind="p2", n=3, d=2, seed=1, scales=(1.0, 10.0, 0.1))
    assert random_polynomial(spec).d == 2


def test_polyspec_validation():
    with pytest.raises(DomainError):
        PolySpec(kind="p9", n=3, d=2, seed=1)
    with pytest.raises(DomainError):
        PolySpec(kind="p1", n=0, d=2, seed=1)
    with pytest.raises(DomainError):
        PolySpec(kind="file", n=3, d=2, seed=1)  # missing path
    with pytest.raises(DomainError):
        PolySpec(kind="p2", n=3, d=2, seed=1, scales=(1.0, -1.0, 2.0))


# =======================
# JSON interchange
# =======================

def test_json_round_trip(tmp_path):
    P = _random_poly(7, 3, 4)
    path = str(tmp_path / "poly.json")
    save_polynomial(path, P)
    Q = load_polynomial(path)
    assert_array_equal(Q.coeffs, P.coeffs)


def test_json_extra_keys_are_preserved_and_ignored(tmp_path):
    P = _random_poly(8, 1, 2)
    path = str(tmp_path / "poly.json")
    save_polynomial(path, P, extra={"note": "hello"})
    with open(path, encoding="utf-8") as fh:
        assert json.load(fh)["note"] == "hello"
    assert_array_equal(load_polynomial(path).coeffs, P.coeffs)


def test_json_strict_parse_failures(tmp_path):
    with pytest.raises(DomainError):
        polynomial_from_document([1, 2, 3])
    with pytest.raises(DomainError):
        polynomial_from_document({"n": 2, "d": 1})  # no coeffs
    with pytest.raises(DomainError):
        polynomial_from_document({"n": 2, "d": 1, "coeffs": [[[[0, 0]] * 2] * 2]})
    # wrong row length inside a matrix
    doc = {
        "n": 2,
        "d": 1,
        "coeffs": [[[[0, 0], [0, 0]], [[0, 0]]], [[[0, 0], [0, 0]], [[0, 0], [0, 0]]]],
    }
    with pytest.raises(DomainError):
        polynomial_from_document(doc)
    with pytest.raises(FileNotFoundError):
        load_polynomial(str(tmp_path / "missing.json"))


# =======================
# cross-module residual identity
# =======================

def test_residual_equals_scaled_linearization_residual():
    # ||P(lam) x|| = ||L(lam) H(lam) x|| / ||g(lam)|| for factorized pencils
    from pepbound.kronlin import assemble, preset_linearization, right_factor

    P = random_polynomial(PolySpec(kind="p1", n=3, d=4, seed=99))
    form = preset_linearization(P, "l1")
    pencil = assemble(P, form)
    gen = SplitMix64(1234)
    for trial in range(20):
        lam = gen.complex_normal()
        x = np.array([gen.complex_normal() for _ in range(3)])
        fp = right_factor(form, "H1" if abs(lam) < 1 else "H2")
        lhs = residual_norm(P, lam, x)
        rhs = float(
            np.linalg.norm(pencil.evaluate(lam) @ (fp.h(lam) @ x))
            / np.linalg.norm(fp.g(lam))
        )
        assert abs(lhs - rhs) <= 1e-12 * max(rhs, 1e-30)
