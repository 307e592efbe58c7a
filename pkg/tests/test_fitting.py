import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import least_squares

from tvaudit.errors import InsufficientPoints, InvalidParams, SingularSystem
from tvaudit.fitting import (
    AFFINE,
    EXPECTED_DTV,
    SQRT_AFFINE,
    BasisFit,
    ExpectedDtvFit,
    design_matrix,
    eval_basis,
    eval_expected_dtv,
    fit_basis,
    fit_expected_dtv,
)


def test_two_point_interpolation_is_exact():
    fit = fit_expected_dtv([(4, 10), (16, 28)])
    assert (fit.a, fit.b) == (1.0, 3.0)
    assert fit.residual_sum_squares == 0.0
    assert fit.point_count == 2


def test_pure_linear_model():
    fit = fit_expected_dtv([(n, 2.5 * n) for n in (1, 4, 9, 16)])
    assert fit.a == pytest.approx(2.5, rel=1e-14)
    assert fit.b == pytest.approx(0.0, abs=1e-12)
    assert fit.residual_sum_squares == pytest.approx(0.0, abs=1e-20)


def test_single_point_is_underdetermined():
    with pytest.raises(InsufficientPoints):
        fit_expected_dtv([(4, 10)])


def test_repeated_size_is_singular():
    with pytest.raises(SingularSystem):
        fit_expected_dtv([(9, 3), (9, 5), (9, 4)])


def test_nonpositive_size_rejected():
    with pytest.raises(InvalidParams):
        fit_expected_dtv([(0, 1), (4, 3)])


def test_recovers_random_coefficients(rng):
    for _ in range(50):
        a, b = rng.uniform(-5, 5, size=2)
        n = rng.integers(1, 10**6, size=50)
        fit = fit_expected_dtv(zip(n, a * n + b * np.sqrt(n)))
        assert fit.a == pytest.approx(a, rel=1e-9)
        assert fit.b == pytest.approx(b, rel=1e-9)


def test_eval_expected_dtv():
    fit = ExpectedDtvFit(1.0, 3.0, 2, 0.0)
    assert eval_expected_dtv(fit, 16) == 28.0
    assert eval_expected_dtv(ExpectedDtvFit(0.0, 0.0, 2, 0.0), 12345) == 0.0
    np.testing.assert_allclose(eval_expected_dtv(fit, np.array([4, 16])), [10, 28])


def test_fit_basis_affine_exact():
    fit = fit_basis([(n, 2 * n + 5) for n in (1, 3, 10, 40)], AFFINE)
    assert fit.coefficients == pytest.approx((2, 5), rel=1e-13)
    assert fit.residual_sum_squares == pytest.approx(0, abs=1e-20)


def test_fit_basis_three_terms_recovers_generator():
    pts = [(n, n + 2 * np.sqrt(n) + 7) for n in (1, 4, 9, 16)]
    fit = fit_basis(pts, SQRT_AFFINE)
    assert fit.coefficients == pytest.approx((1, 2, 7), rel=1e-12)
    assert fit.residual_sum_squares < 1e-20


def test_fit_basis_validates_basis():
    with pytest.raises(InvalidParams):
        fit_basis([(1, 1), (2, 2)], ("N", "N^2"))
    with pytest.raises(InvalidParams):
        fit_basis([(1, 1), (2, 2)], ("N", "N"))
    with pytest.raises(InsufficientPoints):
        fit_basis([(1, 1), (2, 2)], SQRT_AFFINE)


def test_eval_basis_examples():
    assert eval_basis(BasisFit(AFFINE, (4.017e-5, 2.128), 7106, 0), 10**6) == pytest.approx(42.298)
    assert eval_basis(BasisFit(("1",), (5.0,), 1, 0), 777) == 5.0
    assert eval_basis(BasisFit(SQRT_AFFINE, (1.0, 2.0, 7.0), 4, 0), 9) == 22.0


def test_scale_invariant_singularity_check():
    # sizes near 1e6 must not look singular just because N^2 entries are huge
    n = np.array([990_000, 1_000_000, 1_010_000, 1_020_000])
    fit = fit_basis(zip(n, 3e-5 * n + 2), AFFINE)
    assert fit.coefficients == pytest.approx((3e-5, 2), rel=1e-6)


@pytest.mark.parametrize("basis", [EXPECTED_DTV, AFFINE, SQRT_AFFINE])
def test_matches_numeric_minimizer(rng, basis):
    n = rng.integers(1, 400, size=25).astype(float)
    y = 0.3 * n + 4 * np.sqrt(n) + rng.normal(0, 3, size=n.size)
    X = design_matrix(n, basis)
    loss = lambda c: float(((y - X @ c) ** 2).sum())
    # iterative trust-region minimiser over column-scaled variables
    norms = np.linalg.norm(X, axis=0)
    res = least_squares(lambda z: y - X @ (z / norms), np.zeros(len(basis)),
                        xtol=1e-15, ftol=1e-15, gtol=1e-15)
    ref = res.x / norms
    fit = fit_basis(zip(n, y), basis)
    np.testing.assert_allclose(fit.coefficients, ref, rtol=1e-6, atol=1e-6)
    assert fit.residual_sum_squares == pytest.approx(loss(np.array(fit.coefficients)), rel=1e-12)


def test_adding_on_curve_point_keeps_fit(rng):
    n = rng.integers(1, 10**4, size=30)
    y = 0.5 * n + 3 * np.sqrt(n) + rng.normal(0, 5, size=30)
    fit = fit_expected_dtv(zip(n, y))
    extra = 5000
    fit2 = fit_expected_dtv(list(zip(n, y)) + [(extra, eval_expected_dtv(fit, extra))])
    assert fit2.a == pytest.approx(fit.a, rel=1e-9)
    assert fit2.b == pytest.approx(fit.b, rel=1e-9)


def test_rss_nonincreasing_for_nested_bases(rng):
    n = rng.integers(1, 10**5, size=40)
    y = 1e-4 * n + 2 + rng.normal(0, 0.5, size=40)
    rss = [fit_basis(zip(n, y), b).residual_sum_squares for b in (("1",), AFFINE, SQRT_AFFINE)]
    assert rss[0] >= rss[1] >= rss[2] - 1e-9 * rss[2]


@given(st.floats(min_value=-1e3, max_value=1e3, allow_nan=False).filter(lambda s: abs(s) > 1e-6))
def test_fit_is_equivariant_under_scaling(s):
    pts = [(1, 3.0), (5, 4.5), (20, 11.0), (64, 40.0)]
    base = fit_basis(pts, SQRT_AFFINE)
    scaled = fit_basis([(n, s * y) for n, y in pts], SQRT_AFFINE)
    np.testing.assert_allclose(scaled.coefficients, s * np.array(base.coefficients),
                               rtol=1e-9, atol=1e-9 * abs(s))
