import math
from fractions import Fraction

import numpy as np
import pytest

from stovol.kernels import parabolic_kernel, riesz_kernel, tempered_kernel, KernelDomainError
from stovol.quadrature import (
    ContourUnderflowError,
    WeightLengthError,
    binomial_coefficients,
    convolve_history,
    weights_closed_form,
    weights_contour,
)


def series_oracle(rho: Fraction, n: int) -> list[Fraction]:
    """Term-by-term binomial series of (1-z)^(1-rho) in exact arithmetic."""
    # (1-z)^(-a) = sum_j rising(a, j)/j! z^j with a = rho - 1
    a = rho - 1
    coeffs = [Fraction(1)]
    for j in range(1, n + 1):
        coeffs.append(coeffs[-1] * (a + j - 1) / j)
    return coeffs


def test_riesz_first_coefficients_match_exact_series():
    oracle = series_oracle(Fraction(3, 2), 3)
    assert [float(c) for c in oracle] == [1.0, 0.5, 0.375, 0.3125]
    got = weights_closed_form(riesz_kernel(1.5), k=1.0, n_max=3).weights
    np.testing.assert_allclose(got, [1.0, 0.5, 0.375, 0.3125], rtol=1e-15)


@pytest.mark.parametrize("rho_frac", [Fraction(11, 10), Fraction(3, 2), Fraction(19, 10)])
def test_coefficients_match_exact_series_deep(rho_frac):
    n = 200
    oracle = np.array([float(c) for c in series_oracle(rho_frac, n)])
    got = binomial_coefficients(float(rho_frac), n)
    np.testing.assert_allclose(got, oracle, rtol=1e-13)


def test_parabolic_limit_of_weights():
    w = weights_closed_form(riesz_kernel(1.0 + 1e-8), k=1.0, n_max=4).weights
    assert w[0] == pytest.approx(1.0, abs=1e-7)
    assert w[1] == pytest.approx(1e-8, rel=1e-6)


def test_step_size_scaling():
    spec = riesz_kernel(1.5)
    w1 = weights_closed_form(spec, k=1.0, n_max=16).weights
    w_half = weights_closed_form(spec, k=0.5, n_max=16).weights
    np.testing.assert_allclose(w_half, 0.5 ** (spec.rho - 1.0) * w1, rtol=1e-14)


def test_parabolic_family_rejected():
    with pytest.raises(KernelDomainError):
        weights_closed_form(parabolic_kernel(), 0.1, 4)
    with pytest.raises(KernelDomainError):
        weights_contour(parabolic_kernel(), 0.1, 4)


@pytest.mark.parametrize("rho", [1.1, 1.25, 1.5, 1.75, 1.9])
@pytest.mark.parametrize("k", [1.0, 0.1])
def test_contour_oracle_agreement_short(rho, k):
    spec = riesz_kernel(rho)
    exact = weights_closed_form(spec, k, 16)
    probe = weights_contour(spec, k, 16, radius=0.9, samples=256)
    np.testing.assert_allclose(probe.weights, exact.weights, rtol=1e-10)


def test_contour_matches_tempered():
    spec = tempered_kernel(1.4, 2.5)
    exact = weights_closed_form(spec, 0.1, 32)
    probe = weights_contour(spec, 0.1, 32, radius=0.9)
    np.testing.assert_allclose(probe.weights, exact.weights, rtol=1e-10)
    # eta = 0 tempering reduces to riesz
    w_t = weights_contour(tempered_kernel(1.4, 0.0), 0.1, 16, radius=0.9)
    w_r = weights_contour(riesz_kernel(1.4), 0.1, 16, radius=0.9)
    np.testing.assert_allclose(w_t.weights, w_r.weights, rtol=1e-12)


def test_contour_single_weight():
    spec = riesz_kernel(1.5)
    w = weights_contour(spec, 0.25, 0, radius=0.5, samples=256)
    assert w.weights[0] == pytest.approx(0.25 ** 0.5, rel=1e-10)


def test_contour_underflow_guard():
    with pytest.raises(ContourUnderflowError):
        weights_contour(riesz_kernel(1.5), 1.0, 4096, radius=0.3, samples=4 * 4097)


def test_contour_validation():
    with pytest.raises(ValueError):
        weights_contour(riesz_kernel(1.5), 1.0, 8, radius=1.5)
    with pytest.raises(ValueError):
        weights_contour(riesz_kernel(1.5), 1.0, 8, radius=0.5, samples=8)


@pytest.mark.parametrize("rho", [1.1, 1.25, 1.5, 1.75, 1.9])
def test_weights_positive_decreasing(rho):
    for spec in [riesz_kernel(rho), tempered_kernel(rho, 1.0)]:
        w = weights_closed_form(spec, 0.05, 512).weights
        assert np.all(w > 0)
        assert np.all(np.diff(w[1:]) < 0)


def test_coefficient_asymptotics():
    # c_j ~ j^(rho-2)/Gamma(rho-1): relative deviation < 2% at j = 10^4
    for rho in [1.1, 1.25, 1.5, 1.75, 1.9]:
        c = binomial_coefficients(rho, 10_000)
        j = 10_000
        limit = 1.0 / math.gamma(rho - 1.0)
        assert c[j] * j ** (2.0 - rho) == pytest.approx(limit, rel=0.02)


def test_convolve_history_basics():
    w = weights_closed_form(riesz_kernel(1.5), 0.1, 8)
    assert convolve_history(w, np.zeros(5)) == 0.0
    v = np.array([[1.0, 2.0]])
    np.testing.assert_allclose(convolve_history(w, v), w.weights[0] * v[0])
    with pytest.raises(WeightLengthError):
        convolve_history(w, np.ones(10))
    with pytest.raises(WeightLengthError):
        convolve_history(w, np.zeros(0))


def test_convolve_newest_entry_gets_omega0():
    w = weights_closed_form(riesz_kernel(1.5), 1.0, 4)
    hist = np.array([0.0, 0.0, 1.0])  # only the newest entry set
    assert convolve_history(w, hist) == pytest.approx(w.weights[0])
    hist = np.array([1.0, 0.0, 0.0])  # oldest entry weighted by omega_{n-1}
    assert convolve_history(w, hist) == pytest.approx(w.weights[2])


def test_quadrature_consistency_first_order():
    # sum_j omega_{n-j} * 1 -> int_0^t b = t^(rho-1)/Gamma(rho) at O(k);
    # the weights already carry the step-size scaling k^(rho-1)
    spec = riesz_kernel(1.5)
    T = 1.0
    errs = []
    ns = [32, 64, 128, 256, 512]
    for n in ns:
        k = T / n
        w = weights_closed_form(spec, k, n)
        approx = convolve_history(w, np.ones(n))
        exact = T ** (spec.rho - 1.0) / math.gamma(spec.rho)
        errs.append(abs(approx - exact))
    slope = np.polyfit(np.log([T / n for n in ns]), np.log(errs), 1)[0]
    assert 0.9 <= slope <= 1.1


def test_weights_are_immutable():
    w = weights_closed_form(riesz_kernel(1.5), 1.0, 4)
    with pytest.raises(ValueError):
        w.weights[0] = 2.0
