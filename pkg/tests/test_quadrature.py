import math

import numpy as np
import pytest
from scipy.integrate import quad

from finsler_iso.errors import DomainError, MaxDepthError, NonFiniteIntegrandError
from finsler_iso.quadrature import (
    GAUSS_WEIGHTS,
    KRONROD_NODES,
    KRONROD_WEIGHTS,
    QuadratureSpec,
    integrate_adaptive,
    integrate_periodic,
    trapezoid_periodic,
)


def test_gauss_kronrod_tables():
    xg, wg = np.polynomial.legendre.leggauss(7)
    np.testing.assert_allclose(KRONROD_NODES[1::2], xg, atol=1e-15)
    np.testing.assert_allclose(GAUSS_WEIGHTS[1::2], wg, atol=1e-15)
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    # Kronrod rule is exact for degree 22 polynomials
    for k in range(0, 23, 2):
        assert KRONROD_WEIGHTS @ KRONROD_NODES ** k == pytest.approx(2.0 / (k + 1), abs=1e-14)


def test_periodic_examples():
    assert integrate_periodic(lambda t: np.cos(t) ** 2) == pytest.approx(math.pi, abs=1e-14)
    assert integrate_periodic(lambda t: np.ones_like(t)) == pytest.approx(2 * math.pi, abs=1e-14)
    ref, _ = quad(lambda t: math.exp(math.sin(t)), 0, 2 * math.pi, epsabs=1e-14)
    assert integrate_periodic(lambda t: np.exp(np.sin(t))) == pytest.approx(ref, abs=1e-13)
    assert ref == pytest.approx(7.954926521012845, abs=1e-12)


def test_adaptive_examples():
    assert integrate_adaptive(np.sin, 0, math.pi) == pytest.approx(2.0, abs=1e-12)
    assert integrate_adaptive(lambda t: t * t, 0, 1) == pytest.approx(1 / 3, abs=1e-14)
    val = integrate_adaptive(lambda t: 1 / (2 + np.cos(t)), 0, math.pi)
    assert val == pytest.approx(math.pi / math.sqrt(3), abs=1e-11)


def test_adaptive_against_scipy_on_peaked_integrand():
    f = lambda t: 1.0 / (1e-4 + (t - 0.3) ** 2)
    ref, _ = quad(f, 0, 1, points=[0.3], epsabs=1e-12, limit=200)
    assert integrate_adaptive(f, 0, 1) == pytest.approx(ref, abs=1e-8)


def test_errors():
    with pytest.raises(NonFiniteIntegrandError), np.errstate(divide="ignore"):
        integrate_periodic(lambda t: 1 / np.sin(t))
    with pytest.raises(NonFiniteIntegrandError):
        trapezoid_periodic([1.0, np.nan])
    with pytest.raises(MaxDepthError):
        integrate_adaptive(lambda t: np.sign(t - 1 / math.pi), 0, 1, QuadratureSpec(tol=1e-15, max_depth=5))
    with pytest.raises(DomainError):
        QuadratureSpec(n_periodic=32)
    with pytest.raises(DomainError):
        QuadratureSpec(tol=0)


def test_summation_is_deterministic():
    v = np.random.default_rng(0).normal(size=4096)
    assert trapezoid_periodic(v) == trapezoid_periodic(v.copy())
