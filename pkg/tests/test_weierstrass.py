import numpy as np
import pytest

from finsler_iso.errors import OriginError, SeedError, ZeroVectorError
from finsler_iso.variational import lambda0
from finsler_iso.weierstrass import (
    EScanSpec,
    draw_tuples,
    e_function,
    e_function_simplified,
    negativity_scan,
)


def test_diagonal_and_ray_vanish():
    x, v = np.array([0.3, -0.2]), np.array([0.4, 1.1])
    assert abs(e_function(x, v, v, -0.5)) < 1e-12
    assert abs(e_function(x, v, 2 * v, -0.5)) < 1e-12
    assert abs(e_function_simplified(x, v, 3 * v, -0.5)) < 1e-12


def test_example_values():
    raw = e_function([0.5, 0.0], [0.0, 1.0], [0.0, -1.0], -1.0)
    red = e_function_simplified([0.5, 0.0], [0.0, 1.0], [0.0, -1.0], -1.0)
    assert raw < 0
    assert raw == pytest.approx(red, abs=1e-10)
    # q = 3/4, A = B = sqrt(q), C = -q: E = -(2 sqrt(q) + ...)/q^2 = -2 q^{-3/2}
    assert red == pytest.approx(-2 * 0.75 ** -1.5, rel=1e-14)
    assert e_function_simplified([0.0, 0.0], [1.0, 0.0], [0.0, 1.0], -1.0) == pytest.approx(-1.0, abs=1e-15)


def test_errors():
    with pytest.raises(OriginError):
        e_function([0.0, 0.0], [1.0, 0.0], [0.0, 1.0], -1.0)
    with pytest.raises(ZeroVectorError):
        e_function([0.1, 0.0], [0.0, 0.0], [0.0, 1.0], -1.0)
    with pytest.raises(ZeroVectorError):
        e_function_simplified([0.1, 0.0], [1.0, 0.0], [0.0, 0.0], -1.0)
    for bad in (EScanSpec(seed=-1), EScanSpec(seed=1.5), EScanSpec(samples=0), EScanSpec(r_hi=0.995)):
        with pytest.raises(SeedError):
            negativity_scan(bad, -0.1)


def test_near_origin_routes_to_reduced_form():
    x = np.array([[1e-6, 0.0], [0.3, 0.1]])
    v = np.array([[0.0, 1.0], [1.0, 0.0]])
    p = np.array([[1.0, 1.0], [0.0, 1.0]])
    np.testing.assert_allclose(e_function(x, v, p, -0.2), e_function_simplified(x, v, p, -0.2), atol=1e-12)


def test_raw_vs_reduced_on_random_tuples():
    x, v, p = draw_tuples(EScanSpec(samples=1000, seed=5))
    lam = lambda0(0.5)
    assert np.max(np.abs(e_function(x, v, p, lam) - e_function_simplified(x, v, p, lam))) < 1e-10


def test_scan_negative_multiplier_has_no_violations():
    rep = negativity_scan(EScanSpec(samples=100_000, seed=0), lambda0(0.5))
    assert rep.violations == 0
    assert rep.worst_value < 0
    doc = rep.to_dict()
    assert set(doc) == {"samples", "violations", "worst_value", "worst_sample"}
    assert set(doc["worst_sample"]) == {"x", "v", "p"}


def test_scan_positive_multiplier_finds_violations():
    rep = negativity_scan(EScanSpec(samples=2000, seed=1), 0.1)
    assert rep.violations > 0 and rep.worst_value > 0


def test_proportional_directions():
    rep = negativity_scan(EScanSpec(samples=5000, seed=2), lambda0(0.5), proportional=True)
    assert rep.worst_value < 1e-10


def test_scan_is_reproducible():
    a = negativity_scan(EScanSpec(samples=3000, seed=9), -0.05).to_dict()
    b = negativity_scan(EScanSpec(samples=3000, seed=9), -0.05).to_dict()
    assert a == b


def test_positive_scaling_preserves_sign():
    x, v, p = draw_tuples(EScanSpec(samples=500, seed=3))
    e1 = e_function_simplified(x, v, p, -0.3)
    e2 = e_function_simplified(x, v, 7.5 * p, -0.3)
    np.testing.assert_allclose(e2, 7.5 * e1, rtol=1e-9, atol=1e-12)
