import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf, sqrt as msqrt

from finsler_iso.errors import BoundaryError, DomainError, ZeroVectorError
from finsler_iso.metric import MetricPoint, finsler_norm, phi

mp.dps = 40


def phi_mp(r, s):
    r, s = mpf(r), mpf(s)
    rad = msqrt(1 - r * r + s * s)
    return (rad + s) ** 2 / ((1 - r * r) ** 2 * rad)


def test_phi_origin_is_one():
    assert phi(0.0, 0.0) == 1.0


def test_phi_half_zero():
    assert phi(0.5, 0.0) == pytest.approx(0.75 ** -1.5, rel=1e-15)
    assert phi(0.5, 0.0) == pytest.approx(1.5396007178390020, rel=1e-15)


def test_phi_half_half_matches_high_precision_and_norm():
    ref = float(phi_mp(0.5, 0.5))
    assert phi(0.5, 0.5) == pytest.approx(ref, rel=1e-14)
    assert finsler_norm([0.5, 0.0], [1.0, 0.0]) == pytest.approx(ref, rel=1e-14)


def test_phi_errors():
    with pytest.raises(BoundaryError):
        phi(0.995, 0.0)
    with pytest.raises(DomainError):
        phi(0.3, 0.31)
    # tiny overshoot is clamped
    assert phi(0.3, 0.3 + 1e-12) == pytest.approx(phi(0.3, 0.3), rel=1e-12)


def test_norm_examples():
    assert finsler_norm([0.0, 0.0], [1.0, 0.0]) == 1.0
    assert finsler_norm([0.5, 0.0], [0.0, 1.0]) == pytest.approx(0.75 ** -1.5, rel=1e-14)
    with pytest.raises(ZeroVectorError):
        finsler_norm([0.1, 0.1], [0.0, 0.0])
    with pytest.raises(BoundaryError):
        finsler_norm([0.995, 0.0], [1.0, 0.0])


def test_norm_is_not_reversible():
    fwd = finsler_norm([0.5, 0.0], [1.0, 0.0])
    back = finsler_norm([0.5, 0.0], [-1.0, 0.0])
    assert abs(fwd - back) > 1.0


def _random_pairs(n, seed):
    g = np.random.default_rng(seed)
    rho = 0.98 * np.sqrt(g.uniform(0, 1, n))
    ang = g.uniform(0, 2 * np.pi, n)
    x = np.stack([rho * np.cos(ang), rho * np.sin(ang)], axis=1)
    y = g.normal(size=(n, 2))
    return x, y


def test_homogeneity_and_profile_consistency_vectorized():
    x, y = _random_pairs(2000, 1)
    f = finsler_norm(x, y)
    assert np.all(f > 0)
    k = np.random.default_rng(2).uniform(0.01, 100, 2000)
    np.testing.assert_allclose(finsler_norm(x, k[:, None] * y), k * f, rtol=1e-12)
    u = np.linalg.norm(y, axis=1)
    r = np.linalg.norm(x, axis=1)
    s = np.sum(x * y, axis=1) / u
    np.testing.assert_allclose(u * phi(r, s), f, rtol=1e-12)


@settings(max_examples=200, deadline=None)
@given(
    rho=st.floats(0.0, 0.98),
    ang=st.floats(0.0, 2 * np.pi),
    yang=st.floats(0.0, 2 * np.pi),
    ymag=st.floats(1e-3, 1e3),
)
def test_metric_point_invariants(rho, ang, yang, ymag):
    x = [rho * np.cos(ang), rho * np.sin(ang)]
    y = [ymag * np.cos(yang), ymag * np.sin(yang)]
    p = MetricPoint(x, y)
    assert p.r == pytest.approx(np.hypot(*x), abs=1e-15)
    assert p.u == pytest.approx(ymag, rel=1e-15)
    assert abs(p.s) <= p.r
    assert p.norm() == pytest.approx(finsler_norm(x, y), rel=1e-12)
    assert p.norm() > 0
