import json

import numpy as np
import pytest
from scipy.integrate import quad

from finsler_iso.curves import circle, make_polar_curve
from finsler_iso.errors import DomainError, InfeasibleError
from finsler_iso.measures import area_double_integral, curve_length
from finsler_iso.optimizer import (
    OptimProblem,
    PolarFunctionals,
    circle_area,
    circle_length,
    circle_radius_for_length,
    constrained_ascent,
    fitted_multiplier,
    local_max_test,
    multistart,
    project_to_length,
    quadratic_decay,
)
from finsler_iso.serialize import dumps
from finsler_iso.variational import lambda0


def _rotate(z, c, modes):
    # r(theta + c): (alpha_k, beta_k) rotate by angle k c
    k = np.arange(1, modes + 1)
    al, be = z[1 : modes + 1], z[modes + 1 :]
    out = z.copy()
    out[1 : modes + 1] = al * np.cos(k * c) + be * np.sin(k * c)
    out[modes + 1 :] = be * np.cos(k * c) - al * np.sin(k * c)
    return out


def test_functionals_match_measures():
    curve = make_polar_curve(0.4, [0.03, -0.01, 0.0, 0.02, 0.01, -0.005])
    fun = PolarFunctionals(3, 1024)
    area, length = fun.evaluate(curve.coefficients())
    assert area == pytest.approx(area_double_integral(curve), rel=1e-12)
    assert length == pytest.approx(curve_length(curve), rel=1e-12)


def test_functionals_euclidean_against_quad():
    curve = make_polar_curve(0.4, [0.03, 0.02])
    r = lambda t: 0.4 + 0.03 * np.cos(t) + 0.02 * np.sin(t)
    rd = lambda t: -0.03 * np.sin(t) + 0.02 * np.cos(t)
    fun = PolarFunctionals(1, 1024, euclidean=True)
    area, length = fun.evaluate(curve.coefficients())
    assert area == pytest.approx(quad(lambda t: 0.5 * r(t) ** 2, 0, 2 * np.pi)[0], rel=1e-12)
    assert length == pytest.approx(quad(lambda t: np.hypot(r(t), rd(t)), 0, 2 * np.pi)[0], rel=1e-12)


def test_gradients_against_complex_step():
    fun = PolarFunctionals(4, 1024)
    z = np.array([0.45, 0.01, -0.02, 0.005, 0.0, 0.01, 0.0, -0.01, 0.002])
    ga, gl = fun.gradients(z)
    h = 1e-30
    for i in range(z.size):
        zc = z.astype(complex)
        zc[i] += 1j * h
        r, rd = zc @ fun.basis, zc @ fun.dbasis
        r2 = r * r
        q = 1 - r2
        scale = 2 * np.pi / fun.n
        a = np.sum(np.log(1 + 1.5 * r2)) * scale / 3
        l = np.sum((r2 * q + (1 + r2) * rd * rd) / (q * q * np.sqrt(r2 * q + rd * rd))) * scale
        assert ga[i] == pytest.approx(a.imag / h, abs=1e-8)
        assert gl[i] == pytest.approx(l.imag / h, abs=1e-8)


def test_circle_formulas():
    assert circle_length(0.5) == pytest.approx(4.836798304624581, rel=1e-14)
    assert circle_area(0.5) == pytest.approx(0.66696793479349845, rel=1e-14)
    a = np.linspace(0.01, 0.98, 100)
    assert np.all(np.diff(circle_length(a)) > 0)
    for x in (0.05, 0.5, 0.9):
        assert circle_radius_for_length(circle_length(x)) == pytest.approx(x, abs=1e-13)
    with pytest.raises(InfeasibleError):
        circle_radius_for_length(1e6)


def test_project_to_length():
    L = circle_length(0.5)
    same = project_to_length(circle(0.5), L)
    assert same.coefficients()[0] == pytest.approx(0.5, abs=1e-12)
    grown = project_to_length(circle(0.3), L)
    assert grown.coefficients()[0] == pytest.approx(0.5, abs=1e-10)
    bumped = project_to_length(make_polar_curve(0.5, [0.0, 0.01, 0.0, 0.0]), L)
    assert curve_length(bumped) == pytest.approx(L, rel=1e-10)
    assert bumped.coefficients()[0] < 0.5
    with pytest.raises(InfeasibleError):
        project_to_length(circle(0.5), 1e6)


def test_ascent_from_circle_is_stationary():
    a = 0.5
    res = constrained_ascent(OptimProblem(circle_length(a), modes=4), circle(a))
    assert res.converged and res.iterations == 1
    assert res.multiplier == pytest.approx(lambda0(a), abs=1e-3)
    assert res.area == pytest.approx(circle_area(a), rel=1e-12)


@pytest.mark.parametrize("a", [0.2, 0.7])
def test_multiplier_recovery(a):
    fun = PolarFunctionals(2, 1024)
    z = np.array([a, 0, 0, 0, 0], dtype=float)
    ga, gl = fun.gradients(z)
    assert fitted_multiplier(ga, gl) == pytest.approx(lambda0(a), rel=1e-8)


def test_ascent_from_perturbation_returns_to_circle():
    a = 0.5
    init = make_polar_curve(a, [0.01, -0.008, 0.005, 0.0, 0.0, 0.004, 0.007, -0.006, 0.0, 0.003, 0.0, 0.0, 0.0, 0.002, 0.0, 0.0])
    res = constrained_ascent(OptimProblem(circle_length(a), modes=8), init)
    assert res.converged
    assert np.max(np.abs(res.amplitudes)) < 1e-4
    assert res.area == pytest.approx(circle_area(circle_radius_for_length(res.length)), abs=1e-8)
    areas = [h[0] for h in res.history]
    assert all(b >= a_ - 1e-14 for a_, b in zip(areas, areas[1:]))
    payload = json.loads(dumps(res.to_dict()))
    assert len(payload["history"]) == res.iterations
    assert set(payload["history"][0]) == {"area", "length", "grad_norm"}


def test_euclidean_mode_recovers_classical_inequality():
    rep = multistart(0.5, 2, modes=4, euclidean=True)
    for r in rep.results:
        assert r.converged
        assert r.length**2 == pytest.approx(4 * np.pi * r.area, rel=1e-5)


def test_multistart_has_no_counterexample():
    rep = multistart(0.5, 3, modes=6)
    assert all(r.converged for r in rep.results)
    assert rep.best_excess < 1e-8 and not rep.counterexample()
    assert "polar-Fourier" in rep.search_class
    with pytest.raises(DomainError):
        multistart(0.5, 0)


def test_local_max_negative_excess():
    rep = local_max_test(0.5, 60, 0.01, seed=3)
    assert rep.all_negative and rep.decay_constant > 0
    zero = local_max_test(0.5, 5, 0.0, seed=3)
    assert np.all(np.abs(zero.excess) < 1e-15)
    assert [row["trial"] for row in rep.rows()[:3]] == [0, 1, 2]


def test_local_max_is_deterministic():
    a = local_max_test(0.4, 10, 0.01, seed=7).excess
    b = local_max_test(0.4, 10, 0.01, seed=7).excess
    assert np.array_equal(a, b)


def test_rotation_leaves_excess_unchanged():
    modes = 3
    fun = PolarFunctionals(modes, 1024)
    z = np.array([0.5, 0.01, -0.004, 0.002, 0.003, 0.006, -0.001])
    for fn in (fun.area, fun.length):
        assert fn(_rotate(z, 0.7, modes)) == pytest.approx(fn(z), rel=1e-13)


def test_quadratic_decay():
    direction = np.zeros(8)
    direction[1], direction[5] = 1.0, 0.5
    ex = quadratic_decay(0.5, direction)
    assert np.all(ex < 0)
    ratios = ex[:-1] / ex[1:]
    assert np.all(np.abs(ratios - 4.0) < 0.8)


def test_problem_validation():
    with pytest.raises(DomainError):
        OptimProblem(-1.0)
    with pytest.raises(DomainError):
        OptimProblem(1.0, modes=0)
    with pytest.raises(DomainError):
        OptimProblem(1.0, preconditioner="newton")
    with pytest.raises(DomainError):
        constrained_ascent(OptimProblem(circle_length(0.5), modes=1), make_polar_curve(0.5, [0, 0.01, 0, 0]))
    assert OptimProblem(1.0, preconditioner="none").max_step == 1e-2
