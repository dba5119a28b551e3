"""The constrained functional J = A + lambda L and its first- and second-order data.

Cartesian integrands (x a point, v a velocity):

    f(x, v) = (1/3) ln(3|x|^2 + 2) / |x|^2 * (x1 v2 - x2 v1)      (area)
    g(x, v) = length_integrand(x, v)                             (length)
    h = f + lambda g

For polar curves r(t)(cos t, sin t) these reduce to f = (1/3) ln(3r^2 + 2) and
g = (r^2(1-r^2) + (1+r^2) rdot^2) / ((1-r^2)^2 D), D = sqrt(r^2(1-r^2) + rdot^2).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .curves import Curve, evaluate, sample
from .errors import BoundaryError, DegenerateSpeedError, DomainError, OriginError
from .measures import bh_density_closed, length_integrand
from .metric import EPS_BOUNDARY, check_radius
from .quadrature import DEFAULT_SPEC, QuadratureSpec

SPEED_TOL = 1e-14


# ---------------------------------------------------------------------------
# Cartesian integrands and their analytic first derivatives


def _split(x, v):
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    return x[..., 0], x[..., 1], v[..., 0], v[..., 1]


def _area_coefficient(w):
    """psi(w) = ln(3w + 2) / (3w) and its derivative in w."""
    lg = np.log(3.0 * w + 2.0)
    psi = lg / (3.0 * w)
    dpsi = (3.0 / (3.0 * w + 2.0) - lg / w) / (3.0 * w)
    return psi, dpsi


def area_integrand_f(x, v):
    x1, x2, v1, v2 = _split(x, v)
    w = x1 * x1 + x2 * x2
    if np.any(w == 0.0):
        raise OriginError("area integrand is singular at the origin")
    psi, _ = _area_coefficient(w)
    out = psi * (x1 * v2 - x2 * v1)
    return float(out) if np.ndim(out) == 0 else out


def area_integrand_grad(x, v):
    """(df/dx, df/dv), each with trailing dimension 2."""
    x1, x2, v1, v2 = _split(x, v)
    w = x1 * x1 + x2 * x2
    if np.any(w == 0.0):
        raise OriginError("area integrand is singular at the origin")
    psi, dpsi = _area_coefficient(w)
    cross = x1 * v2 - x2 * v1
    fx = np.stack([2.0 * x1 * dpsi * cross + psi * v2, 2.0 * x2 * dpsi * cross - psi * v1], axis=-1)
    fv = np.stack([-psi * x2, psi * x1], axis=-1)
    return fx, fv


def length_integrand_grad(x, v):
    """(dg/dx, dg/dv) of the symmetrized length integrand.

    Uses g = A / q^2 + m^2 / (q^2 A) with q = 1 - |x|^2, m = <x, v>,
    A = sqrt(q |v|^2 + m^2).
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    q = (1.0 - np.sum(x * x, axis=-1))[..., None]
    vv = np.sum(v * v, axis=-1)[..., None]
    m = np.sum(x * v, axis=-1)[..., None]
    A = np.sqrt(q * vv + m * m)
    A_x = (-x * vv + m * v) / A
    A_v = (q * v + m * x) / A
    q2 = q * q
    gx = A_x / q2 + 4.0 * A * x / (q2 * q)
    gx += 2.0 * m * v / (q2 * A) + 4.0 * m * m * x / (q2 * q * A) - m * m * A_x / (q2 * A * A)
    gv = A_v / q2 + 2.0 * m * x / (q2 * A) - m * m * A_v / (q2 * A * A)
    return gx, gv


def lagrangian_h(x, v, lam: float):
    return area_integrand_f(x, v) + lam * length_integrand(x, v)


def lagrangian_h_grad(x, v, lam: float):
    fx, fv = area_integrand_grad(x, v)
    gx, gv = length_integrand_grad(x, v)
    return fx + lam * gx, fv + lam * gv


def _richardson_dt(fun, t, h):
    """d/dt fun(t), central differences at h and h/2 combined to O(h^4)."""
    d1 = (fun(t + h) - fun(t - h)) / (2.0 * h)
    d2 = (fun(t + 0.5 * h) - fun(t - 0.5 * h)) / h
    return (4.0 * d2 - d1) / 3.0


def cartesian_el_operator(curve: Curve, t, grad, step: float | None = None):
    """grad_x(c, c') - d/dt grad_v(c, c') along `curve` at parameters `t`.

    `grad(x, v)` returns the pair of partial gradients of a Lagrangian. The
    time derivative is taken by Richardson-extrapolated central differences
    with step eps^(1/3) times the period scale.
    """
    t = np.asarray(t, dtype=float)
    if step is None:
        step = np.finfo(float).eps ** (1.0 / 3.0) * 2.0 * np.pi
    gx, _ = grad(evaluate(curve, t, 0), evaluate(curve, t, 1))

    def gv(tt):
        return grad(evaluate(curve, tt, 0), evaluate(curve, tt, 1))[1]

    return gx - _richardson_dt(gv, t, step)


def cartesian_el_residual(curve: Curve, lam: float, t):
    """Euler-Lagrange residuals (both components) of h = f + lam g along `curve`."""
    return cartesian_el_operator(curve, t, lambda x, v: lagrangian_h_grad(x, v, lam))


# ---------------------------------------------------------------------------
# Polar form


def _polar_check(r, rd, eps_boundary):
    r = np.asarray(r, dtype=float)
    rd = np.asarray(rd, dtype=float)
    if np.any(r <= 0):
        raise DomainError("polar radius must be positive")
    check_radius(r, eps_boundary)
    d2 = r * r * (1.0 - r * r) + rd * rd
    if np.any(d2 <= SPEED_TOL):
        raise DegenerateSpeedError("r^2 (1 - r^2) + rdot^2 vanishes")
    return r, rd, d2


def _scalar(out):
    return float(out) if np.ndim(out) == 0 else out


def polar_length_integrand(r, rdot, eps_boundary: float = EPS_BOUNDARY):
    r, rd, d2 = _polar_check(r, rdot, eps_boundary)
    q = 1.0 - r * r
    return _scalar((r * r * q + (1.0 + r * r) * rd * rd) / (q * q * np.sqrt(d2)))


def lagrangian_h_polar(r, rdot, lam: float, eps_boundary: float = EPS_BOUNDARY):
    r, rd, _ = _polar_check(r, rdot, eps_boundary)
    return _scalar(np.log(3.0 * r * r + 2.0) / 3.0 + lam * polar_length_integrand(r, rd, eps_boundary))


def _momentum(r, rd, lam):
    """dh/d(rdot) = lam rdot N / ((1-r^2)^2 D^3) and its partials in r and rdot."""
    q = 1.0 - r * r
    D = np.sqrt(r * r * q + rd * rd)
    N = r**2 + r**4 - 2.0 * r**6 + (1.0 + r * r) * rd * rd
    M = q * q
    N_r = 2.0 * r + 4.0 * r**3 - 12.0 * r**5 + 2.0 * r * rd * rd
    N_rd = 2.0 * (1.0 + r * r) * rd
    M_r = -4.0 * r * q
    D_r = r * (1.0 - 2.0 * r * r) / D
    D_rd = rd / D
    D3 = D**3
    p = lam * rd * N / (M * D3)
    p_r = lam * rd * (N_r / (M * D3) - N * M_r / (M * M * D3) - 3.0 * N * D_r / (M * D3 * D))
    p_rd = lam * (N / (M * D3) + rd * N_rd / (M * D3) - 3.0 * rd * N * D_rd / (M * D3 * D))
    return p, p_r, p_rd


def el_residual_pointwise(r, rdot, rddot, lam: float, eps_boundary: float = EPS_BOUNDARY):
    """Left side of the polar Euler-Lagrange equation dh/dr - d/dt dh/d(rdot).

    The total derivative is expanded by the chain rule through r, rdot and
    rddot, so the residual is affine in both lam and rddot.
    """
    r, rd, d2 = _polar_check(r, rdot, eps_boundary)
    rdd = np.asarray(rddot, dtype=float)
    q = 1.0 - r * r
    D = np.sqrt(d2)
    G = r * r * q + (1.0 + r * r) * rd * rd
    dq = 2.0 * r * q - 2.0 * r**3
    h_r = (
        2.0 * r / (3.0 * r * r + 2.0)
        + lam * (dq + 2.0 * r * rd * rd) / (q * q * D)
        + 4.0 * lam * G * r / (q**3 * D)
        - 0.5 * lam * G * dq / (q * q * D**3)
    )
    _, p_r, p_rd = _momentum(r, rd, lam)
    return _scalar(h_r - (p_r * rd + p_rd * rdd))


@dataclass(frozen=True)
class ResidualProfile:
    t: np.ndarray
    values: np.ndarray

    @property
    def max(self) -> float:
        return float(np.max(np.abs(self.values)))


def el_residual_polar(curve: Curve, lam: float, spec: QuadratureSpec = DEFAULT_SPEC) -> ResidualProfile:
    if not curve.is_polar:
        raise DomainError("polar Euler-Lagrange residual needs a polar curve")
    s = sample(curve, spec.n_periodic)
    vals = el_residual_pointwise(s.r, s.rdot, s.rddot, lam, curve.eps_boundary)
    return ResidualProfile(s.t, np.asarray(vals))


def first_integral(r, rdot, lam: float, eps_boundary: float = EPS_BOUNDARY):
    """C1 = rdot dh/d(rdot) - h, constant along solutions of the polar equation."""
    r, rd, _ = _polar_check(r, rdot, eps_boundary)
    p, _, _ = _momentum(r, rd, lam)
    return _scalar(p * rd - lagrangian_h_polar(r, rd, lam, eps_boundary))


def integrate_el(r0: float, rdot0: float, lam: float, t_end: float = 2.0 * math.pi,
                 rtol: float = 1e-13, atol: float = 1e-14, n_out: int = 513,
                 r_min: float = 1e-3, rdot_max: float = 10.0,
                 eps_boundary: float = EPS_BOUNDARY, strict: bool = True):
    """Numerically integrate the polar Euler-Lagrange equation with DOP853.

    rddot is recovered from the residual's affine dependence on it. Returns the
    scipy solution evaluated on `n_out` equispaced times in [0, t_end].
    Trajectories reaching r = 1 - eps_boundary raise BoundaryError; those
    falling to ``r_min`` (where the equation is singular) or blowing up past
    |rdot| = ``rdot_max`` raise DomainError. With ``strict=False`` the
    solution is instead returned truncated at the first such event.
    """

    def rhs(_t, y):
        r, rd = y
        try:
            r0_ = el_residual_pointwise(r, rd, 0.0, lam, eps_boundary)
            r1_ = el_residual_pointwise(r, rd, 1.0, lam, eps_boundary)
        except (BoundaryError, DomainError):
            # trial stage outside the domain: NaN makes the stepper reject and shrink
            return [math.nan, math.nan]
        return [rd, -r0_ / (r1_ - r0_)]

    def outer(_t, y):
        return (1.0 - eps_boundary) * (1.0 - 1e-9) - y[0]

    def inner(_t, y):
        return y[0] - r_min

    def speed(_t, y):
        return rdot_max - abs(y[1])

    outer.terminal = inner.terminal = speed.terminal = True
    t_eval = np.linspace(0.0, t_end, n_out)
    sol = solve_ivp(rhs, (0.0, t_end), [r0, rdot0], method="DOP853",
                    rtol=rtol, atol=atol, t_eval=t_eval, events=(outer, inner, speed))
    if not sol.success:
        raise DomainError(f"ODE integration failed: {sol.message}")
    if not strict:
        return sol
    if sol.t_events[0].size:
        raise BoundaryError(f"solution reaches the boundary band at t = {sol.t_events[0][0]}")
    if sol.t_events[1].size:
        raise DomainError(f"solution collapses towards the origin at t = {sol.t_events[1][0]}")
    if sol.t_events[2].size:
        raise DomainError(f"solution speed blows up at t = {sol.t_events[2][0]}")
    return sol


# ---------------------------------------------------------------------------
# Circles centred at the origin


def _circle_radius(a, eps_boundary=EPS_BOUNDARY):
    a = np.asarray(a, dtype=float)
    if np.any(a <= 0) or np.any(a >= 1.0 - eps_boundary):
        raise BoundaryError(f"circle radius must lie in (0, 1 - eps_boundary)")
    return a


def lambda0(a, eps_boundary: float = 0.0):
    """Multiplier making circle(a) extremal: -2 a (1-a^2)^(5/2) / (6a^4 + 7a^2 + 2)."""
    a = np.asarray(a, dtype=float)
    if np.any(a <= 0) or np.any(a >= 1.0 - eps_boundary):
        raise BoundaryError("lambda0 is defined for 0 < a < 1")
    return _scalar(-2.0 * a * (1.0 - a * a) ** 2.5 / (6.0 * a**4 + 7.0 * a * a + 2.0))


def normality_constant(a):
    a = np.asarray(a, dtype=float)
    return _scalar((1.0 + 2.0 * a * a) / (1.0 - a * a) ** 2.5)


def normality(a: float, t, eps_boundary: float = EPS_BOUNDARY):
    """(P1, P2) = C(a) (cos t, sin t), the Euler-Lagrange operator of g along circle(a)."""
    _circle_radius(a, eps_boundary)
    c = normality_constant(a)
    t = np.asarray(t, dtype=float)
    return np.stack([c * np.cos(t), c * np.sin(t)], axis=-1)


def normality_fd(curve: Curve, t):
    """g_x - d/dt g_v along an arbitrary curve, with the finite-difference time derivative."""
    return cartesian_el_operator(curve, t, length_integrand_grad)


def second_variation_coefficient(a, lam: float | None = None):
    a = np.asarray(a, dtype=float)
    lam = lambda0(a) if lam is None else lam
    return _scalar(lam * (2.0 * a * a + 1.0) / (a * (1.0 - a * a) ** 2.5))


def second_variation_form(a: float, t, y, lam: float | None = None,
                          eps_boundary: float = EPS_BOUNDARY):
    """sum_ij h_{v_i v_j} y_i y_j along circle(a) at parameter t (lam defaults to lambda0)."""
    _circle_radius(a, eps_boundary)
    y = np.asarray(y, dtype=float)
    t = np.asarray(t, dtype=float)
    radial = np.cos(t) * y[..., 0] + np.sin(t) * y[..., 1]
    return _scalar(second_variation_coefficient(a, lam) * radial * radial)


def multiplier_identity(a):
    """lambda0(a) (2a^2+1) / (a (1-a^2)^(5/2)) + sigma(a); identically zero."""
    return _scalar(second_variation_coefficient(a) + bh_density_closed(a))


def lambda_root(a: float, spec: QuadratureSpec = DEFAULT_SPEC, node: int = 0) -> float:
    """Multiplier that zeroes the polar residual of circle(a), found by Brent's method."""
    from .curves import circle

    c = circle(a)
    lo, hi = -10.0, 10.0
    return brentq(lambda lam: el_residual_polar(c, lam, spec).values[node], lo, hi,
                  xtol=1e-15, rtol=4 * np.finfo(float).eps)


# ---------------------------------------------------------------------------


@dataclass
class VariationalReport:
    """Sufficiency checks for a candidate maximizer.

    The problem maximizes A at fixed L, so the sign conventions are those of a
    maximum: Weierstrass values must be negative and the v-Hessian form
    negative (second_variation_sign == -1).
    """

    el_residual_max: float
    first_integral_drift: float
    lambda_used: float
    normality_min: float
    weierstrass_worst: float
    conjugate_free: bool
    second_variation_sign: int

    EL_TOL = 1e-9
    DRIFT_TOL = 1e-7

    def failures(self) -> list:
        out = []
        if not self.el_residual_max < self.EL_TOL:
            out.append("extremality")
        if not self.first_integral_drift < self.DRIFT_TOL:
            out.append("first_integral")
        if not self.normality_min > 0.0:
            out.append("normality")
        if not self.weierstrass_worst < 0.0:
            out.append("weierstrass")
        if not self.conjugate_free:
            out.append("conjugate_points")
        if self.second_variation_sign != -1:
            out.append("second_variation")
        return out

    @property
    def passed(self) -> bool:
        return not self.failures()

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        from .serialize import dumps

        return dumps(self.to_dict())
