"""Jacobi equation along origin-centred circles and the conjugate-point test.

Along circle(a) with multiplier lambda0(a) the constrained Jacobi equation is

    w'' + kappa(a) w + mu K(a) = 0,      int U w dt = 0,

kappa(a) = (12a^6 + 46a^4 + 19a^2 - 2) / ((3a^2+2)(2a^2+1)(a^2-1)),
K(a) = a (2a^2+1)(3a^2+2) / (2 (1-a^2)^(5/2)) and U = (2a^2+1) / (a (1-a^2)^(5/2)).
The sign of kappa splits radii into an oscillatory regime (kappa > 0,
a < a0), a critical radius a0 and a hyperbolic regime (kappa < 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import BoundaryError
from .metric import EPS_BOUNDARY
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate_adaptive

CRITICAL_TOL = 1e-10
TWO_PI = 2.0 * math.pi


def kappa_numerator(a):
    u = np.asarray(a, dtype=float) ** 2
    return 12.0 * u**3 + 46.0 * u**2 + 19.0 * u - 2.0


def _check(a, eps_boundary=EPS_BOUNDARY):
    if not 0.0 < a < 1.0 - eps_boundary:
        raise BoundaryError(f"circle radius {a} outside (0, 1 - eps_boundary)")


def jacobi_coefficient(a: float, eps_boundary: float = EPS_BOUNDARY) -> float:
    _check(a, eps_boundary)
    u = a * a
    return float(kappa_numerator(a) / ((3.0 * u + 2.0) * (2.0 * u + 1.0) * (u - 1.0)))


def forcing_coefficient(a: float) -> float:
    """K(a), the coefficient of mu in the Jacobi equation."""
    u = a * a
    return a * (2.0 * u + 1.0) * (3.0 * u + 2.0) / (2.0 * (1.0 - u) ** 2.5)


def constraint_density(a: float) -> float:
    """U(a) = (2a^2 + 1) / (a (1-a^2)^2 sqrt(1-a^2))."""
    u = a * a
    return (2.0 * u + 1.0) / (a * (1.0 - u) ** 2 * math.sqrt(1.0 - u))


@lru_cache(maxsize=1)
def critical_radius() -> float:
    """Root a0 in (0, 1) of 12a^6 + 46a^4 + 19a^2 - 2, solved in u = a^2.

    Bisection on [0.08, 0.09] down to |f| < 1e-14 (or a collapsed bracket),
    then one Newton polish.
    """
    def p(u):
        return ((12.0 * u + 46.0) * u + 19.0) * u - 2.0

    lo, hi = 0.08, 0.09
    assert p(lo) < 0 < p(hi)
    while True:
        mid = 0.5 * (lo + hi)
        val = p(mid)
        if abs(val) < 1e-14 or mid in (lo, hi):
            break
        if val < 0:
            lo = mid
        else:
            hi = mid
    u = mid - p(mid) / ((36.0 * mid + 92.0) * mid + 19.0)
    return math.sqrt(u)


def regime(a: float) -> str:
    a0 = critical_radius()
    if abs(a - a0) < CRITICAL_TOL:
        return "critical"
    # kappa > 0 exactly when the numerator is negative (the denominator is negative on (0, 1))
    return "oscillatory" if kappa_numerator(a) < 0 else "hyperbolic"


@dataclass(frozen=True)
class JacobiBasis:
    """Solution basis w = c1 theta1 + c2 theta2 + mu theta3 of the Jacobi equation.

    ``rate`` is b1 (oscillatory), b2 (hyperbolic) or 0 (critical);
    ``particular`` is b3 (the constant theta3) or b4 (the t^2 coefficient at a0).
    """

    a: float
    kappa: float
    regime: str
    rate: float
    particular: float
    U: float
    K: float

    def theta(self, t, deriv: int = 0) -> np.ndarray:
        """Stacked (theta1, theta2, theta3) or their derivatives, shape (3, ...)."""
        t = np.asarray(t, dtype=float)
        b = self.rate
        one = np.ones_like(t)
        zero = np.zeros_like(t)
        if self.regime == "critical":
            table = {
                0: (t, one, self.particular * t * t),
                1: (one, zero, 2.0 * self.particular * t),
                2: (zero, zero, 2.0 * self.particular * one),
            }
            return np.stack(table[deriv])
        if self.regime == "oscillatory":
            s, c = np.sin(b * t), np.cos(b * t)
            table = {0: (s, c), 1: (b * c, -b * s), 2: (-b * b * s, -b * b * c)}
        else:
            s, c = np.sinh(b * t), np.cosh(b * t)
            table = {0: (s, c), 1: (b * c, b * s), 2: (b * b * s, b * b * c)}
        third = self.particular * one if deriv == 0 else zero
        return np.stack(table[deriv] + (third,))

    @property
    def theta1(self) -> Callable:
        return lambda t: self.theta(t)[0]

    @property
    def theta2(self) -> Callable:
        return lambda t: self.theta(t)[1]

    @property
    def theta3(self) -> Callable:
        return lambda t: self.theta(t)[2]

    def residual(self, c1: float, c2: float, mu: float, t) -> np.ndarray:
        """w'' + kappa w + mu K for w = c1 theta1 + c2 theta2 + mu theta3."""
        coef = np.array([c1, c2, mu])
        w = np.tensordot(coef, self.theta(t, 0), axes=1)
        wdd = np.tensordot(coef, self.theta(t, 2), axes=1)
        return wdd + self.kappa * w + mu * self.K


def jacobi_basis(a: float, eps_boundary: float = EPS_BOUNDARY) -> JacobiBasis:
    kappa = jacobi_coefficient(a, eps_boundary)
    reg = regime(a)
    u = a * a
    U = constraint_density(a)
    K = forcing_coefficient(a)
    if reg == "critical":
        b4 = -a * (2.0 * u + 1.0) * (3.0 * u + 2.0) / (4.0 * (1.0 - u) ** 2 * math.sqrt(1.0 - u))
        return JacobiBasis(a, 0.0, reg, 0.0, b4, U, K)
    b = math.sqrt(abs(kappa))
    b3 = a * (2.0 * u + 1.0) ** 2 * (3.0 * u + 2.0) ** 2 / (
        2.0 * (1.0 - u) * math.sqrt(1.0 - u) * float(kappa_numerator(a))
    )
    return JacobiBasis(a, kappa, reg, b, b3, U, K)


def _stable_hyperbolic_determinant(basis: JacobiBasis, t0: float, t1: float, spec: QuadratureSpec) -> float:
    """Hyperbolic D evaluated in the bounded basis e^{b(t-t1)}, e^{-b(t-t0)}.

    With sinh = (E+ - E-)/2 and cosh = (E+ + E-)/2 the determinant in the
    (sinh, cosh) basis is det[E+, E-, theta3] / 2, and E+ = e^{b t1} e^{b(t-t1)},
    E- = e^{-b t0} e^{-b(t-t0)}. Both rescaled exponentials stay in (0, 1],
    so the 3x3 determinant has no cancellation; the factor
    e^{b(t1 - t0)} / 2 is applied afterwards.
    """
    b = basis.rate

    def cols(t):
        t = np.asarray(t, dtype=float)
        return np.stack([np.exp(b * (t - t1)), np.exp(-b * (t - t0)), basis.particular * np.ones_like(t)])

    rows = np.empty((3, 3))
    rows[0] = cols(t0)
    rows[1] = cols(t1)
    for i in range(3):
        rows[2, i] = basis.U * integrate_adaptive(lambda t, i=i: cols(t)[i], t0, t1, spec)
    return float(np.linalg.det(rows)) * 0.5 * math.exp(b * (t1 - t0))


def conjugate_determinant(a: float, t0: float, t1: float, spec: QuadratureSpec = DEFAULT_SPEC,
                          normalized: bool = False, basis: Optional[JacobiBasis] = None,
                          stable: bool = True) -> float:
    """D(t0, t1) = det[theta(t0); theta(t1); int_t0^t1 U theta dt], integrals by quadrature.

    With ``normalized=True`` theta1 is rescaled to theta1 / rate (unit slope
    at 0), which makes D continuous through the critical radius. In the
    hyperbolic regime ``stable=True`` evaluates the same determinant through
    a bounded exponential basis; the direct (sinh, cosh) form loses all
    digits once b (t1 - t0) exceeds about 20.
    """
    basis = basis or jacobi_basis(a)
    if stable and basis.regime == "hyperbolic":
        d = _stable_hyperbolic_determinant(basis, t0, t1, spec)
    else:
        rows = np.empty((3, 3))
        rows[0] = basis.theta(t0)
        rows[1] = basis.theta(t1)
        for i in range(3):
            rows[2, i] = basis.U * integrate_adaptive(lambda t, i=i: basis.theta(t)[i], t0, t1, spec)
        d = float(np.linalg.det(rows))
    if normalized and basis.regime != "critical":
        d /= basis.rate
    return d


def conjugate_determinant_closed(a: float, t0: float, t1: float, reading: str = "derived",
                                 basis: Optional[JacobiBasis] = None) -> float:
    """Closed-form D(t0, t1) per regime.

    ``reading="derived"`` is the expansion of the determinant: cosh in the
    hyperbolic branch and (t1 - t0)^4 in the critical branch. ``reading="printed"``
    uses cos in the hyperbolic branch and (t1 - t0)^2 at a0, as typeset in the
    source derivation; it is kept only to report which reading matches.
    """
    basis = basis or jacobi_basis(a)
    T = t1 - t0
    U = basis.U
    if basis.regime == "critical":
        power = 4 if reading == "derived" else 2
        return basis.particular * U * T**power / 6.0
    b, b3 = basis.rate, basis.particular
    x = 0.5 * b * T
    if basis.regime == "oscillatory":
        return 4.0 * b3 / b * U * math.sin(x) * (math.sin(x) - x * math.cos(x))
    inner = math.cosh(x) if reading == "derived" else math.cos(x)
    return 4.0 * b3 / b * U * math.sinh(x) * (math.sinh(x) - x * inner)


@dataclass
class ConjugateScan:
    a: float
    regime: str
    rate: float
    first_zero: Optional[float]
    would_be_zero: Optional[float]
    min_abs_D: float
    sign: int

    @property
    def conjugate_free(self) -> bool:
        return self.first_zero is None

    def row(self) -> dict:
        return {
            "a": self.a,
            "regime": self.regime,
            "b": self.rate,
            "first_zero_or_none": "none" if self.first_zero is None else self.first_zero,
            "min_D_on_window": self.min_abs_D,
        }


def conjugate_scan(a: float, window: float = TWO_PI, n_grid: int = 512,
                   spec: QuadratureSpec = DEFAULT_SPEC,
                   eps_boundary: float = EPS_BOUNDARY) -> ConjugateScan:
    """Look for a zero of t1 -> D(0, t1) on (0, window] using the quadrature determinant.

    D is sampled at t1 = window k / n_grid, k = 1..n_grid; a sign change (or
    an exact zero) is refined with Brent's method. In the oscillatory regime the
    analytic first zero 2 pi / b1 is returned as ``would_be_zero`` whether or
    not it falls inside the window. ``min_abs_D`` is min |D| over the grid.
    """
    _check(a, eps_boundary)
    basis = jacobi_basis(a, eps_boundary)
    ts = window * np.arange(1, n_grid + 1) / n_grid
    d = np.array([conjugate_determinant(a, 0.0, t, spec, basis=basis) for t in ts])
    sgn = np.sign(d)
    first = None
    zero_idx = np.flatnonzero(sgn == 0)
    change = np.flatnonzero(sgn[1:] * sgn[:-1] < 0)
    if zero_idx.size:
        first = float(ts[zero_idx[0]])
    if change.size and (first is None or ts[change[0]] < first):
        k = change[0]
        first = brentq(lambda t: conjugate_determinant(a, 0.0, t, spec, basis=basis),
                       ts[k], ts[k + 1], xtol=1e-13)
    would = TWO_PI / basis.rate if basis.regime == "oscillatory" else None
    return ConjugateScan(a, basis.regime, basis.rate, first, would,
                         float(np.min(np.abs(d))), int(sgn[0]))


def find_first_zero(a: float, t_max: float, spec: QuadratureSpec = DEFAULT_SPEC,
                    n_grid: int = 1024) -> Optional[float]:
    """First zero of D(0, t1) for t1 in (0, t_max], located on the quadrature determinant."""
    return conjugate_scan(a, window=t_max, n_grid=n_grid, spec=spec).first_zero
