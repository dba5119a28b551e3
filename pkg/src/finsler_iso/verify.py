"""Run every sufficiency check on origin-centred circles and bundle the results."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import circle
from .errors import BoundaryError, DomainError
from .jacobi import conjugate_scan
from .metric import EPS_BOUNDARY
from .quadrature import DEFAULT_SPEC, QuadratureSpec
from .variational import (
    VariationalReport,
    el_residual_polar,
    first_integral,
    integrate_el,
    lambda0,
    normality,
    second_variation_coefficient,
)
from .weierstrass import EScanSpec, negativity_scan


@dataclass
class CircleVerification:
    a: float
    report: VariationalReport
    drift_window: float
    regime: str
    weierstrass_violations: int

    def to_dict(self) -> dict:
        out = {"a": self.a}
        out.update(self.report.to_dict())
        out.update({"passed": self.report.passed, "failures": self.report.failures(),
                    "drift_window": self.drift_window, "regime": self.regime,
                    "weierstrass_violations": self.weierstrass_violations})
        return out


def first_integral_drift(a: float, lam: float, kick: float = 1e-3, window: float = 2.0 * math.pi):
    """Spread of C1 along the solution started at (r, rdot) = (a, kick * a).

    Solutions near hyperbolic circles (or with a wrong multiplier) leave the
    disk or blow up before t = 2 pi; the drift is then measured up to that
    event. Returns (drift, covered window).
    """
    sol = integrate_el(a, kick * a, lam, t_end=window, strict=False)
    r, rd = sol.y
    for t_ev, y_ev in zip(sol.t_events, sol.y_events):
        if t_ev.size:
            window = float(t_ev[0])
            r, rd = np.append(r, y_ev[0][0]), np.append(rd, y_ev[0][1])
    if r.size < 2:
        raise DomainError(f"solution from circle({a}) leaves the domain immediately")
    c = first_integral(r, rd, lam)
    return float(np.max(c) - np.min(c)), window


def verify_circle(a: float, lambda_override: float = 0.0, spec: QuadratureSpec = DEFAULT_SPEC,
                  escan_samples: int = 100_000, seed: int = 0,
                  eps_boundary: float = EPS_BOUNDARY) -> CircleVerification:
    """All five sufficiency checks for circle(a) with multiplier lambda0(a) + lambda_override."""
    if not 0.0 < a < 1.0 - eps_boundary:
        raise BoundaryError(f"circle radius {a} outside (0, 1 - eps_boundary)")
    lam = lambda0(a) + lambda_override
    curve = circle(a, eps_boundary=eps_boundary)
    residual = el_residual_polar(curve, lam, spec).max
    drift, window = first_integral_drift(a, lam)
    t = 2.0 * np.pi * np.arange(spec.n_periodic) / spec.n_periodic
    normality_min = float(np.min(np.linalg.norm(normality(a, t, eps_boundary), axis=-1)))
    scan = negativity_scan(EScanSpec(samples=escan_samples, seed=seed, eps_boundary=eps_boundary), lam)
    jac = conjugate_scan(a, spec=spec, eps_boundary=eps_boundary)
    sign = int(np.sign(second_variation_coefficient(a, lam)))
    report = VariationalReport(
        el_residual_max=residual,
        first_integral_drift=drift,
        lambda_used=lam,
        normality_min=normality_min,
        weierstrass_worst=scan.worst_value,
        conjugate_free=jac.conjugate_free,
        second_variation_sign=sign,
    )
    return CircleVerification(a, report, window, jac.regime, scan.violations)
