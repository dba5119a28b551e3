"""Weierstrass excess function of J = A + lambda L and randomized sign scans."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, OriginError, SeedError, ZeroVectorError
from .metric import EPS_BOUNDARY
from .variational import lagrangian_h, lagrangian_h_grad

#: Below this |x| only the reduced form is used (the raw f-terms cancel badly).
NEAR_ORIGIN = 1e-4


def _check_vectors(v, p):
    if np.any(np.sum(np.asarray(v) ** 2, axis=-1) == 0) or np.any(np.sum(np.asarray(p) ** 2, axis=-1) == 0):
        raise ZeroVectorError("velocity and comparison direction must be nonzero")


def e_function(x, v, p, lam: float):
    """E = h(x, p) - h(x, v) - (p - v) . grad_v h(x, v), from the definition.

    Vectorized over leading dimensions. Points with 0 < |x| < 1e-4 are routed
    to the reduced form; x = 0 raises OriginError.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    p = np.asarray(p, dtype=float)
    _check_vectors(v, p)
    rho = np.sqrt(np.sum(x * x, axis=-1))
    if np.any(rho == 0.0):
        raise OriginError("the raw E-function contains the singular area coefficient")
    near = rho < NEAR_ORIGIN
    if np.ndim(rho) == 0:
        if near:
            return e_function_simplified(x, v, p, lam)
        _, hv = lagrangian_h_grad(x, v, lam)
        return float(lagrangian_h(x, p, lam) - lagrangian_h(x, v, lam) - np.sum((p - v) * hv, axis=-1))
    x, v, p = np.broadcast_arrays(x, v, p)
    out = np.empty(rho.shape)
    far = ~near
    if np.any(far):
        xf, vf, pf = x[far], v[far], p[far]
        _, hv = lagrangian_h_grad(xf, vf, lam)
        out[far] = lagrangian_h(xf, pf, lam) - lagrangian_h(xf, vf, lam) - np.sum((pf - vf) * hv, axis=-1)
    if np.any(near):
        out[near] = e_function_simplified(x[near], v[near], p[near], lam)
    return out


def e_function_simplified(x, v, p, lam: float):
    """Reduced E in which the area terms have cancelled.

    With q = 1 - |x|^2, A^2 = q|v|^2 + <x,v>^2, B^2 = q|p|^2 + <x,p>^2 and
    C = q <v,p> + <x,p><x,v>:

        E = lam/q^2 * ( B + <x,p>^2/B - C/A - 2<x,p><x,v>/A + <x,v>^2 C/A^3 ).

    Valid at the origin.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    p = np.asarray(p, dtype=float)
    _check_vectors(v, p)
    q = 1.0 - np.sum(x * x, axis=-1)
    xv = np.sum(x * v, axis=-1)
    xp = np.sum(x * p, axis=-1)
    A = np.sqrt(q * np.sum(v * v, axis=-1) + xv * xv)
    B = np.sqrt(q * np.sum(p * p, axis=-1) + xp * xp)
    C = q * np.sum(v * p, axis=-1) + xp * xv
    out = lam / (q * q) * (B + xp * xp / B - C / A - 2.0 * xp * xv / A + xv * xv * C / A**3)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class EScanSpec:
    samples: int = 100_000
    r_lo: float = 1e-3
    r_hi: float = 0.98
    seed: int = 0
    eps_angle: float = 1e-3
    eps_boundary: float = EPS_BOUNDARY

    def validate(self):
        if not isinstance(self.seed, (int, np.integer)) or isinstance(self.seed, bool) or self.seed < 0:
            raise SeedError(f"seed must be a non-negative integer, got {self.seed!r}")
        if self.samples < 1:
            raise SeedError("sample count must be at least 1")
        if not 0.0 < self.r_lo <= self.r_hi < 1.0 - self.eps_boundary:
            raise SeedError(f"radius band [{self.r_lo}, {self.r_hi}] not inside (0, 1 - eps_boundary)")
        if not 0.0 <= self.eps_angle < np.pi:
            raise SeedError("exclusion angle must lie in [0, pi)")


@dataclass
class EScanReport:
    samples: int
    violations: int
    worst_value: float
    worst_sample: dict

    def to_dict(self) -> dict:
        return {"samples": self.samples, "violations": self.violations,
                "worst_value": self.worst_value, "worst_sample": self.worst_sample}


def rng_for(seed: int) -> np.random.Generator:
    """Counter-based (Philox) generator keyed by `seed`."""
    return np.random.Generator(np.random.Philox(key=int(seed)))


def draw_tuples(spec: EScanSpec, proportional: bool = False):
    """Random (x, v, p) with |x| in the band.

    The angle between v and p is at least ``eps_angle`` unless
    `proportional`, in which case p = k v with k log-uniform in [0.1, 10].
    """
    spec.validate()
    g = rng_for(spec.seed)
    n = spec.samples
    rho = np.sqrt(g.uniform(spec.r_lo**2, spec.r_hi**2, n))
    ang = g.uniform(0.0, 2.0 * np.pi, n)
    x = np.stack([rho * np.cos(ang), rho * np.sin(ang)], axis=1)
    v_ang = g.uniform(0.0, 2.0 * np.pi, n)
    v_mag = np.exp(g.uniform(np.log(0.1), np.log(10.0), n))
    v = v_mag[:, None] * np.stack([np.cos(v_ang), np.sin(v_ang)], axis=1)
    p_mag = np.exp(g.uniform(np.log(0.1), np.log(10.0), n))
    if proportional:
        p_ang = v_ang
    else:
        delta = g.uniform(spec.eps_angle, np.pi, n) * g.choice([-1.0, 1.0], n)
        p_ang = v_ang + delta
    p = p_mag[:, None] * np.stack([np.cos(p_ang), np.sin(p_ang)], axis=1)
    return x, v, p


def negativity_scan(spec: EScanSpec, lam: float, proportional: bool = False) -> EScanReport:
    """Evaluate E on random tuples and report the largest value.

    A violation is any sample with E >= 0 (non-proportional directions).
    For ``proportional=True`` the report's worst value is max |E|, which
    should be at rounding level, and no violations are counted.
    """
    x, v, p = draw_tuples(spec, proportional)
    e = e_function(x, v, p, lam)
    if proportional:
        e = np.abs(e)
        violations = 0
    else:
        violations = int(np.count_nonzero(e >= 0.0))
    i = int(np.argmax(e))  # first index on ties
    worst = {"x": x[i].tolist(), "v": v[i].tolist(), "p": p[i].tolist()}
    return EScanReport(spec.samples, violations, float(e[i]), worst)

