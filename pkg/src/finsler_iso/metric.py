"""Berwald's projectively flat metric with zero flag curvature on the unit disk.

    F_B(x, y) = (sqrt(Q) + <x,y>)^2 / ((1 - |x|^2)^2 sqrt(Q)),
    Q = |y|^2 - (|x|^2 |y|^2 - <x,y>^2),

together with its spherically symmetric profile F_B = |y| phi(|x|, <x,y>/|y|).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BoundaryError, DomainError, ZeroVectorError

#: Points with |x| >= 1 - EPS_BOUNDARY are refused everywhere in the toolkit.
EPS_BOUNDARY = 1e-2
#: |s| may exceed r by this much (rounding in <x,y>/|y|) before it is an error.
S_CLAMP_TOL = 1e-10


def check_radius(r, eps_boundary: float = EPS_BOUNDARY):
    r = np.asarray(r, dtype=float)
    if np.any(r >= 1.0 - eps_boundary) or np.any(~np.isfinite(r)):
        raise BoundaryError(
            f"radius {np.max(r):.6g} not below 1 - eps_boundary = {1.0 - eps_boundary:.6g}"
        )
    if np.any(r < 0):
        raise DomainError("radius must be non-negative")
    return r


@dataclass(frozen=True)
class MetricPoint:
    """Base point `x` in the disk with tangent vector `y`, plus cached invariants."""

    x: np.ndarray
    y: np.ndarray
    r: float = field(init=False)
    u: float = field(init=False)
    s: float = field(init=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).reshape(2)
        y = np.asarray(self.y, dtype=float).reshape(2)
        u = float(np.hypot(y[0], y[1]))
        if u == 0.0:
            raise ZeroVectorError("tangent vector must be nonzero")
        r = float(np.hypot(x[0], x[1]))
        check_radius(r)
        s = float(x @ y) / u
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "s", float(np.clip(s, -r, r)))

    def norm(self) -> float:
        return float(self.u * phi(self.r, self.s))


def _phi(r, s):
    rad = np.sqrt(1.0 - r * r + s * s)
    return (rad + s) ** 2 / ((1.0 - r * r) ** 2 * rad)


def phi(r, s, eps_boundary: float = EPS_BOUNDARY):
    """Profile phi(r, s) of F_B, with r = |x| and s = <x,y>/|y|.

    Values of |s| that overshoot r by less than `S_CLAMP_TOL` are clamped.
    Accepts scalars or broadcastable arrays.
    """
    r = check_radius(r, eps_boundary)
    s = np.asarray(s, dtype=float)
    if np.any(np.abs(s) > r + S_CLAMP_TOL):
        raise DomainError("|s| must not exceed r")
    s = np.clip(s, -r, r)
    out = _phi(r, s)
    return float(out) if out.ndim == 0 else out


def finsler_norm(x, y, eps_boundary: float = EPS_BOUNDARY):
    """F_B(x, y) evaluated from the closed form in x and y.

    `x` and `y` have trailing dimension 2; leading dimensions broadcast.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xx = np.sum(x * x, axis=-1)
    yy = np.sum(y * y, axis=-1)
    xy = np.sum(x * y, axis=-1)
    check_radius(np.sqrt(xx), eps_boundary)
    if np.any(yy == 0.0):
        raise ZeroVectorError("tangent vector must be nonzero")
    rad = np.sqrt(yy - (xx * yy - xy * xy))
    out = (rad + xy) ** 2 / ((1.0 - xx) ** 2 * rad)
    return float(out) if np.ndim(out) == 0 else out
