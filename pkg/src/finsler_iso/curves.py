"""Closed C^2 curves in the unit disk stored as truncated Fourier series.

Two forms are supported. A *polar* curve is r(t) (cos t, sin t) with
r(t) = a + sum_k (alpha_k cos kt + beta_k sin kt); it is star-shaped about the
origin and always counterclockwise. A *cartesian* curve carries one Fourier
series per coordinate. Both are 2*pi-periodic in t.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    AmbiguousWindingError,
    BoundaryError,
    DomainError,
    NonPositiveRadiusError,
    OriginOnCurveError,
)
from .metric import EPS_BOUNDARY

VALIDATION_GRID = 4096
MIN_SPEED = 1e-8
#: Mode cap used by the optimizer unless overridden.
DEFAULT_MODES = 16


@dataclass(frozen=True)
class FourierSeries:
    """mean + sum_{k=1..K} (cos[k-1] cos kt + sin[k-1] sin kt)."""

    mean: float
    cos: np.ndarray
    sin: np.ndarray

    def __post_init__(self):
        c = np.array(self.cos, dtype=float).reshape(-1)
        s = np.array(self.sin, dtype=float).reshape(-1)
        if c.shape != s.shape:
            raise DomainError("cosine and sine coefficient arrays must match in length")
        c.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "mean", float(self.mean))
        object.__setattr__(self, "cos", c)
        object.__setattr__(self, "sin", s)

    @property
    def modes(self) -> int:
        return self.cos.size

    def evaluate(self, t, deriv: int = 0) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        k = np.arange(1, self.modes + 1, dtype=float)
        kt = np.multiply.outer(t, k)
        c, s = np.cos(kt), np.sin(kt)
        kp = k**deriv
        # d^n/dt^n cos = k^n cos(kt + n pi/2); cycle through the four phases.
        phase = deriv % 4
        if phase == 0:
            val = c @ (kp * self.cos) + s @ (kp * self.sin)
        elif phase == 1:
            val = -s @ (kp * self.cos) + c @ (kp * self.sin)
        elif phase == 2:
            val = -c @ (kp * self.cos) - s @ (kp * self.sin)
        else:
            val = s @ (kp * self.cos) - c @ (kp * self.sin)
        if deriv == 0:
            val = val + self.mean
        return val

    def to_dict(self) -> dict:
        return {"mean": self.mean, "cos": self.cos.tolist(), "sin": self.sin.tolist()}

    def scaled(self, factor: float) -> "FourierSeries":
        return FourierSeries(self.mean * factor, self.cos * factor, self.sin * factor)


def fit_fourier(values, modes: int) -> FourierSeries:
    """Fourier coefficients of samples taken at t_j = 2 pi j / N.

    Exact (to rounding) for any series with at most `modes` harmonics when
    N > 2 * modes.
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    if n <= 2 * modes:
        raise DomainError(f"need more than {2 * modes} samples to fit {modes} modes")
    c = np.fft.rfft(values) / n
    return FourierSeries(c[0].real, 2.0 * c[1 : modes + 1].real, -2.0 * c[1 : modes + 1].imag)


@dataclass(frozen=True)
class CurveSamples:
    n: int
    t: np.ndarray
    position: np.ndarray
    velocity: np.ndarray
    acceleration: np.ndarray
    # polar curves only
    r: Optional[np.ndarray] = None
    rdot: Optional[np.ndarray] = None
    rddot: Optional[np.ndarray] = None


@dataclass(frozen=True)
class Curve:
    """Immutable closed curve; construct through the helpers below.

    Invariants checked on a 4096-point grid at construction: the image stays in
    |c| <= 1 - eps_boundary, the speed never drops below 1e-8, and polar
    radii stay positive.
    """

    form: str
    components: tuple
    eps_boundary: float = field(default=EPS_BOUNDARY, compare=False)

    def __post_init__(self):
        if self.form not in ("polar", "cartesian"):
            raise DomainError(f"unknown curve form {self.form!r}")
        expected = 1 if self.form == "polar" else 2
        if len(self.components) != expected:
            raise DomainError(f"{self.form} curve needs {expected} Fourier series")
        object.__setattr__(self, "components", tuple(self.components))
        self._validate()

    def _validate(self):
        s = sample(self, VALIDATION_GRID)
        if self.form == "polar" and np.min(s.r) <= 0.0:
            raise NonPositiveRadiusError(f"polar radius reaches {np.min(s.r):.6g}")
        rmax = float(np.max(np.hypot(s.position[:, 0], s.position[:, 1])))
        if rmax > 1.0 - self.eps_boundary:
            raise BoundaryError(
                f"curve reaches |c| = {rmax:.6g} > 1 - eps_boundary = {1.0 - self.eps_boundary:.6g}"
            )
        if np.min(np.hypot(s.velocity[:, 0], s.velocity[:, 1])) <= MIN_SPEED:
            raise DomainError("curve is not regular: velocity vanishes")

    # polar accessors
    @property
    def mean(self) -> float:
        return self.components[0].mean

    @property
    def modes(self) -> int:
        return max(c.modes for c in self.components)

    @property
    def is_polar(self) -> bool:
        return self.form == "polar"

    def coefficients(self) -> np.ndarray:
        """Flat vector [a, alpha_1..alpha_K, beta_1..beta_K] of a polar curve."""
        if not self.is_polar:
            raise DomainError("coefficient vector is defined for polar curves only")
        c = self.components[0]
        return np.concatenate([[c.mean], c.cos, c.sin])

    def to_dict(self) -> dict:
        if self.is_polar:
            return {"form": "polar", **self.components[0].to_dict()}
        return {
            "form": "cartesian",
            "x": self.components[0].to_dict(),
            "y": self.components[1].to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: dict, eps_boundary: float = EPS_BOUNDARY) -> "Curve":
        if doc["form"] == "polar":
            comp = (FourierSeries(doc["mean"], doc["cos"], doc["sin"]),)
        elif doc["form"] == "cartesian":
            comp = tuple(FourierSeries(d["mean"], d["cos"], d["sin"]) for d in (doc["x"], doc["y"]))
        else:
            raise DomainError(f"unknown curve form {doc['form']!r}")
        return cls(doc["form"], comp, eps_boundary)


def circle(a: float, eps_boundary: float = EPS_BOUNDARY) -> Curve:
    """Origin-centred circle of Euclidean radius `a`, counterclockwise."""
    if not 0.0 < a < 1.0 - eps_boundary:
        raise BoundaryError(f"circle radius {a} outside (0, 1 - eps_boundary)")
    return make_polar_curve(a, eps_boundary=eps_boundary)


def make_polar_curve(
    a: float,
    amplitudes: Sequence[float] = (),
    *,
    cos: Optional[Sequence[float]] = None,
    sin: Optional[Sequence[float]] = None,
    eps_boundary: float = EPS_BOUNDARY,
) -> Curve:
    """Polar curve r(t) = a + sum_k alpha_k cos kt + beta_k sin kt.

    `amplitudes` is the flat vector [alpha_1..alpha_K, beta_1..beta_K];
    alternatively pass `cos` and/or `sin` directly.
    """
    amplitudes = np.asarray(amplitudes, dtype=float).reshape(-1)
    if cos is not None or sin is not None:
        if amplitudes.size:
            raise DomainError("pass either a flat amplitude vector or cos/sin, not both")
        c = np.asarray(cos if cos is not None else [], dtype=float)
        s = np.asarray(sin if sin is not None else [], dtype=float)
        k = max(c.size, s.size)
        c = np.pad(c, (0, k - c.size))
        s = np.pad(s, (0, k - s.size))
    else:
        if amplitudes.size % 2:
            raise DomainError("flat amplitude vector must have even length 2K")
        c, s = np.split(amplitudes, 2)
    return Curve("polar", (FourierSeries(a, c, s),), eps_boundary)


def polar_from_coefficients(z, eps_boundary: float = EPS_BOUNDARY) -> Curve:
    z = np.asarray(z, dtype=float)
    return make_polar_curve(z[0], z[1:], eps_boundary=eps_boundary)


def cartesian_curve(x: Sequence, y: Sequence, eps_boundary: float = EPS_BOUNDARY) -> Curve:
    """Curve from per-coordinate (mean, cos, sin) triples."""
    return Curve("cartesian", (FourierSeries(*x), FourierSeries(*y)), eps_boundary)


def offset_circle(center, radius: float, clockwise: bool = False,
                  eps_boundary: float = EPS_BOUNDARY) -> Curve:
    sgn = -1.0 if clockwise else 1.0
    return cartesian_curve(
        (center[0], [radius], [0.0]), (center[1], [0.0], [sgn * radius]), eps_boundary
    )


def to_cartesian(curve: Curve) -> Curve:
    """Exact Cartesian form of a polar curve (one extra harmonic)."""
    if not curve.is_polar:
        return curve
    k = curve.modes + 1
    n = max(64, 4 * k)
    s = sample(curve, n)
    return Curve(
        "cartesian",
        (fit_fourier(s.position[:, 0], k), fit_fourier(s.position[:, 1], k)),
        curve.eps_boundary,
    )


def reversed_curve(curve: Curve) -> Curve:
    """Same image traversed backwards (t -> -t); always Cartesian."""
    cart = to_cartesian(curve)
    comps = tuple(FourierSeries(c.mean, c.cos, -c.sin) for c in cart.components)
    return Curve("cartesian", comps, curve.eps_boundary)


def evaluate(curve: Curve, t, deriv: int = 0) -> np.ndarray:
    """Derivative `deriv` (0, 1 or 2) of c(t) at arbitrary parameters, shape (..., 2)."""
    t = np.asarray(t, dtype=float)
    if curve.is_polar:
        series = curve.components[0]
        r, rd, rdd = (series.evaluate(t, d) for d in range(3))
        e = np.stack([np.cos(t), np.sin(t)], axis=-1)
        e_perp = np.stack([-np.sin(t), np.cos(t)], axis=-1)
        if deriv == 0:
            return r[..., None] * e
        if deriv == 1:
            return rd[..., None] * e + r[..., None] * e_perp
        if deriv == 2:
            return (rdd - r)[..., None] * e + 2.0 * rd[..., None] * e_perp
        raise DomainError("only derivatives up to order 2 are supported")
    cx, cy = curve.components
    return np.stack([cx.evaluate(t, deriv), cy.evaluate(t, deriv)], axis=-1)


def sample(curve: Curve, n: int) -> CurveSamples:
    """Exact evaluation of position, velocity and acceleration at t_j = 2 pi j / n."""
    if n < 16:
        raise DomainError("need at least 16 sample nodes")
    t = 2.0 * np.pi * np.arange(n) / n
    pos, vel, acc = (evaluate(curve, t, d) for d in range(3))
    if curve.is_polar:
        series = curve.components[0]
        r, rd, rdd = (series.evaluate(t, d) for d in range(3))
        return CurveSamples(n, t, pos, vel, acc, r, rd, rdd)
    return CurveSamples(n, t, pos, vel, acc)


def winding_number(curve: Curve, n: int = VALIDATION_GRID, tol: float = 1e-9) -> int:
    """Winding number about the origin from the unwrapped argument of c(t)."""
    s = sample(curve, n)
    rho = np.hypot(s.position[:, 0], s.position[:, 1])
    if np.min(rho) <= tol:
        raise OriginOnCurveError("curve passes through the origin")
    ang = np.arctan2(s.position[:, 1], s.position[:, 0])
    steps = np.diff(np.append(ang, ang[0]))
    steps = (steps + np.pi) % (2.0 * np.pi) - np.pi
    if np.max(np.abs(steps)) > 0.5 * np.pi:
        raise AmbiguousWindingError("argument jumps by more than pi/2 between nodes")
    turns = np.sum(steps) / (2.0 * np.pi)
    w = int(np.rint(turns))
    if abs(turns - w) >= 0.1:
        raise AmbiguousWindingError(f"argument increment {turns:.4f} turns is not near an integer")
    return w
