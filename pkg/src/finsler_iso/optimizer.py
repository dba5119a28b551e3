"""Maximize enclosed Busemann-Hausdorff area over polar-Fourier curves at fixed length.

Curves are handled as coefficient vectors z = [a, alpha_1..alpha_K, beta_1..beta_K].
Area (radial antiderivative form) and length are evaluated on a fixed
trigonometric table so batches of finite-difference probes cost one matrix
product.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .curves import Curve, DEFAULT_MODES, circle, make_polar_curve, polar_from_coefficients
from .errors import BoundaryError, DomainError, InfeasibleError, NonConvergenceError
from .metric import EPS_BOUNDARY
from .quadrature import DEFAULT_SPEC, QuadratureSpec

logger = logging.getLogger(__name__)


class PolarFunctionals:
    """Area and length of polar curves with K modes on N equispaced nodes."""

    def __init__(self, modes: int, n: int = DEFAULT_SPEC.n_periodic, euclidean: bool = False,
                 eps_boundary: float = EPS_BOUNDARY):
        t = 2.0 * np.pi * np.arange(n) / n
        k = np.arange(1, modes + 1)
        kt = np.outer(k, t)
        # rows: constant, cos kt, sin kt
        self.basis = np.vstack([np.ones((1, n)), np.cos(kt), np.sin(kt)])
        self.dbasis = np.vstack([np.zeros((1, n)), -k[:, None] * np.sin(kt), k[:, None] * np.cos(kt)])
        self.modes = modes
        self.n = n
        self.euclidean = euclidean
        self.eps_boundary = eps_boundary

    def radii(self, z):
        z = np.atleast_2d(z)
        return z @ self.basis, z @ self.dbasis

    def feasible(self, z) -> np.ndarray:
        r, _ = self.radii(z)
        return (r.min(axis=1) > 0.0) & (r.max(axis=1) < 1.0 - self.eps_boundary)

    def evaluate(self, z):
        """(area, length) for one vector or a batch (rows)."""
        r, rd = self.radii(z)
        scale = 2.0 * np.pi / self.n
        if self.euclidean:
            area = 0.5 * np.sum(r * r, axis=1) * scale
            length = np.sum(np.sqrt(r * r + rd * rd), axis=1) * scale
        else:
            r2 = r * r
            q = 1.0 - r2
            area = np.sum(np.log1p(1.5 * r2), axis=1) * scale / 3.0
            length = np.sum((r2 * q + (1.0 + r2) * rd * rd) / (q * q * np.sqrt(r2 * q + rd * rd)), axis=1) * scale
        if np.ndim(z) == 1:
            return float(area[0]), float(length[0])
        return area, length

    def area(self, z) -> float:
        return self.evaluate(z)[0]

    def length(self, z) -> float:
        return self.evaluate(z)[1]

    def gradients(self, z, step: float = 1e-6):
        """Central finite-difference gradients of area and length."""
        z = np.asarray(z, dtype=float)
        eye = step * np.eye(z.size)
        a, l = self.evaluate(np.vstack([z + eye, z - eye]))
        m = z.size
        return (a[:m] - a[m:]) / (2.0 * step), (l[:m] - l[m:]) / (2.0 * step)


def circle_length(a, euclidean: bool = False):
    """Length of circle(a): 2 pi a / (1 - a^2)^(3/2), or 2 pi a in Euclidean mode."""
    a = np.asarray(a, dtype=float)
    out = 2.0 * np.pi * a if euclidean else 2.0 * np.pi * a / (1.0 - a * a) ** 1.5
    return float(out) if out.ndim == 0 else out


def circle_area(a, euclidean: bool = False):
    a = np.asarray(a, dtype=float)
    out = np.pi * a * a if euclidean else 2.0 * np.pi / 3.0 * np.log1p(1.5 * a * a)
    return float(out) if out.ndim == 0 else out


def circle_radius_for_length(length: float, euclidean: bool = False,
                             eps_boundary: float = EPS_BOUNDARY) -> float:
    """Invert the (strictly increasing) circle length map."""
    hi = 1.0 - eps_boundary
    if not 0.0 < length < circle_length(hi, euclidean):
        raise InfeasibleError(f"no circle in the band has length {length}")
    return brentq(lambda a: circle_length(a, euclidean) - length, 1e-15, hi, xtol=1e-15)


def _project_vector(fun: PolarFunctionals, z, target: float, tol: float = 1e-10):
    """Scale z by s > 0 so that length(s z) = target (safeguarded Newton)."""
    r, _ = fun.radii(z)
    s_hi = (1.0 - fun.eps_boundary) / float(r.max()) * (1.0 - 1e-12)
    s_lo = 0.0

    def err(s):
        return fun.length(s * z) - target

    if err(s_hi) < 0:
        raise InfeasibleError(f"length {target} not reachable inside the radius band")
    s = 1.0
    if not s < s_hi:
        s = 0.5 * s_hi
    for _ in range(100):
        e = err(s)
        if abs(e) < tol:
            return s * z
        if e > 0:
            s_hi = s
        else:
            s_lo = s
        h = 1e-7 * s
        de = (err(s + h) - err(s - h)) / (2.0 * h)
        s_new = s - e / de if de > 0 else 0.5 * (s_lo + s_hi)
        if not s_lo < s_new < s_hi:
            s_new = 0.5 * (s_lo + s_hi)
        s = s_new
    raise InfeasibleError("length projection did not converge")


def project_to_length(curve: Curve, L_target: float, spec: QuadratureSpec = DEFAULT_SPEC,
                      euclidean: bool = False, tol: float = 1e-10) -> Curve:
    """Uniformly rescale r(theta) (all coefficients) until the length equals L_target."""
    if not curve.is_polar:
        raise DomainError("length projection works on polar curves")
    fun = PolarFunctionals(curve.modes, spec.n_periodic, euclidean, curve.eps_boundary)
    z = _project_vector(fun, curve.coefficients(), L_target, tol)
    return polar_from_coefficients(z, curve.eps_boundary)


@dataclass
class OptimProblem:
    target_length: float
    modes: int = DEFAULT_MODES
    spec: QuadratureSpec = DEFAULT_SPEC
    step0: float = 1e-2
    max_step: Optional[float] = None
    shrink: float = 0.5
    min_step: float = 1e-12
    armijo: float = 1e-4
    grad_tol: float = 1e-6
    constraint_tol: float = 1e-10
    max_iter: int = 5000
    fd_step: float = 1e-6
    preconditioner: str = "sobolev"
    euclidean: bool = False
    eps_boundary: float = EPS_BOUNDARY

    def __post_init__(self):
        if not self.target_length > 0:
            raise DomainError("target length must be positive")
        if self.modes < 1:
            raise DomainError("need at least one Fourier mode")
        if self.preconditioner not in ("none", "sobolev"):
            raise DomainError(f"unknown preconditioner {self.preconditioner!r}")
        if self.max_step is None:
            # unpreconditioned steps beyond step0 are nearly always rejected
            self.max_step = 1.0 if self.preconditioner == "sobolev" else self.step0

    def weights(self) -> np.ndarray:
        """Diagonal metric on coefficients: 1 (plain) or 1/(1 + k^2) per mode."""
        if self.preconditioner == "none":
            return np.ones(2 * self.modes + 1)
        k = np.arange(1, self.modes + 1, dtype=float)
        w = 1.0 / (1.0 + k * k)
        return np.concatenate([[1.0], w, w])


@dataclass
class OptimResult:
    curve: Curve
    area: float
    length: float
    iterations: int
    converged: bool
    multiplier: float
    history: list = field(default_factory=list)

    @property
    def amplitudes(self) -> np.ndarray:
        return self.curve.coefficients()[1:]

    def to_dict(self) -> dict:
        return {
            "curve": self.curve.to_dict(),
            "area": self.area,
            "length": self.length,
            "iterations": self.iterations,
            "converged": self.converged,
            "multiplier": self.multiplier,
            "history": [{"area": a, "length": l, "grad_norm": g} for a, l, g in self.history],
        }


def _pad(z, modes):
    k = (z.size - 1) // 2
    if k > modes:
        raise DomainError(f"initial curve has {k} modes, problem allows {modes}")
    out = np.zeros(2 * modes + 1)
    out[0] = z[0]
    out[1 : k + 1] = z[1 : k + 1]
    out[modes + 1 : modes + 1 + k] = z[k + 1 :]
    return out


def fitted_multiplier(grad_area, grad_length) -> float:
    """Least-squares lambda in grad_area + lambda grad_length = 0."""
    return float(-(grad_area @ grad_length) / (grad_length @ grad_length))


def constrained_ascent(problem: OptimProblem, init: Curve, raise_on_failure: bool = False) -> OptimResult:
    """Projected-gradient ascent of area with the length restored after every step.

    Each iteration forms the area gradient projected orthogonally to the
    length gradient (in the coefficient metric chosen by
    ``problem.preconditioner``; "sobolev" damps mode k by 1/(1+k^2), which
    removes most of the k^2 growth of the Hessian), takes a backtracking (Armijo) step starting from
    ``step0`` on the first iteration and twice the last accepted step
    afterwards (capped at ``max_step``), then rescales the curve back onto the
    length constraint. Stops once the projected gradient norm drops below
    ``grad_tol``, or when the line search can make no further progress.
    """
    fun = PolarFunctionals(problem.modes, problem.spec.n_periodic, problem.euclidean, problem.eps_boundary)
    z = _project_vector(fun, _pad(init.coefficients(), problem.modes), problem.target_length,
                        problem.constraint_tol)
    area, length = fun.evaluate(z)
    history = []
    step = 0.5 * problem.step0
    converged = False
    lam = float("nan")
    it = 0
    w = problem.weights()
    slack = 8.0 * np.finfo(float).eps * max(1.0, abs(area))
    for it in range(1, problem.max_iter + 1):
        ga, gl = fun.gradients(z, problem.fd_step)
        lam = fitted_multiplier(ga, gl)
        gnorm = float(np.linalg.norm(ga + lam * gl))
        mu = -float((ga * w) @ gl) / float((gl * w) @ gl)
        d = w * (ga + mu * gl)
        slope = float((ga + mu * gl) @ d)
        history.append((area, length, gnorm))
        if gnorm < problem.grad_tol:
            converged = True
            break
        step = min(2.0 * step, problem.max_step)
        accepted = False
        while step >= problem.min_step:
            trial = z + step * d
            if fun.feasible(trial)[0]:
                try:
                    trial = _project_vector(fun, trial, problem.target_length, problem.constraint_tol)
                except InfeasibleError:
                    trial = None
                if trial is not None:
                    a_new, l_new = fun.evaluate(trial)
                    if a_new >= area + problem.armijo * step * slope - slack:
                        accepted = True
                        break
            step *= problem.shrink
        if not accepted:
            # no ascent left at rounding level: a stationary point up to FD noise
            converged = gnorm < 100.0 * problem.grad_tol
            break
        z, area, length = trial, a_new, l_new
    result = OptimResult(polar_from_coefficients(z, problem.eps_boundary), area, length, it,
                         converged, lam, history)
    logger.debug("ascent finished after %d iterations, converged=%s", it, converged)
    if not converged and raise_on_failure:
        raise NonConvergenceError(f"ascent did not converge in {it} iterations", result)
    return result


def random_perturbation(a: float, modes: int, amplitude: float, rng: np.random.Generator,
                        eps_boundary: float = EPS_BOUNDARY, max_draws: int = 1000) -> Curve:
    """circle(a) plus independent U[-amplitude, amplitude] coefficients on modes 1..K.

    Draws that leave the radius band are discarded and redrawn from the same stream.
    """
    for _ in range(max_draws):
        amps = rng.uniform(-amplitude, amplitude, 2 * modes)
        try:
            return make_polar_curve(a, amps, eps_boundary=eps_boundary)
        except (BoundaryError, DomainError):
            continue
    raise InfeasibleError("could not draw a perturbation inside the radius band")


@dataclass
class LocalMaxReport:
    a: float
    amplitude: float
    excess: np.ndarray
    max_amplitude: np.ndarray

    @property
    def max_excess(self) -> float:
        return float(np.max(self.excess))

    @property
    def all_negative(self) -> bool:
        return bool(np.all(self.excess < 0.0))

    @property
    def decay_constant(self) -> float:
        """Smallest observed -excess / amplitude^2 (positive for a strict maximum)."""
        if self.amplitude == 0:
            return 0.0
        return float(np.min(-self.excess) / self.amplitude**2)

    def rows(self) -> list:
        return [{"trial": i, "excess": float(e), "max_amplitude": float(m)}
                for i, (e, m) in enumerate(zip(self.excess, self.max_amplitude))]


def local_max_test(a: float, n_trials: int, amplitude: float, seed: int, modes: int = 8,
                   spec: QuadratureSpec = DEFAULT_SPEC, euclidean: bool = False) -> LocalMaxReport:
    """Area excess over circle(a) of random perturbations projected to its length.

    Trial i uses its own Philox stream keyed by (seed, i), so trials are
    independent of evaluation order.
    """
    fun = PolarFunctionals(modes, spec.n_periodic, euclidean)
    z_circle = np.zeros(2 * modes + 1)
    z_circle[0] = a
    base_area, target = fun.evaluate(z_circle)
    excess = np.empty(n_trials)
    max_amp = np.empty(n_trials)
    for i in range(n_trials):
        rng = np.random.Generator(np.random.Philox(key=[int(seed), i]))
        curve = random_perturbation(a, modes, amplitude, rng) if amplitude > 0 else circle(a)
        z = _project_vector(fun, _pad(curve.coefficients(), modes), target)
        excess[i] = fun.area(z) - base_area
        max_amp[i] = float(np.max(np.abs(z[1:]))) if z.size > 1 else 0.0
    return LocalMaxReport(a, amplitude, excess, max_amp)


def quadratic_decay(a: float, direction, amplitudes=(1e-2, 5e-3, 2.5e-3),
                    spec: QuadratureSpec = DEFAULT_SPEC) -> np.ndarray:
    """Area excess along a fixed perturbation direction for each amplitude."""
    direction = np.asarray(direction, dtype=float)
    modes = direction.size // 2
    fun = PolarFunctionals(modes, spec.n_periodic)
    z0 = np.zeros(2 * modes + 1)
    z0[0] = a
    base, target = fun.evaluate(z0)
    out = []
    for eps in amplitudes:
        z = z0.copy()
        z[1:] += eps * direction
        z = _project_vector(fun, z, target)
        out.append(fun.area(z) - base)
    return np.array(out)


@dataclass
class MultiStartReport:
    target_length: float
    reference_radius: float
    circle_area: float
    results: list
    search_class: str
    euclidean: bool = False

    @property
    def best_area(self) -> float:
        return max(r.area for r in self.results)

    def excesses(self, euclidean: bool = False) -> np.ndarray:
        """Area of each run minus the area of the circle with that run's exact final length."""
        return np.array([r.area - circle_area(circle_radius_for_length(r.length, euclidean), euclidean)
                         for r in self.results])

    @property
    def best_excess(self) -> float:
        return float(np.max(self.excesses(self.euclidean)))

    def counterexample(self, tol: float = 1e-8) -> bool:
        return self.best_excess > tol

    def to_dict(self) -> dict:
        return {
            "search_class": self.search_class,
            "target_length": self.target_length,
            "reference_radius": self.reference_radius,
            "circle_area": self.circle_area,
            "best_area": self.best_area,
            "best_excess": self.best_excess,
            "euclidean": self.euclidean,
            "potential_counterexample": self.counterexample(),
            "runs": [r.to_dict() for r in self.results],
        }


def multistart(a: float, starts: int, modes: int = DEFAULT_MODES, amplitude: float = 0.02,
               seed: int = 0, euclidean: bool = False, spec: QuadratureSpec = DEFAULT_SPEC,
               **problem_kw) -> MultiStartReport:
    """Constrained ascent from `starts` seeded perturbations of circle(a) at its length."""
    if starts < 1:
        raise DomainError("need at least one start")
    target = circle_length(a, euclidean)
    problem = OptimProblem(target, modes=modes, spec=spec, euclidean=euclidean, **problem_kw)
    results = []
    for i in range(starts):
        rng = np.random.Generator(np.random.Philox(key=[int(seed), i]))
        init = random_perturbation(a, modes, amplitude, rng)
        results.append(constrained_ascent(problem, init))
    search = (f"star-shaped polar-Fourier curves r(theta) = a + sum_(k<={modes}) "
              f"(alpha_k cos k theta + beta_k sin k theta), origin inside")
    return MultiStartReport(target, a, circle_area(a, euclidean), results, search, euclidean)
