"""Command-line entry point: ``finsler-iso <subcommand> [options]``.

Exit codes: 0 success, 1 usage or configuration error, 2 a verification check failed.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import serialize
from .errors import FinslerIsoError
from .jacobi import conjugate_scan, critical_radius
from .measures import density_scan
from .metric import EPS_BOUNDARY
from .quadrature import DEFAULT_SPEC, QuadratureSpec

logger = logging.getLogger("finsler_iso")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_FAILED = 2

VERIFY_GRID = (0.05, 0.1, 0.2, 0.2944, 0.5, 0.7, 0.9)
DENSITY_GRID = tuple(round(0.05 * k, 2) for k in range(19))
DENSITY_TOL = 1e-9
OUT_ENV = "FINSLER_ISO_OUT"


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits with the configuration status instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    subcommand: str
    grid: Optional[tuple] = None
    spec: QuadratureSpec = DEFAULT_SPEC
    seed: int = 0
    out: Path = Path("finsler_iso_out")
    fmt: str = "both"
    lambda_override: float = 0.0
    euclidean: bool = False
    starts: int = 20
    modes: int = 16
    amplitude: float = 0.02
    trials: int = 500
    extra: dict = field(default_factory=dict)

    @property
    def want_csv(self) -> bool:
        return self.fmt in ("csv", "both")

    @property
    def want_json(self) -> bool:
        return self.fmt in ("json", "both")


def parse_grid(text: Optional[str]) -> Optional[tuple]:
    """Comma-separated radii; the token ``a0`` stands for the critical radius."""
    if text is None:
        return None
    values = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if token.lower() == "a0":
            values.append(critical_radius())
            continue
        try:
            values.append(float(token))
        except ValueError:
            raise ConfigError(f"bad grid entry {token!r}") from None
    if not values:
        raise ConfigError("grid is empty")
    return tuple(values)


def jacobi_default_grid() -> tuple:
    grid = [round(0.02 * k, 2) for k in range(1, 50)]
    grid.append(critical_radius())
    return tuple(sorted(grid))


def _common(p: argparse.ArgumentParser):
    p.add_argument("--grid", help="comma-separated radii (token a0 = critical radius)")
    p.add_argument("--seed", type=int, default=0, help="random seed (non-negative integer)")
    p.add_argument("--out", default="finsler_iso_out",
                   help=f"output directory (overridden by ${OUT_ENV})")
    p.add_argument("--format", dest="fmt", choices=("csv", "json", "both"), default="both")
    p.add_argument("--quadrature-nodes", type=int, default=DEFAULT_SPEC.n_periodic,
                   help="nodes of the periodic trapezoid rule")
    p.add_argument("--tol", type=float, default=DEFAULT_SPEC.tol,
                   help="absolute tolerance of adaptive quadrature")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="finsler-iso",
                     description="Isoperimetric checks for the Berwald metric on the unit disk.")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="all sufficiency checks on origin-centred circles")
    _common(p)
    p.add_argument("--lambda-override", type=float, default=0.0,
                   help="added to lambda0(a) before checking")

    p = sub.add_parser("density-scan", help="Busemann-Hausdorff density: quadrature vs closed form")
    _common(p)

    p = sub.add_parser("jacobi-scan", help="conjugate-point scan over circle radii")
    _common(p)

    for name, helptext in (("optimize", "multi-start constrained area ascent"),
                           ("local-max", "random length-matched perturbations of a circle")):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        p.add_argument("--euclidean-mode", action="store_true",
                       help="swap in the Euclidean metric and area")
        p.add_argument("--modes", type=int, default=16 if name == "optimize" else 8)
        p.add_argument("--amplitude", type=float, default=0.02 if name == "optimize" else 0.01)
        if name == "optimize":
            p.add_argument("--starts", type=int, default=20)
        else:
            p.add_argument("--trials", type=int, default=500)

    p = sub.add_parser("accept", help="run every acceptance criterion")
    _common(p)
    return parser


def config_from_args(args) -> RunConfig:
    if args.seed < 0:
        raise ConfigError("seed must be non-negative")
    try:
        spec = QuadratureSpec(n_periodic=args.quadrature_nodes, tol=args.tol)
    except FinslerIsoError as exc:
        raise ConfigError(str(exc)) from None
    out = Path(os.environ.get(OUT_ENV) or args.out)
    cfg = RunConfig(subcommand=args.subcommand, grid=parse_grid(args.grid), spec=spec,
                    seed=args.seed, out=out, fmt=args.fmt)
    cfg.lambda_override = getattr(args, "lambda_override", 0.0)
    cfg.euclidean = getattr(args, "euclidean_mode", False)
    cfg.modes = getattr(args, "modes", cfg.modes)
    cfg.amplitude = getattr(args, "amplitude", cfg.amplitude)
    cfg.starts = getattr(args, "starts", cfg.starts)
    cfg.trials = getattr(args, "trials", cfg.trials)
    if cfg.starts < 1:
        raise ConfigError("--starts must be at least 1")
    if cfg.trials < 1:
        raise ConfigError("--trials must be at least 1")
    if cfg.modes < 1:
        raise ConfigError("--modes must be at least 1")
    if cfg.amplitude < 0:
        raise ConfigError("--amplitude must be non-negative")
    return cfg


def _prepare_out(cfg: RunConfig):
    try:
        cfg.out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {cfg.out}: {exc}") from None
    if not os.access(cfg.out, os.W_OK):
        raise ConfigError(f"output directory {cfg.out} is not writable")


def _check_radii(grid, lo_inclusive: bool = False):
    for a in grid:
        ok = (0.0 <= a if lo_inclusive else 0.0 < a) and a < 1.0 - EPS_BOUNDARY
        if not ok:
            raise ConfigError(f"BoundaryError: radius {a} outside the admissible band "
                              f"{'[' if lo_inclusive else '('}0, {1.0 - EPS_BOUNDARY})")


def _fmt(x) -> str:
    if x is None:
        return "none"
    if isinstance(x, (bool, np.bool_)):
        return "yes" if x else "no"
    if isinstance(x, (float, np.floating)):
        return f"{x:.6g}"
    return str(x)


def print_table(rows: list, columns: list, stream=None):
    stream = stream or sys.stdout
    cells = [[_fmt(r.get(c)) for c in columns] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) if cells else len(c)
              for i, c in enumerate(columns)]
    print("  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip(), file=stream)
    for row in cells:
        print("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip(), file=stream)


def _emit(cfg: RunConfig, stem: str, rows: list, document=None, columns=None):
    if cfg.want_csv and rows:
        serialize.write_text(cfg.out / f"{stem}.csv", serialize.csv_text(rows, columns))
    if cfg.want_json:
        serialize.write_text(cfg.out / f"{stem}.json", serialize.dumps(document if document is not None else rows))


def _radius_tag(a: float) -> str:
    return repr(float(a))


def cmd_verify(cfg: RunConfig) -> int:
    from .verify import verify_circle

    grid = cfg.grid or VERIFY_GRID
    _check_radii(grid)
    _prepare_out(cfg)
    rows = []
    for a in grid:
        res = verify_circle(a, cfg.lambda_override, cfg.spec, seed=cfg.seed)
        doc = res.to_dict()
        serialize.write_text(cfg.out / f"verify_a{_radius_tag(a)}.json", serialize.dumps(doc))
        rows.append(doc)
    columns = ["a", "regime", "lambda_used", "el_residual_max", "first_integral_drift",
               "normality_min", "weierstrass_worst", "conjugate_free", "second_variation_sign", "passed"]
    print_table(rows, columns)
    if cfg.want_csv:
        serialize.write_text(cfg.out / "verify_summary.csv", serialize.csv_text(rows, columns))
    failed = [r for r in rows if not r["passed"]]
    for r in failed:
        print(f"FAIL a={_fmt(r['a'])}: {', '.join(r['failures'])}")
    return EXIT_FAILED if failed else EXIT_OK


def cmd_density_scan(cfg: RunConfig) -> int:
    grid = cfg.grid or DENSITY_GRID
    _check_radii(grid, lo_inclusive=True)
    _prepare_out(cfg)
    rows = density_scan(grid, cfg.spec)
    columns = ["r", "sigma_quadrature", "sigma_closed", "abs_error"]
    print_table(rows, columns)
    _emit(cfg, "density_scan", rows, columns=columns)
    worst = max(r["abs_error"] for r in rows)
    print(f"max abs error {worst:.3e} (threshold {DENSITY_TOL:g})")
    return EXIT_OK if worst < DENSITY_TOL else EXIT_FAILED


def cmd_jacobi_scan(cfg: RunConfig) -> int:
    grid = cfg.grid or jacobi_default_grid()
    _check_radii(grid)
    _prepare_out(cfg)
    scans = [conjugate_scan(a, spec=cfg.spec) for a in grid]
    rows = []
    for s in scans:
        row = s.row()
        row["would_be_zero"] = s.would_be_zero
        rows.append(row)
    columns = ["a", "regime", "b", "first_zero_or_none", "min_D_on_window", "would_be_zero"]
    print_table(rows, columns)
    _emit(cfg, "jacobi_scan", rows, columns=columns)
    hits = [s for s in scans if not s.conjugate_free]
    for s in hits:
        print(f"FAIL conjugate point at a={s.a:.6g}, t1={s.first_zero:.10g}")
    return EXIT_FAILED if hits else EXIT_OK


def _reference_radius(cfg: RunConfig) -> float:
    grid = cfg.grid or (0.5,)
    if len(grid) != 1:
        raise ConfigError("optimize/local-max take a single reference radius in --grid")
    _check_radii(grid)
    return grid[0]


def cmd_optimize(cfg: RunConfig) -> int:
    from .optimizer import multistart

    a = _reference_radius(cfg)
    _prepare_out(cfg)
    report = multistart(a, cfg.starts, modes=cfg.modes, amplitude=cfg.amplitude, seed=cfg.seed,
                        euclidean=cfg.euclidean, spec=cfg.spec)
    excess = report.excesses(cfg.euclidean)
    rows = []
    for i, (r, e) in enumerate(zip(report.results, excess)):
        row = {"start": i, "iterations": r.iterations, "converged": r.converged, "area": r.area,
               "length": r.length, "excess_over_circle": float(e), "multiplier": r.multiplier,
               "max_amplitude": float(np.max(np.abs(r.amplitudes)))}
        if cfg.euclidean:
            row["isoperimetric_ratio"] = r.length**2 / (4.0 * np.pi * r.area)
        rows.append(row)
    print(f"searched class: {report.search_class}")
    print(f"target length {report.target_length:.12g}, circle area {report.circle_area:.12g}")
    print_table(rows, list(rows[0].keys()))
    _emit(cfg, "optimize", rows, document=report.to_dict())
    status = EXIT_OK
    if report.counterexample():
        print(f"*** POTENTIAL COUNTEREXAMPLE: best area exceeds the circle by {report.best_excess:.3e} ***")
        status = EXIT_FAILED
    if not all(r.converged for r in report.results):
        print("some runs did not converge")
        status = EXIT_FAILED
    print(f"best excess over circle {report.best_excess:.3e}")
    return status


def cmd_local_max(cfg: RunConfig) -> int:
    from .optimizer import local_max_test

    a = _reference_radius(cfg)
    _prepare_out(cfg)
    rep = local_max_test(a, cfg.trials, cfg.amplitude, cfg.seed, modes=cfg.modes, spec=cfg.spec,
                         euclidean=cfg.euclidean)
    rows = rep.rows()
    doc = {"a": a, "amplitude": cfg.amplitude, "trials": cfg.trials, "max_excess": rep.max_excess,
           "all_negative": rep.all_negative, "decay_constant": rep.decay_constant, "rows": rows}
    _emit(cfg, "local_max", rows, document=doc, columns=["trial", "excess", "max_amplitude"])
    print(f"trials {cfg.trials}, max excess {rep.max_excess:.6e}, "
          f"min -excess/amplitude^2 {rep.decay_constant:.6g}")
    if cfg.amplitude == 0:
        return EXIT_OK if np.all(rep.excess == 0) else EXIT_FAILED
    return EXIT_OK if rep.all_negative else EXIT_FAILED


def cmd_accept(cfg: RunConfig) -> int:
    from .acceptance import run_all

    _prepare_out(cfg)
    results = run_all()
    rows = [r.to_dict() for r in results]
    for r in results:
        print(r.line())
    _emit(cfg, "acceptance", rows, columns=["criterion", "name", "passed", "summary", "seconds"])
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


COMMANDS = {
    "verify": cmd_verify,
    "density-scan": cmd_density_scan,
    "jacobi-scan": cmd_jacobi_scan,
    "optimize": cmd_optimize,
    "local-max": cmd_local_max,
    "accept": cmd_accept,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.subcommand](cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FinslerIsoError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
