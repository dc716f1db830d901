"""Command-line interface: scenario sweeps, the JM work bound, and invariant checks.

Exit codes: 0 success, 1 invalid input or I/O failure, 2 a check suite failed.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import report
from .errors import OQError
from .jointmeas import (
    bound_at_sharpness,
    bound_landscape,
    busch_criterion,
    optimize_bound_over_sharpness,
)
from .scenarios import (
    NvScenarioConfig,
    QubitScenarioConfig,
    config_metadata,
    load_config,
    qubit_bound_landscape,
    run_nv_sweep,
    run_qubit_sweep,
    with_grid,
)

EXIT_OK, EXIT_INVALID, EXIT_SUITE = 0, 1, 2
LANDSCAPE_MUS = np.linspace(0.0, 1.0, 101)


def _config(args, kind):
    if args.config:
        cfg = load_config(args.config, kind)
    else:
        cfg = QubitScenarioConfig() if kind == "qubit" else NvScenarioConfig()
    if args.grid is not None:
        cfg = with_grid(cfg, args.grid)
    return cfg


def _emit(args, header, body, meta) -> None:
    if args.out:
        report.write_csv(args.out, header, body)
        report.write_metadata(args.out, meta)
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        for row in body:
            w.writerow([report.fmt(x) for x in row])


def cmd_qubit(args) -> int:
    cfg = _config(args, "qubit")
    rows = run_qubit_sweep(cfg, workers=args.workers)
    header, body = report.qubit_rows(rows)
    _emit(args, header, body, {"scenario": "qubit", "config": config_metadata(cfg),
                               "grid": [cfg.t_grid[0], cfg.t_grid[-1], len(cfg.t_grid)]})
    if args.svg:
        from .plotting import plot_qubit_sweep

        plot_qubit_sweep(rows, qubit_bound_landscape(cfg, LANDSCAPE_MUS), LANDSCAPE_MUS, args.svg)
    return EXIT_OK


def cmd_nv(args) -> int:
    cfg = _config(args, "nv")
    rows = run_nv_sweep(cfg, workers=args.workers)
    header, body = report.nv_rows(rows)
    meta = {"scenario": "nv", "config": config_metadata(cfg),
            "grid": [cfg.t_grid[0], cfg.t_grid[-1], len(cfg.t_grid)]}
    if cfg.renormalized:
        meta["note"] = "populations renormalized to sum to one"
    _emit(args, header, body, meta)
    if args.svg:
        from .plotting import plot_nv_sweep

        plot_nv_sweep(rows, args.svg)
    return EXIT_OK


def cmd_jm_bound(args) -> int:
    if args.delta <= 0:
        raise OQError("--delta must be positive")
    dir_i = np.array([0.0, 0.0, 1.0])
    dir_f = np.array([np.sin(args.theta), 0.0, np.cos(args.theta)])
    mu_star, w_star = optimize_bound_over_sharpness(dir_i, dir_f, args.delta)
    print(f"mu_star={report.fmt(mu_star)}")
    print(f"W_cl_max={report.fmt(w_star)}")
    if args.mu is not None:
        if not 0.0 <= args.mu <= 1.0:
            raise OQError("--mu must lie in [0, 1]")
        jm, margin = busch_criterion(args.mu * dir_i, args.mu * dir_f)
        print(f"W_cl(mu)={report.fmt(bound_at_sharpness(dir_i, dir_f, args.delta, args.mu))}")
        print(f"busch_margin={report.fmt(margin)} jointly_measurable={jm}")
    curve = bound_landscape(dir_i, dir_f, args.delta, LANDSCAPE_MUS)
    if args.out:
        report.write_csv(args.out, ("mu", "w_cl"), zip(LANDSCAPE_MUS, curve))
    if args.svg:
        from .plotting import plot_bound_curve

        plot_bound_curve(LANDSCAPE_MUS, curve, mu_star, w_star, args.svg)
    return EXIT_OK


def cmd_check(args) -> int:
    from .checks import run_all

    results = run_all(seed=args.seed, scale=args.scale)
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} suites passed (seed {args.seed})")
    return EXIT_SUITE if failed else EXIT_OK


class _Parser(argparse.ArgumentParser):
    # usage errors are validation errors; exit code 2 is reserved for suite failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="oqwork", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, fn, help_ in (("qubit-sweep", cmd_qubit, "rotating-field qubit sweep"),
                            ("nv-sweep", cmd_nv, "three-level NV-center sweep")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--config", help="JSON config file (defaults if omitted)")
        s.add_argument("--out", help="CSV output path (stdout if omitted)")
        s.add_argument("--svg", help="write a figure to this SVG path")
        s.add_argument("--grid", type=int, help="resample the time grid to N points")
        s.add_argument("--workers", type=int, default=None, help="worker processes")
        s.set_defaults(func=fn)

    s = sub.add_parser("jm-bound", help="optimize the classical work bound over sharpness")
    s.add_argument("--theta", type=float, required=True, help="angle between measurement axes")
    s.add_argument("--delta", type=float, required=True, help="energy gap")
    s.add_argument("--mu", type=float, help="also report the bound at this sharpness")
    s.add_argument("--out", help="CSV of the bound against sharpness")
    s.add_argument("--svg", help="figure of the bound against sharpness")
    s.set_defaults(func=cmd_jm_bound)

    s = sub.add_parser("check", help="run the randomized invariant suites")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--scale", type=float, default=1.0, help="multiplier on instance counts")
    s.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OQError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
