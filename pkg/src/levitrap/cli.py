"""Command-line front end: ``levitrap report|sweep|oracle|regression``.

Errors derived from :class:`LevitrapError` are printed to stderr as a JSON
object and mapped to the exit code carried by the exception class
(2 validation, 3 instability, 4 under-sampled oracle run).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import itertools
import json
import math
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import LevitrapError, ValidationError
from .pipeline import SWEEPABLE, evaluate, with_parameter
from .report import (build_report, csv_cell, dumps_csv, dumps_json, report_csv,
                     summary_scalars)
from .scenario import FIXTURES, Scenario, fixture, load_scenario
from .units import to_si

_PARAM = re.compile(r"^\s*(?P<name>[A-Za-z_][A-Za-z0-9_]*)\s*(\[(?P<unit>[^\]]*)\])?\s*="
                    r"\s*(?P<grid>.+)$")


def load_config(spec) -> Scenario:
    """Scenario from a JSON path or a built-in ``fixture:<name>``."""
    if spec.startswith("fixture:"):
        name = spec.split(":", 1)[1]
        if name not in FIXTURES:
            raise ValidationError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}")
        return fixture(name)
    return load_scenario(spec)


def parse_sweep_param(text):
    """Parse ``name[unit]=start:stop:steps[:log]`` into (name, SI grid).

    >>> parse_sweep_param("P_L[mW]=50:100:2")[1]
    array([0.05, 0.1 ])
    """
    m = _PARAM.match(text)
    if not m:
        raise ValidationError(f"bad sweep parameter {text!r}; use name[unit]=start:stop:steps[:log]")
    name, unit = m["name"], m["unit"] or ""
    if name not in SWEEPABLE:
        raise ValidationError(f"unknown sweep parameter {name!r}; allowed: {', '.join(SWEEPABLE)}")
    parts = m["grid"].split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "log"):
        raise ValidationError(f"bad grid {m['grid']!r}; use start:stop:steps[:log]")
    try:
        start, stop = to_si(parts[0], unit), to_si(parts[1], unit)
        steps = int(parts[2])
    except ValueError:
        raise ValidationError(f"non-numeric grid in {text!r}") from None
    if steps < 1:
        raise ValidationError("steps must be at least 1")
    if len(parts) == 4:
        if start <= 0 or stop <= 0:
            raise ValidationError("log grid needs positive end points")
        grid = np.geomspace(start, stop, steps)
    else:
        grid = np.linspace(start, stop, steps)
    return name, grid


def worker_count():
    raw = os.environ.get("LEVITRAP_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValidationError(f"LEVITRAP_THREADS must be an integer (got {raw!r})") from None


def _sweep_point(args):
    scenario, assignments = args
    s = scenario
    try:
        for name, value in assignments:
            s = with_parameter(s, name, value)
        return summary_scalars(evaluate(s)), ""
    except LevitrapError as exc:
        return {}, f"{type(exc).__name__}: {exc}"


def run_sweep(scenario, params, workers=1):
    """Header and rows for the cartesian product of the parameter grids.

    Rows follow the grid order whatever the scheduling; failed points keep
    their row with an ``error`` message and empty result columns.
    """
    names = [n for n, _ in params]
    points = [tuple(zip(names, combo)) for combo in itertools.product(*(g for _, g in params))]
    jobs = [(scenario, pt) for pt in points]
    if workers <= 1 or len(jobs) <= 1:
        results = [_sweep_point(j) for j in jobs]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_point, jobs))
    keys = []
    for scalars, _ in results:
        keys.extend(k for k in scalars if k not in keys)
    header = names + keys + ["error"]
    rows = []
    for pt, (scalars, error) in zip(points, results):
        rows.append([v for _, v in pt] + [scalars.get(k) for k in keys] + [error])
    return header, rows


def _write(text, out):
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)


def _plot_path(out, suffix):
    if not out:
        raise ValidationError("--plot needs --out so the figure has somewhere to go")
    p = Path(out)
    return p.with_name(f"{p.stem}{suffix}.png")


# --------------------------------------------------------------------------
# subcommands

def cmd_report(args):
    s = load_config(args.config)
    if args.strict:
        s = s.replace(solver=dataclasses.replace(s.solver, strict=True))
    res = evaluate(s)
    doc = build_report(res, timestamp=args.timestamp)
    _write(report_csv(doc) if args.format == "csv" else dumps_json(doc), args.out)
    if args.plot:
        from .plotting import plot_report

        plot_report(doc, _plot_path(args.out, ""))
    for w in res.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def cmd_sweep(args):
    s = load_config(args.config)
    if not args.param or len(args.param) > 2:
        raise ValidationError("give one or two --param options")
    params = [parse_sweep_param(p) for p in args.param]
    if len({n for n, _ in params}) != len(params):
        raise ValidationError("the same parameter is swept twice")
    header, rows = run_sweep(s, params, worker_count())
    if args.format == "json":
        records = [dict(zip(header, row)) for row in rows]
        text = dumps_json({"parameters": [n for n, _ in params], "rows": records})
    else:
        text = dumps_csv(rows, header)
    _write(text, args.out)
    if args.plot:
        from .plotting import plot_sweep

        columns = [c for c in ("m_1", "m_3", "fb_m_1", "fb_m_3") if c in header]
        plot_sweep(header, rows, [n for n, _ in params], columns, _plot_path(args.out, ""))
    return 0


def _check_record(suite, c):
    return {"suite": suite, "name": c.name, "estimate": c.estimate, "stderr": c.stderr,
            "target": c.target, "ratio": c.estimate / c.target if c.target else math.nan,
            "z": c.z_score, "passed": c.passed, "note": c.note}


def cmd_oracle(args):
    from .oracle import photons
    from .oracle.dump import write_dump
    from .oracle.suite import ladder_suite, psd_suite, require_events

    res = evaluate(load_config(args.config), with_feedback=False)
    records = []
    if args.which in ("psd", "all"):
        duration = args.duration
        if duration is None:
            duration = photons.duration_for_events(res.coefficients, res.scenario.beam,
                                                   args.events)
        require_events(res, duration, photons.MIN_EVENTS)
        checks, streams, estimates = psd_suite(res, seed=args.seed, duration=duration)
        records += [_check_record("psd", c) for c in checks]
        if args.dump:
            times, pressure, recoil = photons.axis_impulses(*streams, res.coefficients.kz,
                                                            res.scenario.beam.k0)
            recoil[:, 2] += pressure
            write_dump(args.dump, times, recoil)
        if args.plot:
            from .plotting import plot_psd

            targets = {"pressure": next(c.target for c in checks if c.name == "pressure floor")}
            for axis in (1, 2, 3):
                targets[f"recoil_{axis}"] = next(c.target for c in checks
                                                 if c.name == f"recoil floor {axis}")
            for name, est in estimates.items():
                plot_psd(est.frequencies, est.density, targets[name], name,
                         _plot_path(args.out, f"_{name}"))
    if args.which in ("ladder", "all"):
        records += [_check_record("ladder", c)
                    for c in ladder_suite(res, seed=args.seed, relaxations=args.relaxations)]
    ok = all(r["passed"] for r in records)
    if args.format == "json":
        text = dumps_json({"seed": args.seed, "passed": ok, "checks": records})
    elif args.format == "csv":
        header = ["suite", "name", "estimate", "stderr", "target", "ratio", "z", "passed", "note"]
        text = dumps_csv(([r[h] for h in header] for r in records), header)
    else:
        lines = [f"{r['suite']:6} {r['name']:18} {csv_cell(r['estimate']):>20} ± "
                 f"{csv_cell(r['stderr']):<19} target {csv_cell(r['target']):<19} "
                 f"z={r['z']:+.2f} {'pass' if r['passed'] else 'FAIL'}"
                 + (f"  ({r['note']})" if r["note"] else "") for r in records]
        lines.append(f"oracle {'PASSED' if ok else 'FAILED'} (seed {args.seed})")
        text = "\n".join(lines) + "\n"
    _write(text, args.out)
    return 0 if ok else 1


def cmd_regression(args):
    from .regression import format_table, normalize_case, rows_as_records, run_regression

    try:
        normalize_case(args.case)
    except KeyError:
        raise ValidationError(f"unknown case {args.case!r}; use 70nm, 180nm or all") from None
    rows, disc, ok = run_regression(args.case)
    if args.format == "json":
        text = dumps_json({"tier1_passed": ok, "rows": rows_as_records(rows),
                           "discrepancies": [dataclasses.asdict(d) for d in disc]})
    elif args.format == "csv":
        records = rows_as_records(rows)
        header = list(records[0])
        text = dumps_csv(([r[h] for h in header] for r in records), header)
    else:
        text = format_table(rows, disc) + f"tier 1 {'PASSED' if ok else 'FAILED'}\n"
    _write(text, args.out)
    return 0 if ok else 1


# --------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="levitrap",
                                     description="Levitated-particle trap noise calculator")
    parser.add_argument("--version", action="version", version=f"levitrap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("json", "csv"), default="json"):
        p.add_argument("--format", choices=formats, default=default)
        p.add_argument("--out", help="write to this file instead of stdout")
        p.add_argument("--plot", action="store_true",
                       help="also render PNG figures next to --out")

    p = sub.add_parser("report", help="evaluate one scenario")
    p.add_argument("config", help="scenario JSON file or fixture:<name>")
    common(p)
    p.add_argument("--strict", action="store_true",
                   help="fail (exit 3) when a feedback operating condition is violated")
    p.add_argument("--timestamp", action="store_true", help="add a UTC timestamp to the report")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("sweep", help="evaluate a one- or two-parameter grid")
    p.add_argument("config")
    p.add_argument("--param", action="append",
                   help=f"name[unit]=start:stop:steps[:log]; names: {', '.join(SWEEPABLE)}")
    common(p, ("csv", "json"), "csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="Monte-Carlo checks of the analytic noise model")
    p.add_argument("config")
    p.add_argument("--which", choices=("psd", "ladder", "all"), default="all")
    p.add_argument("--seed", type=int, default=0)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--duration", type=float, help="simulated time for the photon streams (s)")
    g.add_argument("--events", type=float, default=2e6,
                   help="expected scattering events when --duration is not given")
    p.add_argument("--relaxations", type=float, default=2000.0,
                   help="ladder trajectory length in relaxation times")
    p.add_argument("--dump", help="write the merged photon impulse train to this binary file")
    common(p, ("text", "json", "csv"), "text")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("regression", help="compare against the published worked examples")
    p.add_argument("--case", default="all", help="70nm, 180nm or all")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_regression)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LevitrapError as exc:
        print(json.dumps(exc.to_dict(), ensure_ascii=False, default=str), file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(err, ensure_ascii=False), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
