"""Command-line entry point: ``conehull {estimate,table1,rates,oracle-check,render}``.

Exit codes: 0 success, 1 usage or input error, 2 eraser stopped early,
3 oracle check failed.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import eraser, experiments, oracle
from .geometry import Frame, Point
from .shapes import PointParseError, load_points, sample_uniform, shape_by_name, table_one_set, write_points
from .svg import render_svg

EXIT_USAGE = 1
EXIT_EARLY_STOP = 2
EXIT_ORACLE_FAILED = 3

_ANGLE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$")


def parse_angle(text: str) -> float:
    """Radians, either a float or a multiple of pi such as ``pi/4`` or ``3pi/8``."""
    m = _ANGLE.match(text)
    if m:
        coef = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        if den == 0:
            raise argparse.ArgumentTypeError(f"division by zero in {text!r}")
        return coef * math.pi / den
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle in radians: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"angle must be finite: {text!r}")
    return v


def opening(text: str) -> float:
    v = parse_angle(text)
    if not 0.0 < v <= math.pi:
        raise argparse.ArgumentTypeError(f"rho={v} outside (0, pi]")
    return v


def positive(text: str) -> float:
    v = parse_angle(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1: {text!r}")
    return v


def int_list(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from None
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError(f"expected positive integers: {text!r}")
    return vals


def frame_arg(text: str) -> Frame:
    try:
        xmin, xmax, ymin, ymax = (float(t) for t in text.split(","))
        return Frame(xmin, xmax, ymin, ymax)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"frame must be xmin,xmax,ymin,ymax: {e}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(0), help="master seed (default 0)")
    p.add_argument("--threads", type=positive_int, default=d(1), help="worker threads for replications")
    p.add_argument("--out", default=d(None), help="output path prefix")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="conehull", description="Cone-convex hull estimation by stochastic erasure.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("estimate", help="estimate one hull, write region JSON and SVG")
    _global_flags(p, suppress=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", type=Path, help="point CSV with header x,y")
    src.add_argument("--shape", help="built-in shape: triangle-notch, eight-star, S1, brownian")
    p.add_argument("--n", type=positive_int, help="sample size with --shape")
    est = p.add_mutually_exclusive_group(required=True)
    est.add_argument("--rho", type=opening, help="cone opening in radians, e.g. pi/4")
    est.add_argument("--r", type=positive, help="ball radius (ball eraser)")
    p.add_argument("--h", type=positive, help="cone height")
    p.add_argument("--N", type=positive_int, default=200, help="number of erasures")
    p.add_argument("--mode", choices=[m.value for m in eraser.EraseMode], default="extended")
    p.add_argument("--axis-min", type=parse_angle)
    p.add_argument("--axis-max", type=parse_angle)
    p.add_argument("--max-attempts", type=positive_int, default=100_000)
    p.add_argument("--frame", type=frame_arg, help="vertex frame xmin,xmax,ymin,ymax")
    p.add_argument("--rescale", action="store_true", help="map input points onto the unit square")

    p = sub.add_parser("table1", help="replicated error grid on the Table 1 set")
    _global_flags(p, suppress=True)
    p.add_argument("--runs", type=positive_int, default=100)
    p.add_argument("--n-list", type=int_list, default=[200, 400, 600, 800, 1000, 1200])
    p.add_argument("--mc", type=positive_int, default=4000, help="Monte Carlo points per error")
    p.add_argument("--N", type=positive_int, default=200)
    p.add_argument("--mode", choices=[m.value for m in eraser.EraseMode], default="extended")
    p.add_argument("--frame", type=frame_arg, default=Frame.unit())
    p.add_argument("--no-timing", action="store_true", help="write zero runtimes for byte-stable reports")

    p = sub.add_parser("rates", help="error against sample size with a log-log fit")
    _global_flags(p, suppress=True)
    p.add_argument("--metric", choices=experiments.METRICS, default="measure")
    p.add_argument("--shape", default="S1")
    p.add_argument("--rho", type=opening, default=math.pi / 5)
    p.add_argument("--h", type=positive, default=0.5)
    p.add_argument("--n-list", type=int_list, default=[200, 400, 800, 1600, 3200])
    p.add_argument("--runs", type=positive_int, default=50)
    p.add_argument("--N-policy", choices=("fixed", "proportional"), default="proportional")
    p.add_argument("--N", type=positive_int, default=200, help="erasures under the fixed policy")
    p.add_argument("--N-factor", type=positive, default=2.0, help="N = ceil(factor * n) when proportional")
    p.add_argument("--mc", type=positive_int, default=4000)
    p.add_argument("--grid", type=positive_int, default=512, help="grid resolution for set distances")
    p.add_argument("--mode", choices=[m.value for m in eraser.EraseMode], default="extended")
    p.add_argument("--frame", type=frame_arg)
    p.add_argument("--no-timing", action="store_true")

    p = sub.add_parser("oracle-check", help="certificate coverage and unavoidability checks")
    _global_flags(p, suppress=True)
    p.add_argument("--rho", type=opening, default=math.pi / 5)
    p.add_argument("--h", type=positive, default=0.5)
    p.add_argument("--trials", type=positive_int, default=10_000)
    p.add_argument("--points", type=positive_int, help="erased test points (default min(1000, trials))")
    p.add_argument("--n", type=positive_int, default=200)
    p.add_argument("--N", type=positive_int, default=200)
    p.add_argument("--axis-count", type=positive_int, default=720)
    p.add_argument("--step-div", type=positive, default=50.0, help="vertex grid step = h / step-div")

    p = sub.add_parser("render", help="render a saved region and sample to SVG")
    _global_flags(p, suppress=True)
    p.add_argument("--region", type=Path, required=True)
    p.add_argument("--points", type=Path, required=True)
    return parser


def _fail(msg: str, code: int = EXIT_USAGE) -> int:
    print(f"conehull: error: {msg}", file=sys.stderr)
    return code


def cmd_estimate(args) -> int:
    if args.rho is not None and args.h is None:
        return _fail("--h is required with --rho")
    if (args.axis_min is None) != (args.axis_max is None):
        return _fail("--axis-min and --axis-max go together")
    if args.r is not None and args.axis_min is not None:
        return _fail("axis constraints apply to the cone eraser only")
    if args.input is not None:
        sample = load_points(args.input, rescale=args.rescale)
        lo, hi = sample.min(axis=0), sample.max(axis=0)
        frame = args.frame or (Frame.unit() if args.rescale else Frame(lo[0], hi[0], lo[1], hi[1]))
    else:
        if args.n is None:
            return _fail("--n is required with --shape")
        rng = np.random.default_rng(args.seed)
        shape = shape_by_name(args.shape, rng=rng)
        sample = sample_uniform(shape, args.n, rng)
        frame = args.frame or shape.bounding_box
    erase_rng = np.random.default_rng(np.random.SeedSequence((args.seed, 1)))
    if args.r is not None:
        region = eraser.run_ball_eraser(
            sample, frame, args.r, args.N, max_attempts=args.max_attempts, seed=args.seed, rng=erase_rng
        )
    else:
        cfg = eraser.EraserConfig(
            rho=args.rho, h=args.h, target_erasures=args.N, max_attempts_per_erasure=args.max_attempts,
            erase_mode=args.mode, seed=args.seed,
            axis_constraint=None if args.axis_min is None else (args.axis_min, args.axis_max),
        )
        region = eraser.run(sample, frame, cfg, rng=erase_rng)
    prefix = args.out or "estimate"
    Path(prefix).parent.mkdir(parents=True, exist_ok=True)
    Path(f"{prefix}.region.json").write_text(region.to_json() + "\n", encoding="utf-8")
    write_points(f"{prefix}.points.csv", sample)
    render_svg(region, sample, f"{prefix}.svg")
    print(f"{region.erasures} erasures in {region.attempts} attempts -> {prefix}.region.json, {prefix}.svg")
    if region.early_stopped:
        return _fail(f"stopped early after {region.erasures} of {args.N} erasures", EXIT_EARLY_STOP)
    return 0


def _print_cell(res: experiments.CellResult) -> None:
    s = res.spec
    par = f"rho={s.rho:.4f} h={s.h:.4f}" if s.estimator == "cone" else f"r={s.r:.4f}"
    print(
        f"{s.shape:>8} {s.estimator:>4} n={s.n:<5} {par:<22} N={s.N:<6} "
        f"mean={res.mean_error:.4f} sd={res.sd_error:.4f} early={res.early_stops} fail={res.failures}",
        flush=True,
    )


def cmd_table1(args) -> int:
    specs = experiments.table_one_specs(args.n_list, args.runs, args.N, args.mode)
    report = experiments.run_cells(
        specs, args.seed, "measure", args.mc, frame=args.frame, threads=args.threads, progress=_print_cell
    )
    paths = experiments.write_report(args.out or "table1", report, timing=not args.no_timing)
    print("wrote " + ", ".join(map(str, paths)))
    return 0


def cmd_rates(args) -> int:
    if len(args.n_list) < 3:
        return _fail("--n-list needs at least three sizes")
    if max(args.n_list) < 10 * min(args.n_list):
        return _fail("--n-list must span at least one decade")
    fixed = args.N_policy == "fixed"
    specs = experiments.rate_specs(
        args.shape, args.rho, args.h, args.n_list, args.runs,
        N=args.N if fixed else None, N_factor=None if fixed else args.N_factor, mode=args.mode,
    )
    report = experiments.run_cells(
        specs, args.seed, args.metric, args.mc, frame=args.frame, grid_resolution=args.grid,
        threads=args.threads, progress=_print_cell,
    )
    means = [c.mean_error for c in report.cells]
    fit = None
    if args.metric != "boundary":
        fit = experiments.fit_rate(args.n_list, means, experiments.regressor_for(args.metric))
        print(f"slope={fit.slope:.4f} intercept={fit.intercept:.4f} r2={fit.r2:.4f} ({fit.regressor})")
    else:
        k = experiments.boundary_constant(args.rho, args.h)
        for c in report.cells:
            print(f"n={c.spec.n} median ratio={float(np.median(c.errors)):.4f} (k={k:.4f})")
    paths = experiments.write_report(args.out or "rates", report, timing=not args.no_timing, fit=fit)
    print("wrote " + ", ".join(map(str, paths)))
    return 0


def cmd_oracle_check(args) -> int:
    n_points = args.points or min(1000, args.trials)
    ss_sample, ss_erase, ss_query, ss_cones = np.random.SeedSequence((args.seed, 7)).spawn(4)
    s1 = table_one_set()
    sample = sample_uniform(s1, args.n, np.random.default_rng(ss_sample))
    cfg = eraser.EraserConfig(rho=args.rho, h=args.h, target_erasures=args.N, seed=args.seed)
    region = eraser.run(sample, Frame.unit(), cfg, rng=np.random.default_rng(ss_erase))
    queries = oracle.erased_points(region, n_points, np.random.default_rng(ss_query))
    coverage, misses = oracle.certificate_coverage(
        sample, queries, args.rho, args.h, args.h / args.step_div, args.axis_count
    )
    ok_cov = coverage == 1.0
    print(f"certificate coverage {coverage:.4f} over {n_points} erased points: {'PASS' if ok_cov else 'FAIL'}")
    try:
        fam = oracle.build_unavoidable_family(Point(0.5, 0.5), args.rho, args.h)
        frac = oracle.check_unavoidability(fam, args.rho, args.h, args.trials, np.random.default_rng(ss_cones))
        ok_una = frac == 1.0
        print(f"unavoidability fraction {frac:.4f} over {args.trials} cones (k={fam.cardinality}): "
              f"{'PASS' if ok_una else 'FAIL'}")
    except ValueError as e:
        ok_una = False
        print(f"unavoidability: FAIL ({e})")
    summary = {"coverage": coverage, "uncovered": len(misses), "unavoidability_pass": ok_una}
    if args.out:
        Path(f"{args.out}.oracle.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return 0 if ok_cov and ok_una else EXIT_ORACLE_FAILED


def cmd_render(args) -> int:
    region = eraser.ErasedRegion.from_json(args.region.read_text(encoding="utf-8"))
    sample = load_points(args.points)
    out = args.out or "render.svg"
    render_svg(region, sample, out)
    print(f"wrote {out}")
    return 0


COMMANDS = {
    "estimate": cmd_estimate,
    "table1": cmd_table1,
    "rates": cmd_rates,
    "oracle-check": cmd_oracle_check,
    "render": cmd_render,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (PointParseError, FileNotFoundError, ValueError) as e:
        return _fail(str(e))


if __name__ == "__main__":
    sys.exit(main())
