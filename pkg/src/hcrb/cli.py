"""Command-line front end: bounds, simulate, sweep, diversity.

Scenario files are JSON (angles in degrees); all CSV output is in radians
and meters. Exit codes: 0 success, 1 configuration/schema error, 2
singular information matrix or partial sweep results.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import hcrb_known_shape, hcrb_unknown_shape, t_blocks
from .errors import HcrbError, IdentifiabilityError
from .estimators import estimate
from .experiments import (
    ResultTable,
    run_diversity,
    run_mc,
    run_range_sweep,
)
from .fisher import hcrb_exact, point_target_crb
from .multiradar import fuse, peb
from .scenario_io import SCHEMA_VERSION, ScenarioBundle, dumps_normalized, load_file
from .waveform import dump_frame, point_workspace, synthesis_workspace, synthesize_frame


def _add_scenario_arg(parser):
    parser.add_argument("--scenario", required=True, metavar="FILE",
                        help="JSON scenario file")
    parser.add_argument("--print-normalized", action="store_true",
                        help="echo the validated scenario with defaults filled "
                             "and exit")


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hcrb",
        description="Position/orientation estimation bounds for extended "
                    "radar targets with Fourier contours.",
    )
    parser.add_argument(
        "--version", action="version",
        version=f"hcrb {__version__} (scenario schema {SCHEMA_VERSION})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bounds = sub.add_parser("bounds", help="exact/asymptotic bound report")
    _add_scenario_arg(p_bounds)
    shape = p_bounds.add_mutually_exclusive_group()
    shape.add_argument("--known", dest="known", action="store_true",
                       help="treat the contour coefficients as known")
    shape.add_argument("--unknown", dest="known", action="store_false",
                       help="estimate the contour jointly (default)")
    p_bounds.set_defaults(known=False)
    method = p_bounds.add_mutually_exclusive_group()
    method.add_argument("--exact", dest="exact", action="store_true",
                        help="exact quadrature bound (default)")
    method.add_argument("--asymptotic", dest="exact", action="store_false",
                        help="long-range closed forms")
    p_bounds.set_defaults(exact=True)
    p_bounds.add_argument("--out", metavar="CSV", help="write rows to CSV")

    p_sim = sub.add_parser("simulate", help="synthesize frames and run the "
                                            "matched-filter estimator")
    _add_scenario_arg(p_sim)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--trials", type=int, default=10)
    p_sim.add_argument("--point", action="store_true",
                       help="point target instead of the extended contour")
    p_sim.add_argument("--dump-frames", metavar="DIR",
                       help="write raw complex64 frames plus JSON sidecars")
    p_sim.add_argument("--out", metavar="CSV", help="write estimates to CSV")

    p_sweep = sub.add_parser("sweep", help="bounds along the range sweep")
    _add_scenario_arg(p_sweep)
    p_sweep.add_argument("--points", type=int, default=30)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--out", metavar="CSV", required=True)

    p_mc = sub.add_parser("mc", help="Monte Carlo estimator variance vs bounds")
    _add_scenario_arg(p_mc)
    p_mc.add_argument("--trials", type=int, default=500)
    p_mc.add_argument("--seed", type=int, default=0)
    p_mc.add_argument("--ranges", default="6.7,15,35,80",
                      help="comma-separated target ranges in meters")
    p_mc.add_argument("--out", metavar="CSV", required=True)

    p_div = sub.add_parser("diversity", help="PEB vs constellation size")
    _add_scenario_arg(p_div)
    p_div.add_argument("--counts", default="1-6",
                       help="radar counts, e.g. 1-6 or 1,2,4")
    p_div.add_argument("--radius", type=float, default=7.0)
    p_div.add_argument("--total-db", type=float, default=40.0,
                       help="aggregate E/N0 budget in dB, split evenly")
    p_div.add_argument("--seed", type=int, default=0)
    p_div.add_argument("--out", metavar="CSV", required=True)
    return parser


def _parse_counts(text: str):
    text = text.strip()
    if "-" in text and "," not in text:
        lo, hi = text.split("-", 1)
        counts = list(range(int(lo), int(hi) + 1))
    else:
        counts = [int(part) for part in text.split(",") if part.strip()]
    if not counts or min(counts) < 1:
        raise HcrbError(f"invalid radar counts {text!r}")
    return counts


def _maybe_print_normalized(args, bundle: ScenarioBundle) -> bool:
    if getattr(args, "print_normalized", False):
        sys.stdout.write(dumps_normalized(bundle.document))
        return True
    return False


def _write(table: ResultTable, out):
    if out:
        table.to_csv(out)
        print(f"wrote {len(table.rows)} rows to {out}")


def _cmd_bounds(args) -> int:
    bundle = load_file(args.scenario)
    if _maybe_print_normalized(args, bundle):
        return 0
    scenario = bundle.scenario
    table = ResultTable()
    label = "known" if args.known else "unknown"

    if len(bundle.radars) > 1:
        fused = fuse(scenario, bundle.target_xy, bundle.heading,
                     bundle.radars, contour_known=args.known)
        cov = fused.covariance()
        bound = peb(fused)
        print(f"{len(bundle.radars)} radars, contour {label}")
        print(f"  position error bound : {bound:.6g} m")
        print(f"  heading variance     : {cov[2, 2]:.6g} rad^2")
        sweep = f"bounds:{len(bundle.radars)}radars"
        table.add(sweep, f"peb_{label}", "exact", bound, "m")
        table.add(sweep, f"c_heading_{label}", "exact", cov[2, 2], "rad^2")
        _write(table, args.out)
        return 0

    method = "exact" if args.exact else "asymptotic"
    if args.exact:
        report = hcrb_exact(scenario, contour_known=args.known)
    else:
        blocks = t_blocks(scenario)
        report = hcrb_known_shape(blocks) if args.known else \
            hcrb_unknown_shape(blocks)
    point = point_target_crb(scenario)
    pose = scenario.pose
    print(f"target at d = {pose.d:.4g} m, phi = {pose.phi:.6g} rad, "
          f"heading = {pose.heading:.6g} rad; contour {label}, {method}")
    print(f"  range variance   : {report.c_range:.6g} m^2")
    print(f"  bearing variance : {report.c_bearing:.6g} rad^2")
    print(f"  heading variance : {report.c_heading:.6g} rad^2")
    print(f"  point-target     : {point[0, 0]:.6g} m^2, {point[1, 1]:.6g} rad^2")
    sweep = f"bounds:{pose.d:.6g}"
    table.add(sweep, f"c_range_{label}", method, report.c_range, "m^2")
    table.add(sweep, f"c_bearing_{label}", method, report.c_bearing, "rad^2")
    table.add(sweep, f"c_heading_{label}", method, report.c_heading, "rad^2")
    table.add(sweep, "c_range_point", "point_target", point[0, 0], "m^2")
    table.add(sweep, "c_bearing_point", "point_target", point[1, 1], "rad^2")
    _write(table, args.out)
    return 0


def _cmd_simulate(args) -> int:
    bundle = load_file(args.scenario)
    if _maybe_print_normalized(args, bundle):
        return 0
    scenario = bundle.scenario
    if args.point:
        workspace = point_workspace(scenario)
    else:
        workspace = synthesis_workspace(scenario, bundle.segmentation)
    dump_dir = Path(args.dump_frames) if args.dump_frames else None
    if dump_dir:
        dump_dir.mkdir(parents=True, exist_ok=True)

    seeds = np.random.SeedSequence(args.seed).generate_state(
        args.trials, dtype=np.uint64)
    table = ResultTable()
    kind = "point" if args.point else "extended"
    sweep = f"simulate:{scenario.pose.d:.6g}"
    d_hats, phi_hats = [], []
    for trial, trial_seed in enumerate(seeds):
        frame = synthesize_frame(workspace, int(trial_seed))
        if dump_dir:
            dump_frame(frame, dump_dir / f"frame_{trial:04d}.c64")
        result = estimate(frame, scenario.waveform)
        d_hats.append(result.d)
        phi_hats.append(result.phi)
        flag = "" if result.confident else "  (low confidence)"
        print(f"trial {trial:3d}: d = {result.d:.4f} m, "
              f"phi = {result.phi:.6f} rad{flag}")
        table.add(sweep, "d_hat", "monte_carlo", result.d, "m", trial, args.seed)
        table.add(sweep, "phi_hat", "monte_carlo", result.phi, "rad", trial,
                  args.seed)
    pose = scenario.pose
    print(f"{kind} target truth: d = {pose.d:.4f} m, phi = {pose.phi:.6f} rad")
    print(f"mean estimate   : d = {np.mean(d_hats):.4f} m, "
          f"phi = {np.mean(phi_hats):.6f} rad over {args.trials} trials")
    _write(table, args.out)
    return 0


def _cmd_sweep(args) -> int:
    bundle = load_file(args.scenario)
    if _maybe_print_normalized(args, bundle):
        return 0
    table = run_range_sweep(bundle.scenario, n_points=args.points,
                            seed=args.seed, skip_singular=True)
    _write(table, args.out)
    if table.failures:
        for line in table.failures:
            print(f"skipped {line}", file=sys.stderr)
        return 2
    return 0


def _cmd_mc(args) -> int:
    bundle = load_file(args.scenario)
    if _maybe_print_normalized(args, bundle):
        return 0
    ranges = [float(part) for part in args.ranges.split(",") if part.strip()]
    table = run_mc(bundle.scenario, ranges=ranges, trials=args.trials,
                   seed=args.seed, segmentation=bundle.segmentation)
    _write(table, args.out)
    return 0


def _cmd_diversity(args) -> int:
    bundle = load_file(args.scenario)
    if _maybe_print_normalized(args, bundle):
        return 0
    table = run_diversity(bundle.scenario, bundle.target_xy, bundle.heading,
                          counts=_parse_counts(args.counts),
                          radius=args.radius,
                          total_e_over_n0_db=args.total_db, seed=args.seed)
    _write(table, args.out)
    return 0


_COMMANDS = {
    "bounds": _cmd_bounds,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "mc": _cmd_mc,
    "diversity": _cmd_diversity,
}


def entry(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except IdentifiabilityError as err:
        print(f"error: {err}", file=sys.stderr)
        if getattr(err, "labels", None):
            print(f"  null space involves: {', '.join(err.labels)}",
                  file=sys.stderr)
        return 2
    except HcrbError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(entry())
