"""Command line front end: prove, bench, render.

Exit codes: 0 infeasibility proven, 2 feasible at the chosen resolution,
3 timeout (bench mode), 1 validation/IO errors or a colliding start/goal.
"""

from __future__ import annotations

import argparse
import csv
import json
import statistics
import sys

import numpy as np

from . import engine, oracle
from .bitmap import CSpaceBitmap, config_to_cell, multi_to_lin
from .errors import EngineTimeout, NoplanError, UnsupportedDimension, ValidationError
from .sampler import SamplerParams
from .scenario_io import chain_grid, load_scenario, se2_grid
from .segmentation import segment

EXIT_INFEASIBLE = 0
EXIT_ERROR = 1
EXIT_FEASIBLE = 2
EXIT_TIMEOUT = 3


def _add_common_flags(p: argparse.ArgumentParser):
    p.add_argument("scenario", help="scenario file (YAML)")
    p.add_argument("--ns", type=int, default=100, metavar="N",
                   help="collision hits per sampling iteration (default 100)")
    p.add_argument("--d", type=int, default=5, metavar="K",
                   help="random neighbors checked per hit (default 5)")
    p.add_argument("--resolution", type=str, default=None, metavar="N1,N2,...",
                   help="override grid resolution; one value broadcasts to all axes")
    p.add_argument("--connectivity", choices=("faces", "moore"), default="faces",
                   help="free-space adjacency used by segmentation (default faces)")
    p.add_argument("--seed", type=int, default=None, help="random seed")
    p.add_argument("--threads", type=int, default=1,
                   help="worker processes for collision checking (default 1)")
    p.add_argument("--segment-every", type=int, default=1, metavar="K",
                   help="segment after every K-th iteration (default 1)")
    p.add_argument("--truncate-links", type=int, default=None, metavar="K",
                   help="restrict a chain scenario to its first K links")
    p.add_argument("--export-bitmap", type=str, default=None, metavar="PATH",
                   help="write the final bitmap (binary dump, or PGM for 2D .pgm paths)")


def _load(args):
    scenario = load_scenario(args.scenario)
    if args.truncate_links is not None:
        scenario = scenario.truncate(args.truncate_links)
    if args.resolution:
        try:
            dims = [int(v) for v in args.resolution.replace(",", " ").split()]
        except ValueError:
            raise ValidationError(
                "--resolution expects integers, e.g. '36' or '24,18': "
                f"got {args.resolution!r}"
            )
        if len(dims) == 1:
            dims = dims * scenario.grid.ndim
        if scenario.robot.kind == "serial_chain":
            grid = chain_grid(scenario.robot, dims)
        else:
            g = scenario.grid
            grid = se2_grid(((g.lo[0], g.hi[0]), (g.lo[1], g.hi[1])), dims)
        scenario = type(scenario)(
            robot=scenario.robot,
            obstacles=scenario.obstacles,
            start=scenario.start,
            goal=scenario.goal,
            grid=grid,
            obstacle_ids=scenario.obstacle_ids,
            name=scenario.name,
            truncate_to_links=scenario.truncate_to_links,
        )
    return scenario


def _export(bitmap: CSpaceBitmap, path: str):
    if path.endswith(".pgm"):
        bitmap.to_pgm(path)
    else:
        bitmap.dump(path)


def _exit_code(kind: str) -> int:
    if kind == engine.INFEASIBLE:
        return EXIT_INFEASIBLE
    if kind == engine.FEASIBLE_AT_RESOLUTION:
        return EXIT_FEASIBLE
    return EXIT_ERROR


def cmd_prove(args) -> int:
    scenario = _load(args)
    verdict = engine.prove_infeasibility(
        scenario,
        params=SamplerParams(args.ns, args.d),
        seed=args.seed,
        connectivity=args.connectivity,
        segment_every=args.segment_every,
        threads=args.threads,
    )
    print(verdict.to_json(indent=2))
    if args.export_bitmap and verdict.bitmap is not None:
        _export(verdict.bitmap, args.export_bitmap)
    return _exit_code(verdict.kind)


def cmd_bench(args) -> int:
    scenario = _load(args)
    writer = csv.writer(sys.stdout)
    writer.writerow(["trial", "seed", "verdict", "iterations",
                     "segmentation_time", "total_time"])
    base_seed = args.seed if args.seed is not None else 0
    kinds = set()
    iterations, seg_times, totals = [], [], []
    timed_out = 0
    for trial in range(args.trials):
        seed = base_seed + trial
        try:
            verdict = engine.prove_infeasibility(
                scenario,
                params=SamplerParams(args.ns, args.d),
                seed=seed,
                connectivity=args.connectivity,
                segment_every=args.segment_every,
                threads=args.threads,
                timeout=args.timeout,
            )
        except EngineTimeout:
            timed_out += 1
            writer.writerow([trial, seed, "Timeout", "", "", ""])
            continue
        kinds.add(verdict.kind)
        iterations.append(verdict.iterations)
        seg_times.append(verdict.segmentation_time)
        totals.append(verdict.elapsed)
        writer.writerow([
            trial, seed, verdict.kind, verdict.iterations,
            f"{verdict.segmentation_time:.4f}", f"{verdict.elapsed:.4f}",
        ])
    if iterations:
        def mean_std(xs):
            m = statistics.fmean(xs)
            s = statistics.pstdev(xs) if len(xs) > 1 else 0.0
            return f"{m:.2f}±{s:.2f}"

        writer.writerow(["summary", "", "", mean_std(iterations),
                         mean_std(seg_times), mean_std(totals)])
    if timed_out:
        return EXIT_TIMEOUT
    if kinds == {engine.INFEASIBLE}:
        return EXIT_INFEASIBLE
    if engine.FEASIBLE_AT_RESOLUTION in kinds:
        return EXIT_FEASIBLE
    return EXIT_ERROR


def cmd_render(args) -> int:
    if args.scenario.endswith((".bin", ".dump", ".cbm")):
        bitmap = CSpaceBitmap.load(args.scenario)
        start_lin = goal_lin = None
    else:
        scenario = load_scenario(args.scenario)
        if scenario.grid.ndim != 2:
            raise UnsupportedDimension(
                f"rendering needs a 2D grid, scenario has {scenario.grid.ndim} axes"
            )
        bitmap = oracle.brute_force_bitmap(scenario)
        start_lin = multi_to_lin(scenario.grid, config_to_cell(scenario.grid, scenario.start))
        goal_lin = multi_to_lin(scenario.grid, config_to_cell(scenario.grid, scenario.goal))
    if bitmap.spec.ndim != 2:
        raise UnsupportedDimension("rendering needs a 2D bitmap")
    labels = segment(bitmap, args.connectivity)
    out = args.out
    bitmap.to_pgm(f"{out}.bitmap.pgm")
    labels.to_pgm(f"{out}.labels.pgm")
    if start_lin is not None:
        _mark_endpoints(f"{out}.labels.pgm", bitmap, start_lin, goal_lin)
    print(json.dumps({
        "bitmap": f"{out}.bitmap.pgm",
        "labels": f"{out}.labels.pgm",
        "components": labels.component_count,
        "free_cells": bitmap.free_count(),
    }))
    return 0


def _mark_endpoints(path: str, bitmap: CSpaceBitmap, start_lin: int, goal_lin: int):
    """Repaint the start cell white and the goal cell dark gray in a PGM."""
    with open(path, "rb") as f:
        magic = f.readline()
        dims_line = f.readline()
        maxval = f.readline()
        pixels = np.frombuffer(f.read(), dtype=np.uint8).copy()
    w, h = (int(v) for v in dims_line.split())
    img = pixels.reshape(h, w)
    for lin, value in ((start_lin, 255), (goal_lin, 32)):
        mx = lin % bitmap.spec.dims[0]
        my = lin // bitmap.spec.dims[0]
        img[h - 1 - my, mx] = value
    with open(path, "wb") as f:
        f.write(magic + dims_line + maxval)
        f.write(img.tobytes())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noplan",
        description="Prove motion-planning infeasibility on a discretized configuration space.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_prove = sub.add_parser("prove", help="run the prover on one scenario")
    _add_common_flags(p_prove)
    p_prove.set_defaults(func=cmd_prove)

    p_bench = sub.add_parser("bench", help="repeated seeded trials, CSV output")
    _add_common_flags(p_bench)
    p_bench.add_argument("--trials", type=int, default=30)
    p_bench.add_argument("--timeout", type=float, default=None, metavar="SECONDS",
                         help="per-trial wall-clock limit")
    p_bench.set_defaults(func=cmd_bench)

    p_render = sub.add_parser("render", help="export PGM images for a 2D scenario or dump")
    p_render.add_argument("scenario", help="scenario file or bitmap dump")
    p_render.add_argument("--out", default="render", help="output path prefix")
    p_render.add_argument("--connectivity", choices=("faces", "moore"), default="faces")
    p_render.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NoplanError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
        return EXIT_ERROR
    except OSError as exc:
        print(json.dumps({"error": "OSError", "message": str(exc)}))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
