"""The outer proof loop: sample obstacle cells, segment, test disconnection.

The loop alternates sampling iterations with free-space segmentation until
either start and goal fall into different components (infeasibility proven
at this resolution) or every cell has been visited, at which point the
bitmap is exact and the verdict is final either way.
"""

from __future__ import annotations

import json
import multiprocessing
import time
from dataclasses import dataclass, field

import numpy as np

from .bitmap import CSpaceBitmap, cell_to_config, config_to_cell, multi_to_lin
from .errors import EngineTimeout, Exhausted, ValidationError
from .sampler import (
    SamplerParams,
    SampleSet,
    _init_worker,
    sample_obstacle_cells,
    sample_obstacle_cells_parallel,
)
from .segmentation import LabelField, segment, segment_check

INFEASIBLE = "Infeasible"
FEASIBLE_AT_RESOLUTION = "FeasibleAtResolution"
START_OR_GOAL_IN_OBSTACLE = "StartOrGoalInObstacle"


@dataclass
class Verdict:
    """Outcome of a proof run plus enough evidence to re-verify it."""

    kind: str
    iterations: int
    stats: list = field(default_factory=list)
    labels: LabelField = None
    digest: str = None
    component_count: int = None
    bitmap: CSpaceBitmap = None
    elapsed: float = 0.0
    segmentation_time: float = 0.0
    detail: str = ""

    def to_dict(self) -> dict:
        spec = self.bitmap.spec if self.bitmap is not None else None
        return {
            "kind": self.kind,
            "iterations": self.iterations,
            "elapsed_seconds": round(self.elapsed, 6),
            "segmentation_seconds": round(self.segmentation_time, 6),
            "component_count": self.component_count,
            "bitmap_sha256": self.digest,
            "detail": self.detail,
            "grid": None
            if spec is None
            else {
                "dims": list(spec.dims),
                "wrap": list(spec.wrap),
                "lo": list(spec.lo),
                "hi": list(spec.hi),
            },
            "per_iteration": [
                {
                    "iteration": s.iteration,
                    "hits": s.hits,
                    "checks": s.checks,
                    "propagated": s.propagated,
                    "elapsed_seconds": round(s.elapsed, 6),
                }
                for s in self.stats
            ],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def prove_infeasibility(
    scenario,
    params: SamplerParams = None,
    seed=None,
    connectivity: str = "faces",
    segment_every: int = 1,
    threads: int = 1,
    timeout: float = None,
) -> Verdict:
    """Run the proof loop on a scenario and return a Verdict.

    ``segment_every`` trades segmentation work for later detection;
    segmentation always runs on exhaustion. ``timeout`` (seconds, checked
    at iteration boundaries) raises EngineTimeout; it exists for benchmark
    harnesses, an untimed run always terminates on its own.
    """
    if params is None:
        params = SamplerParams()
    if segment_every < 1:
        raise ValidationError("segment_every must be at least 1")
    if threads < 1:
        raise ValidationError("threads must be at least 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    t0 = time.perf_counter()

    robot = scenario.robot
    spec = scenario.grid
    obstacles = scenario.prepared()
    start_cell = config_to_cell(spec, scenario.start)
    goal_cell = config_to_cell(spec, scenario.goal)
    start_lin = multi_to_lin(spec, start_cell)
    goal_lin = multi_to_lin(spec, goal_cell)

    for label, q, cell in (
        ("start", scenario.start, start_cell),
        ("goal", scenario.goal, goal_cell),
    ):
        for probe in (tuple(q), cell_to_config(spec, cell)):
            if robot.collision_check(probe, obstacles).colliding:
                return Verdict(
                    kind=START_OR_GOAL_IN_OBSTACLE,
                    iterations=0,
                    elapsed=time.perf_counter() - t0,
                    detail=f"{label} configuration or its cell center collides",
                )

    bm = CSpaceBitmap(spec)
    ss = SampleSet(spec.size)
    stats_list = []
    seg_time = 0.0
    pool = None
    try:
        if threads > 1:
            pool = multiprocessing.Pool(
                threads, initializer=_init_worker, initargs=(robot, obstacles, spec)
            )
        iteration = 0
        exhausted = False
        while True:
            iteration += 1
            it_t0 = time.perf_counter()
            try:
                if pool is not None:
                    st = sample_obstacle_cells_parallel(
                        bm, ss, robot, pool, threads, params, rng, iteration
                    )
                else:
                    st = sample_obstacle_cells(
                        bm, ss, robot, obstacles, params, rng, iteration
                    )
            except Exhausted as exc:
                st = exc.stats
                exhausted = True
            if st is not None:
                st.elapsed = time.perf_counter() - it_t0
                stats_list.append(st)

            if not bm.is_free(start_lin) or not bm.is_free(goal_lin):
                which = "start" if not bm.is_free(start_lin) else "goal"
                return Verdict(
                    kind=START_OR_GOAL_IN_OBSTACLE,
                    iterations=iteration,
                    stats=stats_list,
                    bitmap=bm,
                    digest=bm.digest(),
                    elapsed=time.perf_counter() - t0,
                    segmentation_time=seg_time,
                    detail=f"{which} cell was proven to collide during sampling",
                )

            if exhausted or iteration % segment_every == 0:
                seg_t0 = time.perf_counter()
                labels = segment(bm, connectivity)
                seg_time += time.perf_counter() - seg_t0
                if segment_check(labels, start_lin, goal_lin):
                    return Verdict(
                        kind=INFEASIBLE,
                        iterations=iteration,
                        stats=stats_list,
                        labels=labels,
                        digest=bm.digest(),
                        component_count=labels.component_count,
                        bitmap=bm,
                        elapsed=time.perf_counter() - t0,
                        segmentation_time=seg_time,
                        detail="start and goal lie in different free components",
                    )
                if exhausted:
                    return Verdict(
                        kind=FEASIBLE_AT_RESOLUTION,
                        iterations=iteration,
                        stats=stats_list,
                        labels=labels,
                        digest=bm.digest(),
                        component_count=labels.component_count,
                        bitmap=bm,
                        elapsed=time.perf_counter() - t0,
                        segmentation_time=seg_time,
                        detail="grid exhausted; start and goal share a free component",
                    )

            if timeout is not None and time.perf_counter() - t0 > timeout:
                raise EngineTimeout(
                    f"no verdict after {iteration} iterations within {timeout} s"
                )
    finally:
        if pool is not None:
            pool.terminate()
            pool.join()
