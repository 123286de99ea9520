"""Without-replacement sampling of obstacle cells with hit amplification.

Each iteration draws cells uniformly from the not-yet-visited pool until a
quota of collision hits is reached. Every hit is amplified two ways: the
collision cause lets whole axis-aligned slices of the grid be marked without
further checks, and a few random grid neighbors of the hit are checked
directly, since obstacle cells cluster.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bitmap import CSpaceBitmap, GridSpec, cell_to_config, lin_to_multi, multi_to_lin, neighbors
from .errors import Exhausted, ValidationError
from .kinematics import BaseInObstacle, ObstacleHit, SelfHit


class SampleSet:
    """Uniform draws without replacement over linear cell indices.

    A dense pool plus a reverse slot map give O(1) draw and removal by
    swap-remove; bulk removal compacts the pool in one vectorized pass.
    """

    def __init__(self, size: int):
        if size <= 0:
            raise ValidationError("sample set needs a positive size")
        dtype = np.int32 if size < 2**31 else np.int64
        self.pool = np.arange(size, dtype=dtype)
        self.pos = np.arange(size, dtype=dtype)
        self.size = size

    def __len__(self) -> int:
        return self.size

    def __contains__(self, linear: int) -> bool:
        return self.pos[linear] >= 0

    def draw(self, rng: np.random.Generator) -> int:
        """Remove and return a uniformly drawn index."""
        if self.size == 0:
            raise Exhausted("every cell has been visited")
        slot = int(rng.integers(self.size))
        idx = int(self.pool[slot])
        last = self.pool[self.size - 1]
        self.pool[slot] = last
        self.pos[last] = slot
        self.pos[idx] = -1
        self.size -= 1
        return idx

    def remove(self, linear: int) -> bool:
        """Remove one index if present; True when it was removed."""
        slot = int(self.pos[linear])
        if slot < 0:
            return False
        last = self.pool[self.size - 1]
        self.pool[slot] = last
        self.pos[last] = slot
        self.pos[linear] = -1
        self.size -= 1
        return True

    def remove_bulk(self, linear) -> np.ndarray:
        """Remove many indices at once; returns the ones actually removed."""
        idx = np.unique(np.asarray(linear, dtype=self.pool.dtype))
        slots = self.pos[idx]
        live = slots >= 0
        idx = idx[live]
        slots = slots[live]
        k = int(idx.size)
        if k == 0:
            return idx
        new_size = self.size - k
        self.pos[idx] = -1
        tail = self.pool[new_size:self.size]
        survivors = tail[self.pos[tail] >= 0]
        holes = slots[slots < new_size]
        self.pool[holes] = survivors
        self.pos[survivors] = holes
        self.size = new_size
        return idx


@dataclass(frozen=True)
class SamplerParams:
    """Quota of direct hits per iteration and neighbors explored per hit."""

    min_hits: int = 100
    neighbor_checks: int = 5

    def __post_init__(self):
        if self.min_hits < 1:
            raise ValidationError("min_hits must be at least 1")
        if self.neighbor_checks < 0:
            raise ValidationError("neighbor_checks must be non-negative")


@dataclass
class IterationStats:
    iteration: int
    hits: int
    checks: int
    propagated: int
    elapsed: float = 0.0


def _slice_indices(spec: GridSpec, multi, fix_lo: int, fix_hi: int) -> np.ndarray:
    """Linear indices of all cells agreeing with ``multi`` on axes
    fix_lo..fix_hi (0-based, inclusive).

    First-axis-fastest linearization makes the free prefix axes one
    contiguous range and the free suffix axes one arithmetic progression,
    so the set is an outer sum of two ranges.
    """
    strides = spec.strides()
    n = spec.ndim
    fixed = 0
    for axis in range(fix_lo, fix_hi + 1):
        fixed += multi[axis] * strides[axis]
    prefix_count = strides[fix_lo]
    if fix_hi + 1 < n:
        suffix_stride = strides[fix_hi + 1]
        suffix_count = spec.size // suffix_stride
    else:
        suffix_stride = 1
        suffix_count = 1
    out = fixed + suffix_stride * np.arange(suffix_count, dtype=np.int64)
    if prefix_count > 1:
        out = (np.arange(prefix_count, dtype=np.int64)[:, None] + out[None, :]).ravel()
    return out


def cells_implied_by(robot, spec: GridSpec, multi, cause) -> np.ndarray:
    """Linear indices of every cell the collision cause proves colliding.

    Always includes the sampled cell itself. A plain body/obstacle contact
    of a rigid body pins all three coordinates, so it implies nothing
    beyond the sampled cell.
    """
    if isinstance(cause, ObstacleHit):
        if robot.kind == "rigid_se2":
            return np.asarray([multi_to_lin(spec, multi)], dtype=np.int64)
        return _slice_indices(spec, multi, 0, cause.link - 1)
    if isinstance(cause, SelfHit):
        return _slice_indices(spec, multi, cause.link_a - 1, cause.link_b - 1)
    if isinstance(cause, BaseInObstacle):
        return _slice_indices(spec, multi, 0, 1)
    raise ValidationError(f"unknown collision cause: {cause!r}")


def propagate(
    bm: CSpaceBitmap, ss: SampleSet, robot, multi, cause
) -> int:
    """Mark every cell implied by a collision cause; returns how many were
    newly marked (cells already visited or already marked do not count)."""
    implied = cells_implied_by(robot, bm.spec, multi, cause)
    removed = ss.remove_bulk(implied)
    if removed.size:
        bm.set_obstacle_bulk(removed)
    return int(removed.size)


_WORKER_STATE: dict = {}


def _init_worker(robot, obstacles, spec):
    _WORKER_STATE["robot"] = robot
    _WORKER_STATE["obstacles"] = obstacles
    _WORKER_STATE["spec"] = spec


def _check_chunk(lins):
    """Collision causes for a chunk of linear indices (None = free)."""
    robot = _WORKER_STATE["robot"]
    obstacles = _WORKER_STATE["obstacles"]
    spec = _WORKER_STATE["spec"]
    out = []
    for lin in lins:
        q = cell_to_config(spec, lin_to_multi(spec, int(lin)))
        out.append(robot.collision_check(q, obstacles).cause)
    return out


def sample_obstacle_cells_parallel(
    bm: CSpaceBitmap,
    ss: SampleSet,
    robot,
    pool,
    workers: int,
    params: SamplerParams,
    rng: np.random.Generator,
    iteration: int = 0,
) -> IterationStats:
    """Parallel variant of one sampling iteration.

    The master draws batches from the pool and merges results; workers only
    collision-check. Marking is idempotent, so two workers finding the same
    obstacle region is wasted work, never an error. Verdict-level behavior
    matches the serial sampler; the exact cell-by-cell trace does not.
    """
    spec = bm.spec
    stats = IterationStats(iteration=iteration, hits=0, checks=0, propagated=0)

    def run_checks(lins):
        chunks = [c for c in np.array_split(np.asarray(lins, dtype=np.int64), workers) if c.size]
        causes = []
        for part in pool.map(_check_chunk, chunks):
            causes.extend(part)
        stats.checks += len(lins)
        return causes

    while stats.hits < params.min_hits:
        if ss.size == 0:
            exc = Exhausted("every cell has been visited")
            exc.stats = stats
            raise exc
        batch_size = min(ss.size, max(128, 32 * workers))
        batch = [ss.draw(rng) for _ in range(batch_size)]
        neighbor_queue = []
        for idx, cause in zip(batch, run_checks(batch)):
            if cause is None:
                continue
            stats.hits += 1
            bm.set_obstacle(idx)
            multi = lin_to_multi(spec, idx)
            stats.propagated += propagate(bm, ss, robot, multi, cause)
            moore = neighbors(spec, multi)
            take = min(params.neighbor_checks, len(moore))
            if take == 0:
                continue
            for p in rng.choice(len(moore), size=take, replace=False):
                nb_lin = multi_to_lin(spec, moore[int(p)])
                if ss.remove(nb_lin):
                    neighbor_queue.append(nb_lin)
        if neighbor_queue:
            for nb_lin, cause in zip(neighbor_queue, run_checks(neighbor_queue)):
                if cause is None:
                    continue
                bm.set_obstacle(nb_lin)
                stats.propagated += propagate(
                    bm, ss, robot, lin_to_multi(spec, nb_lin), cause
                )
    return stats


def sample_obstacle_cells(
    bm: CSpaceBitmap,
    ss: SampleSet,
    robot,
    obstacles,
    params: SamplerParams,
    rng: np.random.Generator,
    iteration: int = 0,
) -> IterationStats:
    """One sampling iteration: draw until ``min_hits`` collision hits.

    Free draws are discarded (they stay marked free, never re-drawn). Each
    hit is marked, cause-propagated, and followed by up to
    ``neighbor_checks`` random Moore neighbors drawn without replacement;
    neighbors already visited are skipped, not replaced. Neighbor hits are
    amplified the same way but do not count toward the quota.

    Raises Exhausted with the partial stats attached when the pool empties
    before the quota is met.
    """
    spec = bm.spec
    if params.neighbor_checks > 3**spec.ndim - 1:
        raise ValidationError(
            f"neighbor_checks {params.neighbor_checks} exceeds Moore neighborhood "
            f"size {3**spec.ndim - 1}"
        )
    stats = IterationStats(iteration=iteration, hits=0, checks=0, propagated=0)
    while stats.hits < params.min_hits:
        try:
            idx = ss.draw(rng)
        except Exhausted as exc:
            exc.stats = stats
            raise
        multi = lin_to_multi(spec, idx)
        stats.checks += 1
        report = robot.collision_check(cell_to_config(spec, multi), obstacles)
        if not report.colliding:
            continue
        stats.hits += 1
        bm.set_obstacle(idx)
        stats.propagated += propagate(bm, ss, robot, multi, report.cause)
        moore = neighbors(spec, multi)
        take = min(params.neighbor_checks, len(moore))
        if take == 0:
            continue
        picks = rng.choice(len(moore), size=take, replace=False)
        for p in picks:
            nb = moore[int(p)]
            nb_lin = multi_to_lin(spec, nb)
            if not ss.remove(nb_lin):
                continue
            stats.checks += 1
            nb_report = robot.collision_check(cell_to_config(spec, nb), obstacles)
            if not nb_report.colliding:
                continue
            bm.set_obstacle(nb_lin)
            stats.propagated += propagate(bm, ss, robot, nb, nb_report.cause)
    return stats
