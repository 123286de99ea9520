"""Connected-component labeling of the free cells, wrap-aware.

The heavy lifting is scipy's n-dimensional labeler; wraparound axes are
handled afterwards by union-find merges across the two boundary slices of
each wrapping axis. Labels are canonicalized to 1..k in order of first
appearance along the linear (first-axis-fastest) raster so identical
bitmaps always produce identical label fields.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .bitmap import CSpaceBitmap, GridSpec
from .errors import IncompatibleGrids, StartOrGoalInObstacle, ValidationError

CONNECTIVITIES = ("faces", "moore")


@dataclass
class LabelField:
    """Per-cell component ids, linear-indexed; 0 marks obstacle cells."""

    spec: GridSpec
    labels: np.ndarray
    component_count: int

    def label_of(self, linear: int) -> int:
        return int(self.labels[linear])

    def to_dense(self) -> np.ndarray:
        return self.labels.reshape(self.spec.dims, order="F")

    def to_pgm(self, path):
        """Export a 2D label field as PGM, components in distinct grays."""
        if self.spec.ndim != 2:
            raise IncompatibleGrids("PGM export needs a 2D grid")
        dense = self.to_dense()
        k = max(self.component_count, 1)
        shades = np.linspace(80, 255, k).astype(np.uint8)
        img = np.zeros(dense.shape, dtype=np.uint8)
        free = dense > 0
        img[free] = shades[dense[free] - 1]
        w, h = self.spec.dims
        with open(path, "wb") as f:
            f.write(f"P5\n{w} {h}\n255\n".encode())
            f.write(img.T[::-1].tobytes())


class _UnionFind:
    def __init__(self, n: int):
        self.parent = np.arange(n, dtype=np.int64)

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _structure(ndim: int, connectivity: str) -> np.ndarray:
    if connectivity == "faces":
        return ndimage.generate_binary_structure(ndim, 1)
    if connectivity == "moore":
        return ndimage.generate_binary_structure(ndim, ndim)
    raise ValidationError(f"connectivity must be one of {CONNECTIVITIES}")


def _boundary_pairs(dense_labels, spec: GridSpec, axis: int, connectivity: str):
    """Label pairs adjacent across the wrap seam of one axis.

    Pairs the last slice against the first slice, under every transverse
    offset the connectivity allows; transverse offsets respect the other
    axes' own wrap flags.
    """
    last = np.take(dense_labels, -1, axis=axis)
    first = np.take(dense_labels, 0, axis=axis)
    other_axes = [a for a in range(spec.ndim) if a != axis]
    if connectivity == "faces":
        offsets = [tuple(0 for _ in other_axes)]
    else:
        grids = np.meshgrid(*([(-1, 0, 1)] * len(other_axes)), indexing="ij")
        offsets = list(zip(*(g.ravel() for g in grids))) if other_axes else [()]
    pairs = []
    for off in offsets:
        shifted = first
        valid = np.ones(first.shape, dtype=bool)
        for k, delta in enumerate(off):
            if delta == 0:
                continue
            shifted = np.roll(shifted, delta, axis=k)
            if not spec.wrap[other_axes[k]]:
                sl = [slice(None)] * shifted.ndim
                sl[k] = slice(0, 1) if delta == 1 else slice(-1, None)
                valid = valid.copy()
                valid[tuple(sl)] = False
        both = (last > 0) & (shifted > 0) & valid
        if both.any():
            a = last[both]
            b = shifted[both]
            keep = a != b
            if keep.any():
                pairs.append(np.stack([a[keep], b[keep]], axis=1))
    if pairs:
        return np.unique(np.concatenate(pairs, axis=0), axis=0)
    return np.empty((0, 2), dtype=np.int64)


def segment(bm: CSpaceBitmap, connectivity: str = "faces") -> LabelField:
    """Label the free components of a bitmap.

    Connectivity is face adjacency (2n neighbors) by default, or the full
    Moore neighborhood; wrapping axes join their two boundary slices.
    """
    spec = bm.spec
    dense = bm.to_dense()
    raw_labels, raw_count = ndimage.label(dense, structure=_structure(spec.ndim, connectivity))
    if raw_count and any(spec.wrap[a] and spec.dims[a] > 1 for a in range(spec.ndim)):
        uf = _UnionFind(raw_count + 1)
        for axis in range(spec.ndim):
            if not spec.wrap[axis]:
                continue
            for a, b in _boundary_pairs(raw_labels, spec, axis, connectivity):
                uf.union(int(a), int(b))
        roots = np.array([uf.find(i) for i in range(raw_count + 1)], dtype=np.int64)
    else:
        roots = np.arange(raw_count + 1, dtype=np.int64)
    flat = roots[raw_labels.reshape(-1, order="F")]
    canonical = _canonicalize(flat, raw_count)
    count = int(canonical.max(initial=0)) if canonical.size else 0
    return LabelField(spec, canonical, count)


def _canonicalize(flat_roots: np.ndarray, raw_count: int) -> np.ndarray:
    """Renumber roots to 1..k by first occurrence along the flat raster."""
    mapping = np.zeros(raw_count + 1, dtype=np.int64)
    uniq, first_idx = np.unique(flat_roots, return_index=True)
    order = uniq[np.argsort(first_idx)]
    next_id = 1
    for root in order:
        if root == 0:
            continue
        mapping[root] = next_id
        next_id += 1
    return mapping[flat_roots].astype(np.int32)


def segment_check(labels: LabelField, start_linear: int, goal_linear: int) -> bool:
    """True when start and goal lie in different free components."""
    ls = labels.label_of(start_linear)
    lg = labels.label_of(goal_linear)
    if ls == 0 or lg == 0:
        raise StartOrGoalInObstacle(
            "start cell is marked obstacle" if ls == 0 else "goal cell is marked obstacle"
        )
    return ls != lg
