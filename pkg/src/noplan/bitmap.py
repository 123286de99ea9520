"""Dense n-dimensional configuration-space bitmap with packed bit storage.

Cells hold 1 for free and 0 for obstacle; grids start all-free and bits are
only ever cleared. Linear indices run first-axis-fastest:

    linear = m1 + N1*(m2 + N2*(m3 + ...))

which is Fortran order for shape (N1, ..., Nn). The same convention governs
the binary dump format, so independently written readers agree bit-exactly.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import IncompatibleGrids, OutOfBounds, OutOfRange, ValidationError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class GridSpec:
    """Shape, bounds and wrap metadata of a discretized configuration space."""

    dims: tuple
    wrap: tuple
    lo: tuple
    hi: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        wrap = tuple(bool(w) for w in self.wrap)
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if not (len(dims) == len(wrap) == len(lo) == len(hi)):
            raise ValidationError("grid spec fields must have equal length")
        if len(dims) == 0:
            raise ValidationError("grid spec needs at least one axis")
        for i, d in enumerate(dims):
            if d < 2:
                raise ValidationError(f"axis {i}: need at least 2 cells, got {d}")
            if not lo[i] < hi[i]:
                raise ValidationError(f"axis {i}: lo must be < hi")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "wrap", wrap)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        s = 1
        for d in self.dims:
            s *= d
        return s

    def step(self, axis: int) -> float:
        return (self.hi[axis] - self.lo[axis]) / self.dims[axis]

    def strides(self) -> tuple:
        """Linear-index stride of each axis (first axis has stride 1)."""
        out = []
        s = 1
        for d in self.dims:
            out.append(s)
            s *= d
        return tuple(out)


def multi_to_lin(spec: GridSpec, multi) -> int:
    lin = 0
    for axis in reversed(range(spec.ndim)):
        m = multi[axis]
        if not 0 <= m < spec.dims[axis]:
            raise OutOfRange(f"axis {axis}: index {m} outside [0, {spec.dims[axis]})")
        lin = lin * spec.dims[axis] + m
    return lin


def lin_to_multi(spec: GridSpec, linear: int) -> tuple:
    if not 0 <= linear < spec.size:
        raise OutOfRange(f"linear index {linear} outside [0, {spec.size})")
    out = []
    for d in spec.dims:
        out.append(linear % d)
        linear //= d
    return tuple(out)


def cell_to_config(spec: GridSpec, multi) -> tuple:
    """Configuration at the center of a cell."""
    q = []
    for axis in range(spec.ndim):
        m = multi[axis]
        if not 0 <= m < spec.dims[axis]:
            raise OutOfRange(f"axis {axis}: index {m} outside [0, {spec.dims[axis]})")
        q.append(spec.lo[axis] + (m + 0.5) * spec.step(axis))
    return tuple(q)


def config_to_cell(spec: GridSpec, q) -> tuple:
    """Cell containing a configuration; wrapping axes reduce mod their period."""
    if len(q) != spec.ndim:
        raise OutOfBounds(f"configuration has {len(q)} coordinates, grid has {spec.ndim}")
    multi = []
    for axis in range(spec.ndim):
        v = float(q[axis])
        lo, hi = spec.lo[axis], spec.hi[axis]
        if spec.wrap[axis]:
            period = hi - lo
            v = lo + (v - lo) % period
        elif not lo <= v <= hi:
            raise OutOfBounds(f"axis {axis}: coordinate {v} outside [{lo}, {hi}]")
        m = int(math.floor((v - lo) / spec.step(axis)))
        m = min(max(m, 0), spec.dims[axis] - 1)
        multi.append(m)
    return tuple(multi)


def neighbors(spec: GridSpec, multi) -> list:
    """Moore neighborhood of a cell.

    All offsets in {-1,0,+1}^n except all-zero; wrapping axes apply modular
    arithmetic, offsets leaving a non-wrapping axis are dropped.
    """
    out = []
    for off in itertools.product((-1, 0, 1), repeat=spec.ndim):
        if all(o == 0 for o in off):
            continue
        cell = []
        ok = True
        for axis in range(spec.ndim):
            m = multi[axis] + off[axis]
            if spec.wrap[axis]:
                m %= spec.dims[axis]
            elif not 0 <= m < spec.dims[axis]:
                ok = False
                break
            cell.append(m)
        if ok:
            out.append(tuple(cell))
    return out


@dataclass
class CSpaceBitmap:
    """Packed free/obstacle bitmap over a grid (bit 1 = free)."""

    spec: GridSpec
    bits: np.ndarray = field(default=None)

    def __post_init__(self):
        nbytes = (self.spec.size + 7) // 8
        if self.bits is None:
            self.bits = np.full(nbytes, 0xFF, dtype=np.uint8)
            self._mask_tail()
        else:
            self.bits = np.asarray(self.bits, dtype=np.uint8)
            if self.bits.size != nbytes:
                raise IncompatibleGrids(
                    f"bit buffer has {self.bits.size} bytes, grid needs {nbytes}"
                )

    def _mask_tail(self):
        rem = self.spec.size % 8
        if rem:
            self.bits[-1] &= np.uint8((1 << rem) - 1)

    def is_free(self, linear: int) -> bool:
        if not 0 <= linear < self.spec.size:
            raise OutOfRange(f"linear index {linear} outside [0, {self.spec.size})")
        return bool((self.bits[linear >> 3] >> (linear & 7)) & 1)

    def is_free_bulk(self, linear: np.ndarray) -> np.ndarray:
        idx = np.asarray(linear, dtype=np.int64)
        return ((self.bits[idx >> 3] >> (idx & 7).astype(np.uint8)) & 1).astype(bool)

    def set_obstacle(self, linear: int):
        if not 0 <= linear < self.spec.size:
            raise OutOfRange(f"linear index {linear} outside [0, {self.spec.size})")
        self.bits[linear >> 3] &= np.uint8(~(1 << (linear & 7)) & 0xFF)

    def set_obstacle_bulk(self, linear: np.ndarray):
        """Clear many bits at once; duplicate indices are harmless."""
        idx = np.asarray(linear, dtype=np.int64)
        if idx.size == 0:
            return
        if idx.min() < 0 or idx.max() >= self.spec.size:
            raise OutOfRange("bulk obstacle indices outside grid")
        masks = np.uint8(0xFF) ^ (np.uint8(1) << (idx & 7).astype(np.uint8))
        np.bitwise_and.at(self.bits, idx >> 3, masks)

    def free_count(self) -> int:
        return int(np.bitwise_count(self.bits).sum())

    def obstacle_count(self) -> int:
        return self.spec.size - self.free_count()

    def to_dense(self) -> np.ndarray:
        flat = np.unpackbits(self.bits, count=self.spec.size, bitorder="little")
        return flat.reshape(self.spec.dims, order="F")

    @classmethod
    def from_dense(cls, spec: GridSpec, dense: np.ndarray) -> "CSpaceBitmap":
        dense = np.asarray(dense)
        if dense.shape != tuple(spec.dims):
            raise IncompatibleGrids(f"dense shape {dense.shape} != grid {spec.dims}")
        flat = (dense != 0).reshape(-1, order="F").astype(np.uint8)
        return cls(spec, np.packbits(flat, bitorder="little"))

    def copy(self) -> "CSpaceBitmap":
        return CSpaceBitmap(self.spec, self.bits.copy())

    def digest(self) -> str:
        """SHA-256 over the packed bit buffer."""
        return hashlib.sha256(self.bits.tobytes()).hexdigest()

    def dump(self, path):
        """Binary dump: u64 header (ndim, dims, wrap flags), f64 bounds, bits.

        All header words are little-endian 64-bit; the payload is the packed
        bit array, axis 0 fastest.
        """
        with open(path, "wb") as f:
            head = [self.spec.ndim, *self.spec.dims, *(int(w) for w in self.spec.wrap)]
            f.write(np.asarray(head, dtype="<u8").tobytes())
            f.write(np.asarray(self.spec.lo, dtype="<f8").tobytes())
            f.write(np.asarray(self.spec.hi, dtype="<f8").tobytes())
            f.write(self.bits.tobytes())

    @classmethod
    def load(cls, path) -> "CSpaceBitmap":
        with open(path, "rb") as f:
            raw = f.read()
        n = int(np.frombuffer(raw[:8], dtype="<u8")[0])
        off = 8
        dims = np.frombuffer(raw[off:off + 8 * n], dtype="<u8").astype(int)
        off += 8 * n
        wrap = np.frombuffer(raw[off:off + 8 * n], dtype="<u8").astype(bool)
        off += 8 * n
        lo = np.frombuffer(raw[off:off + 8 * n], dtype="<f8")
        off += 8 * n
        hi = np.frombuffer(raw[off:off + 8 * n], dtype="<f8")
        off += 8 * n
        spec = GridSpec(tuple(dims), tuple(wrap), tuple(lo), tuple(hi))
        bits = np.frombuffer(raw[off:], dtype=np.uint8).copy()
        return cls(spec, bits)

    def to_pgm(self, path):
        """Export a 2D bitmap as a binary PGM image (free=white)."""
        if self.spec.ndim != 2:
            raise IncompatibleGrids("PGM export needs a 2D grid")
        dense = self.to_dense()
        w, h = self.spec.dims
        img = (dense.T[::-1] * 255).astype(np.uint8)  # axis 1 upward, axis 0 rightward
        with open(path, "wb") as f:
            f.write(f"P5\n{w} {h}\n255\n".encode())
            f.write(img.tobytes())
