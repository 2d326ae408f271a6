"""Seedable splittable random streams and uniform directions on the sphere."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _philox

#: Default seed, the ASCII bytes of "SINGLET" read as a big-endian integer.
DEFAULT_SEED = int.from_bytes(b"SINGLET", "big")  # 0x53494E474C4554

_M64 = 0xFFFFFFFFFFFFFFFF


def sgn(x: float) -> int:
    """+1 for x >= 0, -1 for x < 0. Non-finite input is rejected."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"sgn needs a finite value, got {x!r}")
    return 1 if x >= 0.0 else -1


@dataclass(frozen=True)
class Direction:
    """A unit vector in R^3 (callers are trusted; use unit_direction to ingest)."""

    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def norm_squared(self) -> float:
        return self.x * self.x + self.y * self.y + self.z * self.z


def dot(u: Direction, v: Direction) -> float:
    return u.x * v.x + u.y * v.y + u.z * v.z


def cos_between(u: Direction, v: Direction) -> float:
    """dot(u, v) clamped into [-1, 1] (rounding can push it an ulp outside)."""
    return min(1.0, max(-1.0, dot(u, v)))


def unit_direction(x: float, y: float, z: float, tol: float = 1e-6) -> Direction:
    """Normalize a near-unit vector; reject anything further than `tol` from unit norm."""
    norm = math.sqrt(x * x + y * y + z * z)
    if abs(norm - 1.0) > tol:
        raise ValueError(f"direction ({x}, {y}, {z}) has norm {norm:.9g}, not within {tol} of 1")
    return Direction(x / norm, y / norm, z / norm)


Z_AXIS = Direction(0.0, 0.0, 1.0)
X_AXIS = Direction(1.0, 0.0, 0.0)
Y_AXIS = Direction(0.0, 1.0, 0.0)


@dataclass
class RandomStream:
    """A deterministic sample stream identified by (seed, stream).

    The same (seed, stream) always yields the same direction sequence, and
    distinct stream indices give statistically independent sequences; the
    cursor only records how many draws this handle has made.
    """

    seed: int
    stream: int = 0
    cursor: int = field(default=0, compare=False)

    def __post_init__(self):
        self.seed = int(self.seed) & _M64
        self.stream = int(self.stream) & _M64

    def split(self, index: int) -> "RandomStream":
        return RandomStream(self.seed, _philox.split_index(self.stream, index))


def split_stream(stream: RandomStream, index: int) -> RandomStream:
    """Child stream `index`; independent of its siblings, deterministic in (seed, index)."""
    return stream.split(index)


def sample_direction(stream: RandomStream) -> Direction:
    """Draw one direction uniform on the unit sphere, advancing the stream."""
    x, y, z = _philox.direction_scalar(stream.seed, stream.stream, stream.cursor)
    stream.cursor += 1
    return Direction(x, y, z)


def sample_directions(stream: RandomStream, count: int) -> np.ndarray:
    """Draw `count` directions at once; returns a (count, 3) array.

    Produces exactly the same values as `count` calls to sample_direction.
    """
    slots = np.arange(stream.cursor, stream.cursor + count, dtype=np.uint64)
    x, y, z = _philox.directions_vec(stream.seed, stream.stream, slots)
    stream.cursor += count
    return np.column_stack([x, y, z])
