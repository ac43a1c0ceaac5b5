"""Sparse unit vectors, time-decayed similarity and horizon arithmetic."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .errors import (
    EmptyVector,
    InvalidDecay,
    InvalidThreshold,
    NegativeCoordinate,
    NegativeDelta,
)

NORM_TOLERANCE = 1e-9
# Vectors whose norm is already this close to one are stored untouched, so
# that binary round trips stay bit-exact.
_UNIT_SNAP = 1e-12


@dataclass(frozen=True)
class SparseVector:
    """Unit-length vector with strictly positive coordinates, ascending dims."""

    dims: tuple[int, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.dims) != len(self.values):
            raise ValueError("dims and values differ in length")
        if not self.dims:
            raise EmptyVector("vector has no non-zero coordinate")
        prev = -1
        for d, v in zip(self.dims, self.values):
            if d <= prev:
                raise ValueError(f"dims must be strictly increasing (got {d} after {prev})")
            if not v > 0.0:
                raise NegativeCoordinate(f"coordinate {d} has non-positive value {v!r}")
            prev = d
        norm = math.sqrt(math.fsum(v * v for v in self.values))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise ValueError(f"vector is not unit length (norm={norm!r})")

    def __len__(self) -> int:
        return len(self.dims)

    @cached_property
    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.dims, self.values))

    def coords(self) -> list[tuple[int, float]]:
        return list(zip(self.dims, self.values))


@dataclass(frozen=True)
class VectorStats:
    max_coord: float
    coord_sum: float
    nnz: int
    prefix_norms: tuple[float, ...]

    @classmethod
    def of(cls, vector: SparseVector) -> VectorStats:
        vals = vector.values
        return cls(max(vals), math.fsum(vals), len(vals), tuple(prefix_norms(vector)))


@dataclass(frozen=True)
class StreamItem:
    id: int
    timestamp: float
    vector: SparseVector
    stats: VectorStats = field(compare=False)

    @classmethod
    def create(cls, id: int, timestamp: float, vector: SparseVector) -> StreamItem:
        if not math.isfinite(timestamp) or timestamp < 0:
            raise ValueError(f"timestamp must be finite and non-negative, got {timestamp!r}")
        return cls(id, float(timestamp), vector, VectorStats.of(vector))


@dataclass(frozen=True)
class Params:
    """Threshold and decay of a run; the horizon is derived, never passed in."""

    theta: float
    lam: float
    tau: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "tau", compute_horizon(self.theta, self.lam))


@dataclass(frozen=True, order=True)
class SimilarPair:
    older_id: int
    newer_id: int
    score: float

    def format(self) -> str:
        return f"{self.older_id} {self.newer_id} {self.score:.6f}"


def normalize(raw: Iterable[tuple[int, float]]) -> SparseVector:
    """Build a unit vector from ``(dim, value)`` pairs.

    Duplicate dims are summed and zeros dropped before scaling.
    """
    merged: dict[int, float] = {}
    for dim, value in raw:
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r} at dim {dim}")
        if value < 0:
            raise NegativeCoordinate(f"negative value {value!r} at dim {dim}")
        if dim < 0:
            raise ValueError(f"negative dim {dim}")
        merged[int(dim)] = merged.get(int(dim), 0.0) + value
    dims = sorted(d for d, v in merged.items() if v > 0.0)
    if not dims:
        raise EmptyVector("vector has no strictly positive coordinate")
    values = [merged[d] for d in dims]
    norm = math.sqrt(math.fsum(v * v for v in values))
    if abs(norm - 1.0) > _UNIT_SNAP:
        values = [v / norm for v in values]
    return SparseVector(tuple(dims), tuple(values))


def dot(x: SparseVector, y: SparseVector) -> float:
    if len(x.dims) > len(y.dims):
        x, y = y, x
    other = y.as_dict
    total = 0.0
    for d, v in zip(x.dims, x.values):
        w = other.get(d)
        if w is not None:
            total += v * w
    return total


def decay_factor(dt: float, lam: float) -> float:
    if dt < 0:
        raise NegativeDelta(f"time delta must be non-negative, got {dt!r}")
    return math.exp(-lam * dt)


def decayed_similarity(x: StreamItem, y: StreamItem, lam: float) -> float:
    return dot(x.vector, y.vector) * decay_factor(abs(x.timestamp - y.timestamp), lam)


def compute_horizon(theta: float, lam: float) -> float:
    """Largest arrival gap at which two identical vectors still reach ``theta``."""
    if not (0.0 < theta <= 1.0):
        raise InvalidThreshold(f"theta must lie in (0, 1], got {theta!r}")
    if not (lam > 0.0) or not math.isfinite(lam):
        raise InvalidDecay(f"lambda must be a positive finite number, got {lam!r}")
    return math.log(1.0 / theta) / lam


def prefix_norms(x: SparseVector) -> list[float]:
    out = []
    acc = 0.0
    for v in x.values:
        acc += v * v
        out.append(math.sqrt(acc))
    return out
