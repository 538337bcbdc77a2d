"""Intervals and hyperrectangles over 32-bit floats.

All bounds are inclusive.  A strict comparison ``x > t`` is represented by
raising the lower bound to ``succ32(t)``, the next representable float32
above ``t``, so every interval stays closed and agrees bit-exactly with
pointwise evaluation at representable inputs.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

import numpy as np

F32 = np.float32
INF = F32(np.inf)
NEG_INF = F32(-np.inf)


def succ32(x) -> np.float32:
    """Next representable float32 strictly above x."""
    return np.nextafter(F32(x), INF)


def pred32(x) -> np.float32:
    """Next representable float32 strictly below x."""
    return np.nextafter(F32(x), NEG_INF)


class Interval(NamedTuple):
    lower: np.float32
    upper: np.float32

    @property
    def is_empty(self) -> bool:
        return bool(self.lower > self.upper)

    def contains(self, x) -> bool:
        return bool(self.lower <= F32(x) <= self.upper)


def side_measure(interval: Interval, threshold) -> tuple[float, float]:
    """Sizes of the two slices a split at `threshold` would produce.

    Only meaningful for comparison (the least-points-first ordering);
    computed in float64 so huge ranges do not overflow.
    """
    t = float(F32(threshold))
    left = max(0.0, t - float(interval.lower))
    right = max(0.0, float(interval.upper) - t)
    return left, right


class Box:
    """An n-dimensional product of closed float32 intervals."""

    __slots__ = ("lower", "upper")

    def __init__(self, lower, upper):
        self.lower = np.asarray(lower, dtype=F32).copy()
        self.upper = np.asarray(upper, dtype=F32).copy()
        if self.lower.shape != self.upper.shape or self.lower.ndim != 1:
            raise ValueError("box bounds must be 1-D arrays of equal length")

    @classmethod
    def full(cls, n: int) -> "Box":
        return cls(np.full(n, NEG_INF), np.full(n, INF))

    @classmethod
    def from_intervals(cls, intervals: Iterable[Interval]) -> "Box":
        pairs = list(intervals)
        return cls([iv.lower for iv in pairs], [iv.upper for iv in pairs])

    @property
    def n(self) -> int:
        return self.lower.shape[0]

    def dim(self, i: int) -> Interval:
        return Interval(self.lower[i], self.upper[i])

    @property
    def is_empty(self) -> bool:
        return bool(np.any(self.lower > self.upper))

    def contains(self, x) -> bool:
        pt = np.asarray(x, dtype=F32)
        if pt.shape != self.lower.shape:
            raise ValueError(
                f"point has {pt.shape[0]} components, box has {self.n}"
            )
        return bool(np.all(self.lower <= pt) and np.all(pt <= self.upper))

    def copy(self) -> "Box":
        return Box(self.lower, self.upper)

    def split(self, dim: int, threshold) -> tuple["Box", "Box"]:
        """Split along `dim` into (<= threshold, > threshold) halves.

        Either half may come out empty.  The two halves are disjoint and
        together cover exactly the representable points of this box.
        """
        if not 0 <= dim < self.n:
            raise IndexError(f"split dimension {dim} out of range for n={self.n}")
        t = F32(threshold)
        if not np.isfinite(t):
            raise ValueError("split threshold must be finite")
        left = self.copy()
        right = self.copy()
        left.upper[dim] = min(left.upper[dim], t)
        right.lower[dim] = max(right.lower[dim], succ32(t))
        return left, right

    def intersect(self, other: "Box") -> "Box":
        return Box(np.maximum(self.lower, other.lower),
                   np.minimum(self.upper, other.upper))

    def __eq__(self, other) -> bool:
        return (isinstance(other, Box)
                and np.array_equal(self.lower, other.lower)
                and np.array_equal(self.upper, other.upper))

    def __hash__(self):
        return hash((self.lower.tobytes(), self.upper.tobytes()))

    def __repr__(self) -> str:
        dims = ", ".join(f"[{lo}, {hi}]" for lo, hi in zip(self.lower, self.upper))
        return f"Box({dims})"


class OutputRange:
    """An m-dimensional interval of outputs; degenerate (lower == upper)
    for exact equivalence classes."""

    __slots__ = ("lower", "upper")

    def __init__(self, lower, upper):
        self.lower = np.asarray(lower, dtype=F32).copy()
        self.upper = np.asarray(upper, dtype=F32).copy()
        if self.lower.shape != self.upper.shape or self.lower.ndim != 1:
            raise ValueError("output range bounds must be 1-D arrays of equal length")

    @classmethod
    def point(cls, values) -> "OutputRange":
        return cls(values, values)

    @property
    def m(self) -> int:
        return self.lower.shape[0]

    def dim(self, i: int) -> Interval:
        return Interval(self.lower[i], self.upper[i])

    @property
    def is_point(self) -> bool:
        return bool(np.array_equal(self.lower, self.upper))

    def encloses(self, other: "OutputRange") -> bool:
        return bool(np.all(self.lower <= other.lower)
                    and np.all(other.upper <= self.upper))

    def __eq__(self, other) -> bool:
        return (isinstance(other, OutputRange)
                and np.array_equal(self.lower, other.lower)
                and np.array_equal(self.upper, other.upper))

    def __hash__(self):
        return hash((self.lower.tobytes(), self.upper.tobytes()))

    def __repr__(self) -> str:
        if self.is_point:
            return f"OutputRange({list(map(float, self.lower))})"
        return f"OutputRange({list(map(float, self.lower))}, {list(map(float, self.upper))})"


def parse_domain(text: str, n: int) -> Box:
    """Parse the CLI domain syntax: comma-separated `lo:hi` pairs.

    `-inf`/`inf` are accepted; a single pair is broadcast to all n dims.
    """
    pairs = [p.strip() for p in text.split(",") if p.strip()]
    if len(pairs) == 1:
        pairs = pairs * n
    if len(pairs) != n:
        raise ValueError(f"domain has {len(pairs)} dimensions, model expects {n}")
    lower, upper = [], []
    for i, pair in enumerate(pairs):
        parts = pair.split(":")
        if len(parts) != 2:
            raise ValueError(f"domain dimension {i}: expected 'lo:hi', got {pair!r}")
        try:
            lo, hi = F32(float(parts[0])), F32(float(parts[1]))
        except ValueError as exc:
            raise ValueError(f"domain dimension {i}: {exc}") from exc
        if np.isnan(lo) or np.isnan(hi):
            raise ValueError(f"domain dimension {i}: NaN bound")
        if lo > hi:
            raise ValueError(f"domain dimension {i}: empty interval {pair!r}")
        lower.append(lo)
        upper.append(hi)
    return Box(lower, upper)
