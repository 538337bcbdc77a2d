"""Equivalence-class enumeration over a tree ensemble.

Walks all feasible path combinations depth-first, carrying a (box,
float32 partial-sum) pair that is refined through one tree after another.
Combinations whose joint region is empty are discarded.  The callback API
(`for_each_class`, `forall`) always runs the interpreted engine below;
`count_classes` and the fixed-form checks in `properties` dispatch to the
accelerated kernels, which replay the exact same visit order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import kernels
from .geometry import Box, OutputRange, succ32
from .model import Ensemble, Internal, apply_post

F32 = np.float32

# Consumer return values for for_each_class
CONTINUE = True
STOP = False


class Strategy(enum.Enum):
    LEFT_FIRST = kernels.LEFT_FIRST
    RIGHT_FIRST = kernels.RIGHT_FIRST
    LEAST_POINTS_FIRST = kernels.LEAST_POINTS_FIRST

    @classmethod
    def parse(cls, text: str) -> "Strategy":
        table = {
            "left": cls.LEFT_FIRST,
            "right": cls.RIGHT_FIRST,
            "least-points": cls.LEAST_POINTS_FIRST,
        }
        try:
            return table[text]
        except KeyError:
            raise ValueError(
                f"unknown strategy {text!r}; expected one of {sorted(table)}") from None


DEFAULT_STRATEGY = Strategy.LEAST_POINTS_FIRST


@dataclass(frozen=True)
class Mapping:
    """One equivalence class: a region and the ensemble output on it."""
    region: Box
    outputs: OutputRange
    trees_applied: int


@dataclass(frozen=True)
class Verdict:
    passed: bool
    counterexample: Optional[Mapping] = None

    def __bool__(self) -> bool:
        return self.passed


@dataclass
class EnumerationStats:
    nodes_visited: int = 0
    classes_emitted: int = 0


class NumericOverflowError(ArithmeticError):
    """A leaf sum left the finite float32 range during enumeration."""


def _check_domain(e: Ensemble, domain: Box) -> None:
    if domain.n != e.n:
        raise ValueError(f"domain has {domain.n} dimensions, model expects {e.n}")
    if domain.is_empty:
        raise ValueError("domain is empty")


def for_each_class(e: Ensemble, domain: Box,
                   consumer: Callable[[Mapping], object],
                   strategy: Strategy = DEFAULT_STRATEGY,
                   stats: EnumerationStats | None = None) -> bool:
    """Emit every feasible equivalence class exactly once.

    The consumer receives a read-only Mapping and returns STOP to abort.
    Returns True when enumeration completed, False when stopped.
    """
    _check_domain(e, domain)
    if stats is None:
        stats = EnumerationStats()
    ntrees = e.B
    m = e.m
    left_first_code = strategy is not Strategy.RIGHT_FIRST
    lpf = strategy is Strategy.LEAST_POINTS_FIRST

    # frames: (tree index, node, lower, upper, float32 partial sum)
    stack = [(0, e.trees[0].root, domain.lower.copy(), domain.upper.copy(),
              np.zeros(m, dtype=F32))]
    while stack:
        t, node, lo, hi, acc = stack.pop()
        stats.nodes_visited += 1
        if not isinstance(node, Internal):
            acc = acc + node.value
            if t + 1 < ntrees:
                stack.append((t + 1, e.trees[t + 1].root, lo, hi, acc))
                continue
            if not np.all(np.isfinite(acc)):
                raise NumericOverflowError(
                    f"non-finite leaf sum {acc} in region {Box(lo, hi)}")
            out = apply_post(acc, e.post, ntrees)
            stats.classes_emitted += 1
            mapping = Mapping(region=Box(lo, hi),
                              outputs=OutputRange.point(out),
                              trees_applied=ntrees)
            if consumer(mapping) is STOP:
                return False
            continue

        f = node.feature
        thr = node.threshold
        dlo = lo[f]
        dhi = hi[f]
        has_left = dlo <= thr
        succ = succ32(thr)
        has_right = succ <= dhi
        if has_left and not has_right:
            if dhi > thr:
                hi = hi.copy()
                hi[f] = thr
            stack.append((t, node.left, lo, hi, acc))
            continue
        if has_right and not has_left:
            if dlo < succ:
                lo = lo.copy()
                lo[f] = succ
            stack.append((t, node.right, lo, hi, acc))
            continue
        if lpf:
            left_first = float(thr) - float(dlo) <= float(dhi) - float(thr)
        else:
            left_first = left_first_code
        left_hi = hi.copy()
        left_hi[f] = thr
        right_lo = lo.copy()
        right_lo[f] = succ
        # LIFO: push the second-visited child first
        if left_first:
            stack.append((t, node.right, right_lo, hi, acc.copy()))
            stack.append((t, node.left, lo, left_hi, acc))
        else:
            stack.append((t, node.left, lo, left_hi, acc.copy()))
            stack.append((t, node.right, right_lo, hi, acc))
    return True


def forall(e: Ensemble, domain: Box,
           predicate: Callable[[Mapping], bool],
           strategy: Strategy = DEFAULT_STRATEGY,
           stats: EnumerationStats | None = None) -> Verdict:
    """PASS iff the predicate holds on every equivalence class;
    short-circuits with the first violating mapping otherwise."""
    violation: list[Mapping] = []

    def consume(mapping: Mapping):
        if not predicate(mapping):
            violation.append(mapping)
            return STOP
        return CONTINUE

    for_each_class(e, domain, consume, strategy=strategy, stats=stats)
    if violation:
        return Verdict(passed=False, counterexample=violation[0])
    return Verdict(passed=True)


def count_classes(e: Ensemble, domain: Box,
                  strategy: Strategy = DEFAULT_STRATEGY,
                  stats: EnumerationStats | None = None) -> int:
    """Number of feasible equivalence classes; strategy-independent."""
    _check_domain(e, domain)
    flat = kernels.flatten(e)
    status, count, visited, *_ = kernels.run_enumeration(
        flat, domain.lower, domain.upper, strategy.value, kernels.MODE_COUNT)
    if status == kernels.STATUS_OVERFLOW:
        raise NumericOverflowError("non-finite leaf sum during enumeration")
    if stats is not None:
        stats.nodes_visited += visited
        stats.classes_emitted += count
    return count
