"""Built-in property checkers.

Plausibility of range runs the fast output-bound approximation first and
falls back to exact equivalence-class analysis only when the approximation
reports a violation.  Robustness against noise checks that every point of
the closed hypercube [x - eps, x + eps] classifies to the expected class
with a strict argmax (ties count as violations); a sliding-window variant
perturbs only the pixels a window covers.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .approximation import ensemble_bounds
from .enumeration import (DEFAULT_STRATEGY, EnumerationStats, Mapping,
                          NumericOverflowError, Strategy, Verdict, forall)
from .geometry import Box, OutputRange
from .model import Ensemble, classify

F32 = np.float32

METHOD_APPROXIMATE = "approximate"
METHOD_EXACT = "exact"


@dataclass(frozen=True)
class RangeSpec:
    alpha: np.ndarray  # (m,) float32
    beta: np.ndarray   # (m,) float32

    @classmethod
    def of(cls, alpha, beta, m: int) -> "RangeSpec":
        a = np.broadcast_to(np.asarray(alpha, dtype=F32), (m,)).copy()
        b = np.broadcast_to(np.asarray(beta, dtype=F32), (m,)).copy()
        if np.any(np.isnan(a)) or np.any(np.isnan(b)):
            raise ValueError("range bounds must not be NaN")
        if np.any(a > b):
            raise ValueError(f"invalid range spec: alpha {a} exceeds beta {b}")
        return cls(alpha=a, beta=b)


@dataclass(frozen=True)
class RobustnessQuery:
    test_point: np.ndarray
    epsilon: float
    expected_class: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "test_point",
                           np.asarray(self.test_point, dtype=F32))
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")


@dataclass(frozen=True)
class RangeResult:
    verdict: Verdict
    method: str  # METHOD_APPROXIMATE or METHOD_EXACT
    classes_visited: int = 0


def _run_kernel_check(e: Ensemble, box: Box, strategy: Strategy, mode: int,
                      alpha=None, beta=None, expected: int = 0,
                      stats: EnumerationStats | None = None) -> tuple[Verdict, int]:
    flat = kernels.flatten(e)
    status, count, visited, fail_lo, fail_hi, fail_out = kernels.run_enumeration(
        flat, box.lower, box.upper, strategy.value, mode,
        alpha=alpha, beta=beta, expected=expected)
    if stats is not None:
        stats.nodes_visited += visited
        stats.classes_emitted += count
    if status == kernels.STATUS_OVERFLOW:
        raise NumericOverflowError("non-finite leaf sum during enumeration")
    if status == kernels.STATUS_FAIL:
        counterexample = Mapping(region=Box(fail_lo, fail_hi),
                                 outputs=OutputRange.point(fail_out),
                                 trees_applied=e.B)
        return Verdict(passed=False, counterexample=counterexample), count
    return Verdict(passed=True), count


def range_predicate(spec: RangeSpec):
    def predicate(mapping: Mapping) -> bool:
        return bool(np.all(spec.alpha <= mapping.outputs.lower)
                    and np.all(mapping.outputs.upper <= spec.beta))
    return predicate


def check_range(e: Ensemble, domain: Box, spec: RangeSpec,
                strategy: Strategy = DEFAULT_STRATEGY,
                accel: bool = True,
                stats: EnumerationStats | None = None) -> RangeResult:
    """Approximation first; exact enumeration only on approximate violation."""
    bounds = ensemble_bounds(e)
    if (np.all(spec.alpha <= bounds.lower)
            and np.all(bounds.upper <= spec.beta)):
        return RangeResult(Verdict(passed=True), METHOD_APPROXIMATE, 0)
    if accel:
        verdict, count = _run_kernel_check(
            e, domain, strategy, kernels.MODE_RANGE,
            alpha=spec.alpha, beta=spec.beta, stats=stats)
    else:
        local = stats if stats is not None else EnumerationStats()
        verdict = forall(e, domain, range_predicate(spec),
                         strategy=strategy, stats=local)
        count = local.classes_emitted
    return RangeResult(verdict, METHOD_EXACT, count)


def strict_argmax_predicate(expected: int):
    def predicate(mapping: Mapping) -> bool:
        out = mapping.outputs.lower
        best = out[expected]
        for j in range(out.shape[0]):
            if j != expected and out[j] >= best:
                return False
        return True
    return predicate


def robustness_box(e: Ensemble, q: RobustnessQuery,
                   domain: Box | None = None) -> Box:
    eps = F32(q.epsilon)
    lower = q.test_point - eps
    upper = q.test_point + eps
    if domain is not None:
        lower = np.maximum(lower, domain.lower)
        upper = np.minimum(upper, domain.upper)
    return Box(lower, upper)


def check_robustness(e: Ensemble, q: RobustnessQuery,
                     strategy: Strategy = DEFAULT_STRATEGY,
                     domain: Box | None = None,
                     accel: bool = True,
                     stats: EnumerationStats | None = None) -> Verdict:
    if e.m < 2:
        raise ValueError("robustness checking needs a classifier (m >= 2)")
    if q.test_point.shape != (e.n,):
        raise ValueError(
            f"test point has shape {q.test_point.shape}, model expects ({e.n},)")
    expected = (q.expected_class if q.expected_class is not None
                else classify(e, q.test_point))
    box = robustness_box(e, q, domain)
    if accel:
        verdict, _ = _run_kernel_check(
            e, box, strategy, kernels.MODE_ARGMAX, expected=expected, stats=stats)
        return verdict
    return forall(e, box, strict_argmax_predicate(expected),
                  strategy=strategy, stats=stats)


@dataclass(frozen=True)
class WindowResult:
    position: tuple[int, int]  # (x offset, y offset)
    verdict: Verdict


@dataclass(frozen=True)
class SlidingWindowReport:
    passed: bool
    windows: tuple[WindowResult, ...]
    first_failure: Optional[tuple[int, int]] = None

    @property
    def counterexample(self) -> Optional[Mapping]:
        for w in self.windows:
            if not w.verdict.passed:
                return w.verdict.counterexample
        return None


def window_positions(image_dims: tuple[int, int], width: int, height: int,
                     stride: int) -> list[tuple[int, int]]:
    img_w, img_h = image_dims
    if width < 1 or height < 1 or width > img_w or height > img_h:
        raise ValueError(
            f"window {width}x{height} does not fit image {img_w}x{img_h}")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    return [(ox, oy)
            for oy in range(0, img_h - height + 1, stride)
            for ox in range(0, img_w - width + 1, stride)]


def check_robustness_sliding_window(
        e: Ensemble, q: RobustnessQuery, width: int, height: int,
        image_dims: tuple[int, int], stride: int = 1,
        strategy: Strategy = DEFAULT_STRATEGY,
        domain: Box | None = None,
        accel: bool = True,
        stop_on_failure: bool = True) -> SlidingWindowReport:
    """Per-window robustness: only pixels covered by the window are
    perturbed by +-eps; all others stay pinned to the test point."""
    img_w, img_h = image_dims
    if e.n != img_w * img_h:
        raise ValueError(
            f"model has {e.n} inputs, image dims give {img_w * img_h} pixels")
    if q.test_point.shape != (e.n,):
        raise ValueError(
            f"test point has shape {q.test_point.shape}, model expects ({e.n},)")
    expected = (q.expected_class if q.expected_class is not None
                else classify(e, q.test_point))
    eps = F32(q.epsilon)
    results = []
    passed = True
    first_failure = None
    for ox, oy in window_positions(image_dims, width, height, stride):
        lower = q.test_point.copy()
        upper = q.test_point.copy()
        for row in range(oy, oy + height):
            sl = slice(row * img_w + ox, row * img_w + ox + width)
            lower[sl] = lower[sl] - eps
            upper[sl] = upper[sl] + eps
        if domain is not None:
            lower = np.maximum(lower, domain.lower)
            upper = np.minimum(upper, domain.upper)
        box = Box(lower, upper)
        if accel:
            verdict, _ = _run_kernel_check(
                e, box, strategy, kernels.MODE_ARGMAX, expected=expected)
        else:
            verdict = forall(e, box, strict_argmax_predicate(expected),
                             strategy=strategy)
        results.append(WindowResult(position=(ox, oy), verdict=verdict))
        if not verdict.passed:
            passed = False
            if first_failure is None:
                first_failure = (ox, oy)
            if stop_on_failure:
                break
    return SlidingWindowReport(passed=passed, windows=tuple(results),
                               first_failure=first_failure)


@dataclass
class BatchSummary:
    total: int = 0
    robust: int = 0
    misclassified: list[int] = field(default_factory=list)
    failures: list[int] = field(default_factory=list)

    @property
    def robustness_pct(self) -> float:
        if self.total == 0:
            return 0.0
        return 100.0 * self.robust / self.total


def batch_robustness(e: Ensemble, test_set: Sequence[tuple[np.ndarray, int]],
                     epsilon: float,
                     window: tuple[int, int, int] | None = None,
                     image_dims: tuple[int, int] | None = None,
                     strategy: Strategy = DEFAULT_STRATEGY,
                     domain: Box | None = None,
                     accel: bool = True) -> BatchSummary:
    """Robustness over a test set, mirroring the accuracy-then-robustness
    protocol: a sample only counts as robust when the clean model
    classifies it correctly and the whole perturbation region agrees."""
    if window is not None and image_dims is None:
        raise ValueError("window mode requires image dimensions")
    summary = BatchSummary()
    for idx, (x, label) in enumerate(test_set):
        x = np.asarray(x, dtype=F32)
        if not 0 <= label < e.m:
            raise ValueError(f"sample {idx}: label {label} out of range for m={e.m}")
        summary.total += 1
        if classify(e, x) != label:
            summary.misclassified.append(idx)
            continue
        q = RobustnessQuery(test_point=x, epsilon=epsilon, expected_class=label)
        if window is None:
            verdict = check_robustness(e, q, strategy=strategy, domain=domain,
                                       accel=accel)
            ok = verdict.passed
        else:
            w, h, stride = window
            report = check_robustness_sliding_window(
                e, q, w, h, image_dims, stride, strategy=strategy,
                domain=domain, accel=accel)
            ok = report.passed
        if ok:
            summary.robust += 1
        else:
            summary.failures.append(idx)
    return summary


def load_testset_csv(path, n: int) -> list[tuple[np.ndarray, int]]:
    """CSV rows: n feature columns then one integer label; header optional."""
    samples = []
    with open(path, newline="") as handle:
        for lineno, row in enumerate(csv.reader(handle), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if lineno == 1:
                try:
                    float(row[0])
                except ValueError:
                    continue  # header row
            if len(row) != n + 1:
                raise ValueError(
                    f"row {lineno}: expected {n} features + label, got {len(row)} columns")
            try:
                x = np.asarray([float(cell) for cell in row[:-1]], dtype=F32)
                label = int(row[-1])
            except ValueError as exc:
                raise ValueError(f"row {lineno}: {exc}") from exc
            samples.append((x, label))
    return samples
