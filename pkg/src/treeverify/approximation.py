"""Sound, incomplete output bounds from per-tree leaf extremes.

Each tree's output is bracketed by the componentwise min/max over its leaf
tuples; the ensemble bound sums those extremes in stored tree order with
float32 accumulation (mirroring exact evaluation, and float addition is
monotone so the float sums stay sound) and applies the post-processor.

Identity and division by a positive constant are componentwise monotone,
so applying them to the summed extremes is sound.  Softmax is not: raising
one logit lowers every other component.  Its bound therefore extremizes
each component separately over the sum box -- component j is largest when
logit j sits at its max and all others at their min -- and is widened by a
few ulps to absorb float32 rounding in the exact evaluation path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import OutputRange, pred32, succ32
from .model import Ensemble, PostProcess, Tree, apply_post

F32 = np.float32

_ULP_MARGIN = 8


@dataclass(frozen=True)
class TreeBounds:
    min: np.ndarray  # (m,) float32
    max: np.ndarray  # (m,) float32


def tree_bounds(tree: Tree) -> TreeBounds:
    """Componentwise extremes over the tree's leaf tuples; each leaf is
    visited exactly once."""
    lo = None
    hi = None
    for leaf in tree.leaves():
        if lo is None:
            lo = leaf.value.astype(F32, copy=True)
            hi = leaf.value.astype(F32, copy=True)
        else:
            np.minimum(lo, leaf.value, out=lo)
            np.maximum(hi, leaf.value, out=hi)
    return TreeBounds(min=lo, max=hi)


def _exp(d: float) -> float:
    return math.inf if d > 709.0 else math.exp(d)


def _softmax_bounds(lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m = lo.shape[0]
    out_lo = np.empty(m, dtype=F32)
    out_hi = np.empty(m, dtype=F32)
    for j in range(m):
        # logistic form: softmax_j = 1 / (1 + sum_{k!=j} e^{y_k - y_j})
        s_min = sum(_exp(float(lo[k]) - float(hi[j]))
                    for k in range(m) if k != j)
        s_max = sum(_exp(float(hi[k]) - float(lo[j]))
                    for k in range(m) if k != j)
        upper = F32(1.0 / (1.0 + s_min))
        lower = F32(1.0 / (1.0 + s_max))
        for _ in range(_ULP_MARGIN):
            lower = pred32(lower)
            upper = succ32(upper)
        out_lo[j] = max(lower, F32(0.0))
        out_hi[j] = min(upper, F32(1.0))
    return out_lo, out_hi


def ensemble_bounds(e: Ensemble) -> OutputRange:
    """Sound enclosure of all ensemble outputs over the full input domain."""
    lo = np.zeros(e.m, dtype=F32)
    hi = np.zeros(e.m, dtype=F32)
    for tree in e.trees:
        tb = tree_bounds(tree)
        lo = lo + tb.min
        hi = hi + tb.max
    if e.post is PostProcess.SOFTMAX:
        out_lo, out_hi = _softmax_bounds(lo, hi)
        return OutputRange(out_lo, out_hi)
    return OutputRange(apply_post(lo, e.post, e.B),
                       apply_post(hi, e.post, e.B))
