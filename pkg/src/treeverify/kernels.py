"""Hot enumeration and prediction kernels.

The kernels operate on a flattened array form of an ensemble and exist in
two builds: a numba ``@njit`` build and the plain interpreted build of the
same function.  Setting the environment variable ``TREEVERIFY_NO_NUMBA``
(to anything non-empty) selects the pure build; so does a missing numba
installation.  Both builds execute identical float32 operations, so counts,
verdicts, and counterexamples are bit-identical across them.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .fastexp import exp64
from .model import Ensemble, Internal, Leaf, PostProcess

F32 = np.float32

ENV_DISABLE = "TREEVERIFY_NO_NUMBA"

try:
    from numba import njit as _njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional extra
    HAVE_NUMBA = False


def jit_enabled() -> bool:
    return HAVE_NUMBA and not os.environ.get(ENV_DISABLE)


# Strategy codes (match enumeration.Strategy order)
LEFT_FIRST = 0
RIGHT_FIRST = 1
LEAST_POINTS_FIRST = 2

# Enumeration modes
MODE_COUNT = 0
MODE_RANGE = 1
MODE_ARGMAX = 2

# Status codes
STATUS_PASS = 0
STATUS_FAIL = 1
STATUS_OVERFLOW = 2

POST_IDENTITY = 0
POST_DIVISOR = 1
POST_SOFTMAX = 2

_POST_CODES = {
    PostProcess.IDENTITY: POST_IDENTITY,
    PostProcess.DIVISOR: POST_DIVISOR,
    PostProcess.SOFTMAX: POST_SOFTMAX,
}


@dataclass(frozen=True)
class FlatEnsemble:
    """Array form of an ensemble: one row per node, trees concatenated.

    feature[i] < 0 marks a leaf; leaf_value rows are zero for internal
    nodes.  stack_cap bounds the pending-frame count of a depth-first
    enumeration (1 + sum of tree depths).
    """

    feature: np.ndarray     # int32 (num_nodes,)
    threshold: np.ndarray   # float32 (num_nodes,)
    left: np.ndarray        # int32 (num_nodes,)
    right: np.ndarray       # int32 (num_nodes,)
    leaf_value: np.ndarray  # float32 (num_nodes, m)
    roots: np.ndarray       # int32 (B,)
    n: int
    m: int
    post_code: int
    stack_cap: int


def flatten(e: Ensemble) -> FlatEnsemble:
    feature, threshold, left, right, values = [], [], [], [], []
    roots = []
    zeros = np.zeros(e.m, dtype=F32)

    def add(node) -> int:
        idx = len(feature)
        if isinstance(node, Leaf):
            feature.append(-1)
            threshold.append(F32(0.0))
            left.append(-1)
            right.append(-1)
            values.append(node.value)
            return idx
        feature.append(node.feature)
        threshold.append(node.threshold)
        left.append(-1)
        right.append(-1)
        values.append(zeros)
        left[idx] = add(node.left)
        right[idx] = add(node.right)
        return idx

    depth_sum = 0
    for tree in e.trees:
        roots.append(add(tree.root))
        depth_sum += tree.depth()
    return FlatEnsemble(
        feature=np.asarray(feature, dtype=np.int32),
        threshold=np.asarray(threshold, dtype=F32),
        left=np.asarray(left, dtype=np.int32),
        right=np.asarray(right, dtype=np.int32),
        leaf_value=np.asarray(values, dtype=F32),
        roots=np.asarray(roots, dtype=np.int32),
        n=e.n,
        m=e.m,
        post_code=_POST_CODES[e.post],
        stack_cap=depth_sum + e.B + 4,
    )


def _enumerate_impl(feature, threshold, left, right, leaf_value, roots,
                    post_code, dom_lo, dom_hi, stack_cap, strategy, mode,
                    alpha, beta, expected, fail_lo, fail_hi, fail_out):
    """Depth-first walk over all feasible path combinations.

    Returns (status, classes_emitted, nodes_visited).  On STATUS_FAIL the
    violating region and output are written to fail_lo/fail_hi/fail_out.
    """
    ntrees = roots.shape[0]
    n = dom_lo.shape[0]
    m = leaf_value.shape[1]

    stk_tree = np.empty(stack_cap, np.int32)
    stk_node = np.empty(stack_cap, np.int32)
    stk_lo = np.empty((stack_cap, n), F32)
    stk_hi = np.empty((stack_cap, n), F32)
    stk_acc = np.empty((stack_cap, m), F32)
    out = np.empty(m, F32)
    exps = np.empty(m, F32)

    stk_tree[0] = 0
    stk_node[0] = roots[0]
    for i in range(n):
        stk_lo[0, i] = dom_lo[i]
        stk_hi[0, i] = dom_hi[i]
    for j in range(m):
        stk_acc[0, j] = F32(0.0)
    sp = 1

    count = 0
    visited = 0
    inf32 = F32(np.inf)

    while sp > 0:
        sp -= 1
        visited += 1
        t = stk_tree[sp]
        nd = stk_node[sp]
        f = feature[nd]
        if f < 0:
            for j in range(m):
                stk_acc[sp, j] = F32(stk_acc[sp, j] + leaf_value[nd, j])
            if t + 1 < ntrees:
                stk_tree[sp] = t + 1
                stk_node[sp] = roots[t + 1]
                sp += 1
                continue
            # all trees refined: post-process and emit
            finite = True
            for j in range(m):
                v = stk_acc[sp, j]
                if not np.isfinite(v):
                    finite = False
                out[j] = v
            if not finite:
                return STATUS_OVERFLOW, count, visited
            if post_code == POST_DIVISOR:
                for j in range(m):
                    out[j] = F32(out[j] / F32(ntrees))
            elif post_code == POST_SOFTMAX:
                vmax = out[0]
                for j in range(1, m):
                    if out[j] > vmax:
                        vmax = out[j]
                total = F32(0.0)
                for j in range(m):
                    # np.float64, not float(): numba's float() keeps float32
                    exps[j] = F32(exp64(np.float64(out[j]) - np.float64(vmax)))
                    total = F32(total + exps[j])
                for j in range(m):
                    out[j] = F32(exps[j] / total)
            count += 1
            if mode == MODE_RANGE:
                ok = True
                for j in range(m):
                    if out[j] < alpha[j] or out[j] > beta[j]:
                        ok = False
                        break
            elif mode == MODE_ARGMAX:
                ok = True
                best = out[expected]
                for j in range(m):
                    if j != expected and out[j] >= best:
                        ok = False
                        break
            else:
                ok = True
            if not ok:
                for i in range(n):
                    fail_lo[i] = stk_lo[sp, i]
                    fail_hi[i] = stk_hi[sp, i]
                for j in range(m):
                    fail_out[j] = out[j]
                return STATUS_FAIL, count, visited
            continue

        # internal node: split the current box at (f, threshold)
        thr = threshold[nd]
        lo = stk_lo[sp, f]
        hi = stk_hi[sp, f]
        has_left = lo <= thr
        succ = np.nextafter(thr, inf32)
        has_right = succ <= hi
        if has_left and not has_right:
            stk_node[sp] = left[nd]
            if hi > thr:
                stk_hi[sp, f] = thr
            sp += 1
            continue
        if has_right and not has_left:
            stk_node[sp] = right[nd]
            if lo < succ:
                stk_lo[sp, f] = succ
            sp += 1
            continue
        # both children feasible: order per strategy; the first-visited
        # child goes on top of the stack
        if strategy == LEAST_POINTS_FIRST:
            left_size = float(thr) - float(lo)
            right_size = float(hi) - float(thr)
            left_first = left_size <= right_size
        elif strategy == RIGHT_FIRST:
            left_first = False
        else:
            left_first = True
        for i in range(n):
            stk_lo[sp + 1, i] = stk_lo[sp, i]
            stk_hi[sp + 1, i] = stk_hi[sp, i]
        for j in range(m):
            stk_acc[sp + 1, j] = stk_acc[sp, j]
        stk_tree[sp + 1] = t
        if left_first:
            stk_node[sp] = right[nd]
            stk_lo[sp, f] = succ
            stk_node[sp + 1] = left[nd]
            stk_hi[sp + 1, f] = thr
        else:
            stk_node[sp] = left[nd]
            stk_hi[sp, f] = thr
            stk_node[sp + 1] = right[nd]
            stk_lo[sp + 1, f] = succ
        sp += 2

    return STATUS_PASS, count, visited


def _predict_impl(feature, threshold, left, right, leaf_value, roots,
                  post_code, X, out):
    """Batch ensemble prediction; float32 sums in stored tree order."""
    ntrees = roots.shape[0]
    m = leaf_value.shape[1]
    npts = X.shape[0]
    exps = np.empty(m, F32)
    for r in range(npts):
        for j in range(m):
            out[r, j] = F32(0.0)
        for b in range(ntrees):
            nd = roots[b]
            while feature[nd] >= 0:
                if X[r, feature[nd]] <= threshold[nd]:
                    nd = left[nd]
                else:
                    nd = right[nd]
            for j in range(m):
                out[r, j] = F32(out[r, j] + leaf_value[nd, j])
        if post_code == POST_DIVISOR:
            for j in range(m):
                out[r, j] = F32(out[r, j] / F32(ntrees))
        elif post_code == POST_SOFTMAX:
            vmax = out[r, 0]
            for j in range(1, m):
                if out[r, j] > vmax:
                    vmax = out[r, j]
            total = F32(0.0)
            for j in range(m):
                # np.float64, not float(): numba's float() keeps float32
                exps[j] = F32(exp64(np.float64(out[r, j]) - np.float64(vmax)))
                total = F32(total + exps[j])
            for j in range(m):
                out[r, j] = F32(exps[j] / total)


if HAVE_NUMBA:
    _enumerate_jit = _njit(cache=True)(_enumerate_impl)
    _predict_jit = _njit(cache=True)(_predict_impl)


def run_enumeration(flat: FlatEnsemble, dom_lo, dom_hi, strategy: int,
                    mode: int, alpha=None, beta=None, expected: int = 0):
    """Dispatch the enumeration kernel; returns
    (status, classes_emitted, nodes_visited, fail_lo, fail_hi, fail_out)."""
    if alpha is None:
        alpha = np.zeros(flat.m, dtype=F32)
    if beta is None:
        beta = np.zeros(flat.m, dtype=F32)
    fail_lo = np.zeros(flat.n, dtype=F32)
    fail_hi = np.zeros(flat.n, dtype=F32)
    fail_out = np.zeros(flat.m, dtype=F32)
    fn = _enumerate_jit if jit_enabled() else _enumerate_impl
    status, count, visited = fn(
        flat.feature, flat.threshold, flat.left, flat.right, flat.leaf_value,
        flat.roots, flat.post_code,
        np.ascontiguousarray(dom_lo, dtype=F32),
        np.ascontiguousarray(dom_hi, dtype=F32),
        flat.stack_cap, strategy, mode,
        np.ascontiguousarray(alpha, dtype=F32),
        np.ascontiguousarray(beta, dtype=F32),
        expected, fail_lo, fail_hi, fail_out)
    return status, count, visited, fail_lo, fail_hi, fail_out


def predict_batch(flat: FlatEnsemble, X) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=F32)
    if X.ndim != 2 or X.shape[1] != flat.n:
        raise ValueError(f"input has shape {X.shape}, expected (N, {flat.n})")
    out = np.empty((X.shape[0], flat.m), dtype=F32)
    fn = _predict_jit if jit_enabled() else _predict_impl
    fn(flat.feature, flat.threshold, flat.left, flat.right, flat.leaf_value,
       flat.roots, flat.post_code, X, out)
    return out
