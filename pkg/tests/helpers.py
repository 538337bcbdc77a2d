"""Shared test utilities: hand-built models, random model generation, and
the brute-force path-combination oracle."""

from __future__ import annotations

import itertools

import numpy as np

from treeverify import (Box, Ensemble, Internal, Leaf, PostProcess, Tree,
                        load_model)
from treeverify.model import apply_post

F32 = np.float32

STUMP_JSON = """{
  "nb_inputs": 1, "nb_outputs": 1, "post_process": "none",
  "trees": [
    {"feature": 0, "threshold": 0.0, "left": {"value": [1]}, "right": {"value": [2]}}
  ]
}"""

TWO_TREE_JSON = """{
  "nb_inputs": 1, "nb_outputs": 1, "post_process": "none",
  "trees": [
    {"feature": 0, "threshold": 0.0, "left": {"value": [0]}, "right": {"value": [1]}},
    {"feature": 0, "threshold": 5.0, "left": {"value": [2]}, "right": {"value": [3]}}
  ]
}"""


def stump_example() -> Ensemble:
    return load_model(STUMP_JSON)


def two_tree_example(post: PostProcess = PostProcess.IDENTITY) -> Ensemble:
    e = load_model(TWO_TREE_JSON)
    return Ensemble(trees=e.trees, n=e.n, m=e.m, post=post)


def leaf(*values) -> Leaf:
    return Leaf(np.asarray(values, dtype=F32))


def node(feature, threshold, left, right) -> Internal:
    return Internal(feature, F32(threshold), left, right)


def stump(feature, threshold, left_values, right_values, n, post=PostProcess.IDENTITY):
    tree = Tree(node(feature, threshold, leaf(*left_values), leaf(*right_values)))
    return Ensemble(trees=(tree,), n=n, m=len(left_values), post=post)


def random_tree(rng: np.random.Generator, n: int, m: int, depth: int,
                thresholds: np.ndarray, leaf_scale: float = 1.0) -> Tree:
    def build(d):
        if d == 0 or rng.random() < 0.15:
            return Leaf(rng.normal(scale=leaf_scale, size=m).astype(F32))
        feature = int(rng.integers(n))
        thr = F32(rng.choice(thresholds))
        return Internal(feature, thr, build(d - 1), build(d - 1))
    root = build(depth)
    if isinstance(root, Leaf):  # keep at least one split
        root = Internal(int(rng.integers(n)), F32(rng.choice(thresholds)),
                        root, Leaf(rng.normal(size=m).astype(F32)))
    return Tree(root)


def random_ensemble(rng: np.random.Generator, n: int, m: int, B: int,
                    depth: int, post: PostProcess = PostProcess.IDENTITY,
                    n_thresholds: int = 7) -> Ensemble:
    # a coarse shared threshold grid makes infeasible path combinations likely
    thresholds = np.linspace(-2.0, 2.0, n_thresholds).astype(F32)
    trees = tuple(random_tree(rng, n, m, depth, thresholds) for _ in range(B))
    return Ensemble(trees=trees, n=n, m=m, post=post)


def tree_leaf_regions(tree: Tree, n: int) -> list[tuple[Box, np.ndarray]]:
    """All (region, leaf value) pairs of a tree over the full domain."""
    regions = []

    def walk(nd, box: Box):
        if isinstance(nd, Leaf):
            regions.append((box, nd.value))
            return
        left, right = box.split(nd.feature, nd.threshold)
        if not left.is_empty:
            walk(nd.left, left)
        if not right.is_empty:
            walk(nd.right, right)

    walk(tree.root, Box.full(n))
    return regions


def region_key(box: Box) -> tuple[bytes, bytes]:
    return (box.lower.tobytes(), box.upper.tobytes())


def brute_force_classes(e: Ensemble, domain: Box) -> dict[tuple, bytes]:
    """Oracle: intersect every cartesian combination of per-tree leaf
    regions, drop empties, sum leaf values in float32 tree order, apply the
    post-processor.  Returns {region key: output bytes}."""
    per_tree = [tree_leaf_regions(tree, e.n) for tree in e.trees]
    classes = {}
    for combo in itertools.product(*per_tree):
        box = domain
        for region, _ in combo:
            box = box.intersect(region)
            if box.is_empty:
                break
        if box.is_empty:
            continue
        acc = np.zeros(e.m, dtype=F32)
        for _, value in combo:
            acc = acc + value
        out = apply_post(acc, e.post, e.B)
        key = region_key(box)
        assert key not in classes, "oracle produced a duplicate region"
        classes[key] = out.tobytes()
    return classes


def enumerated_classes(e: Ensemble, domain: Box, strategy=None) -> dict[tuple, bytes]:
    from treeverify import DEFAULT_STRATEGY, for_each_class
    classes = {}

    def consume(mapping):
        key = region_key(mapping.region)
        assert key not in classes, "engine emitted a region twice"
        classes[key] = mapping.outputs.lower.tobytes()

    for_each_class(e, domain, consume,
                   strategy=strategy or DEFAULT_STRATEGY)
    return classes


def float_grid(lo: float, hi: float, count: int) -> np.ndarray:
    return np.unique(np.linspace(lo, hi, count).astype(F32))
