"""Tree ensembles: in-memory representation, bit-exact prediction, JSON format.

All numerics are 32-bit IEEE-754 floats.  Prediction sums the trees in
stored order with float32 accumulation, then applies the post-processing
function once -- the same evaluation order the enumeration engine mirrors,
so both produce bit-identical outputs.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

from .fastexp import exp64

F32 = np.float32


class ModelFormatError(ValueError):
    """A model document is malformed; the message names the offending path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class PostProcess(enum.Enum):
    IDENTITY = "none"
    DIVISOR = "divisor"
    SOFTMAX = "softmax"


@dataclass(frozen=True)
class Leaf:
    value: np.ndarray  # (m,) float32


@dataclass(frozen=True)
class Internal:
    feature: int
    threshold: np.float32
    left: "Node"
    right: "Node"


Node = Union[Leaf, Internal]


@dataclass(frozen=True)
class Tree:
    root: Node

    def eval(self, x: np.ndarray) -> np.ndarray:
        node = self.root
        while isinstance(node, Internal):
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node.value

    def leaves(self) -> Iterator[Leaf]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, Leaf):
                yield node
            else:
                stack.append(node.right)
                stack.append(node.left)

    def leaf_count(self) -> int:
        return sum(1 for _ in self.leaves())

    def depth(self) -> int:
        def rec(node: Node) -> int:
            if isinstance(node, Leaf):
                return 0
            return 1 + max(rec(node.left), rec(node.right))
        return rec(self.root)


@dataclass(frozen=True)
class Ensemble:
    trees: tuple[Tree, ...]
    n: int
    m: int
    post: PostProcess

    @property
    def B(self) -> int:
        return len(self.trees)

    def eval(self, x) -> np.ndarray:
        return ensemble_eval(self, x)

    def classify(self, x) -> int:
        return classify(self, x)


def softmax32(values: np.ndarray) -> np.ndarray:
    """Standard softmax with max-subtraction, in float32.

    Exponentials go through the deterministic double `exp` shared with the
    accelerated kernels (see fastexp), so both produce bit-identical output.
    """
    m = values.shape[0]
    vmax = values[0]
    for i in range(1, m):
        if values[i] > vmax:
            vmax = values[i]
    exps = np.empty(m, dtype=F32)
    total = F32(0.0)
    for i in range(m):
        exps[i] = F32(exp64(float(values[i]) - float(vmax)))
        total = F32(total + exps[i])
    out = np.empty(m, dtype=F32)
    for i in range(m):
        out[i] = F32(exps[i] / total)
    return out


def apply_post(values: np.ndarray, post: PostProcess, ntrees: int) -> np.ndarray:
    if post is PostProcess.IDENTITY:
        return values.astype(F32, copy=True)
    if post is PostProcess.DIVISOR:
        return (values / F32(ntrees)).astype(F32, copy=False)
    return softmax32(values)


def _check_input(e: Ensemble, x) -> np.ndarray:
    pt = np.asarray(x, dtype=F32)
    if pt.shape != (e.n,):
        raise ValueError(f"input has shape {pt.shape}, model expects ({e.n},)")
    if np.any(np.isnan(pt)):
        raise ValueError("input contains NaN")
    return pt


def tree_eval(tree: Tree, x, n: int | None = None) -> np.ndarray:
    pt = np.asarray(x, dtype=F32)
    if n is not None and pt.shape != (n,):
        raise ValueError(f"input has shape {pt.shape}, expected ({n},)")
    return tree.eval(pt)


def ensemble_eval(e: Ensemble, x) -> np.ndarray:
    pt = _check_input(e, x)
    acc = np.zeros(e.m, dtype=F32)
    for tree in e.trees:
        acc = acc + tree.eval(pt)
    return apply_post(acc, e.post, e.B)


def classify(e: Ensemble, x) -> int:
    if e.m < 2:
        raise ValueError("classification needs at least 2 outputs")
    # np.argmax breaks ties toward the lowest index
    return int(np.argmax(ensemble_eval(e, x)))


# --- JSON format ------------------------------------------------------------
#
# {
#   "nb_inputs": n, "nb_outputs": m,
#   "post_process": "none" | "divisor" | "softmax",
#   "trees": [<node>, ...],
#   "metadata": {...}          # optional, ignored by the loader
# }
#
# <node> is {"feature": i, "threshold": x, "left": <node>, "right": <node>}
# or {"value": [x1, ..., xm]}.  Numbers parse to nearest float32.

_TOP_KEYS = {"nb_inputs", "nb_outputs", "post_process", "trees", "metadata"}


def _require_int(doc: dict, key: str, path: str) -> int:
    if key not in doc:
        raise ModelFormatError(path, f"missing required key {key!r}")
    value = doc[key]
    if not isinstance(value, int) or isinstance(value, bool):
        raise ModelFormatError(f"{path}.{key}", f"expected an integer, got {value!r}")
    return value


def _parse_node(doc, path: str, n: int, m: int) -> Node:
    if not isinstance(doc, dict):
        raise ModelFormatError(path, f"expected an object, got {type(doc).__name__}")
    if "value" in doc:
        extra = set(doc) - {"value"}
        if extra:
            raise ModelFormatError(path, f"leaf has unexpected keys {sorted(extra)}")
        raw = doc["value"]
        if not isinstance(raw, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw):
            raise ModelFormatError(f"{path}.value", "expected a list of numbers")
        if len(raw) != m:
            raise ModelFormatError(
                f"{path}.value", f"leaf tuple has length {len(raw)}, nb_outputs is {m}")
        value = np.asarray(raw, dtype=F32)
        if np.any(np.isnan(value)):
            raise ModelFormatError(f"{path}.value", "leaf value contains NaN")
        value.setflags(write=False)
        return Leaf(value)
    extra = set(doc) - {"feature", "threshold", "left", "right"}
    if extra:
        raise ModelFormatError(path, f"internal node has unexpected keys {sorted(extra)}")
    for key in ("feature", "threshold", "left", "right"):
        if key not in doc:
            raise ModelFormatError(path, f"node is missing key {key!r}")
    feature = doc["feature"]
    if not isinstance(feature, int) or isinstance(feature, bool):
        raise ModelFormatError(f"{path}.feature", f"expected an integer, got {feature!r}")
    if not 0 <= feature < n:
        raise ModelFormatError(
            f"{path}.feature", f"feature index {feature} out of range for nb_inputs={n}")
    raw_t = doc["threshold"]
    if not isinstance(raw_t, (int, float)) or isinstance(raw_t, bool):
        raise ModelFormatError(f"{path}.threshold", f"expected a number, got {raw_t!r}")
    threshold = F32(raw_t)
    if not np.isfinite(threshold):
        raise ModelFormatError(f"{path}.threshold", f"threshold {raw_t!r} is not finite")
    left = _parse_node(doc["left"], f"{path}.left", n, m)
    right = _parse_node(doc["right"], f"{path}.right", n, m)
    return Internal(feature, threshold, left, right)


def load_model(data: Union[str, bytes, dict]) -> Ensemble:
    if isinstance(data, (str, bytes)):
        try:
            doc = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ModelFormatError("$", f"malformed JSON: {exc}") from exc
    else:
        doc = data
    if not isinstance(doc, dict):
        raise ModelFormatError("$", "top-level value must be an object")
    extra = set(doc) - _TOP_KEYS
    if extra:
        raise ModelFormatError("$", f"unexpected keys {sorted(extra)}")
    n = _require_int(doc, "nb_inputs", "$")
    m = _require_int(doc, "nb_outputs", "$")
    if n < 1:
        raise ModelFormatError("$.nb_inputs", f"must be >= 1, got {n}")
    if m < 1:
        raise ModelFormatError("$.nb_outputs", f"must be >= 1, got {m}")
    if "post_process" not in doc:
        raise ModelFormatError("$", "missing required key 'post_process'")
    try:
        post = PostProcess(doc["post_process"])
    except ValueError:
        raise ModelFormatError(
            "$.post_process",
            f"unknown post-process tag {doc['post_process']!r}; "
            f"expected one of {[p.value for p in PostProcess]}") from None
    raw_trees = doc.get("trees")
    if not isinstance(raw_trees, list) or not raw_trees:
        raise ModelFormatError("$.trees", "expected a non-empty list of trees")
    trees = tuple(
        Tree(_parse_node(node, f"$.trees[{i}]", n, m))
        for i, node in enumerate(raw_trees))
    return Ensemble(trees=trees, n=n, m=m, post=post)


def load_model_file(path) -> Ensemble:
    with open(path, "rb") as handle:
        return load_model(handle.read())


def _node_to_doc(node: Node) -> dict:
    if isinstance(node, Leaf):
        # float(np.float32) is exact; json round-trips it bit-identically
        return {"value": [float(v) for v in node.value]}
    return {
        "feature": node.feature,
        "threshold": float(node.threshold),
        "left": _node_to_doc(node.left),
        "right": _node_to_doc(node.right),
    }


def save_model(e: Ensemble, metadata: dict | None = None) -> str:
    doc = {
        "nb_inputs": e.n,
        "nb_outputs": e.m,
        "post_process": e.post.value,
        "trees": [_node_to_doc(tree.root) for tree in e.trees],
    }
    if metadata is not None:
        doc["metadata"] = metadata
    return json.dumps(doc, indent=2)


def save_model_file(e: Ensemble, path, metadata: dict | None = None) -> None:
    with open(path, "w") as handle:
        handle.write(save_model(e, metadata))
        handle.write("\n")
