"""Train the toy models the exporter test suite converts and cross-checks.

For each model this writes three files into fixtures/:
  <name>.dump.json     library-neutral ensemble dump (input to the converter)
  <name>.ref.json      1000 random sample points with the source library's
                       probabilities and predicted labels (the oracle)
  <name>.testset.csv   the same points as a verifier test-set CSV

Deterministic: fixed seeds everywhere.
"""

from __future__ import annotations

import json
import os
import sys

import numpy as np
from sklearn.datasets import make_classification
from sklearn.ensemble import GradientBoostingClassifier, RandomForestClassifier

sys.path.insert(0, os.path.dirname(__file__))
from dump_sklearn import write_dump

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def write_reference(name: str, clf, rng, n_features: int, lo: float, hi: float,
                    count: int = 1000) -> None:
    points = rng.uniform(lo, hi, size=(count, n_features)).astype(np.float32)
    probabilities = clf.predict_proba(points)
    labels = clf.predict(points)
    with open(os.path.join(FIXTURES, f"{name}.ref.json"), "w") as handle:
        json.dump({
            "points": points.tolist(),
            "probabilities": probabilities.tolist(),
            "labels": labels.tolist(),
        }, handle)
    with open(os.path.join(FIXTURES, f"{name}.testset.csv"), "w") as handle:
        for x, label in zip(points, labels):
            handle.write(",".join(repr(float(v)) for v in x)
                         + f",{int(label)}\n")


def main() -> int:
    os.makedirs(FIXTURES, exist_ok=True)
    rng = np.random.default_rng(31337)

    # single stump on a 2-point, 2-class set
    X = np.asarray([[0.0, 0.0], [1.0, 1.0]])
    y = np.asarray([0, 1])
    stump = RandomForestClassifier(n_estimators=1, max_depth=1,
                                   bootstrap=False, random_state=0).fit(X, y)
    write_dump(stump, os.path.join(FIXTURES, "rf_stump.dump.json"))
    write_reference("rf_stump", stump, rng, 2, -1.0, 2.0)

    # small forest, 3 classes
    Xs, ys = make_classification(n_samples=200, n_features=4, n_informative=3, n_redundant=0,
                                 n_classes=3, n_clusters_per_class=1,
                                 random_state=7)
    forest = RandomForestClassifier(n_estimators=3, max_depth=2,
                                    random_state=7).fit(Xs, ys)
    write_dump(forest, os.path.join(FIXTURES, "rf_small.dump.json"))
    write_reference("rf_small", forest, rng, 4, -4.0, 4.0)

    # 3-class boosting model
    gb3 = GradientBoostingClassifier(n_estimators=5, max_depth=3,
                                     learning_rate=0.5,
                                     random_state=7).fit(Xs, ys)
    write_dump(gb3, os.path.join(FIXTURES, "gb_toy3.dump.json"))
    write_reference("gb_toy3", gb3, rng, 4, -4.0, 4.0)

    # binary boosting model (single raw score per stage)
    Xb, yb = make_classification(n_samples=200, n_features=3, n_informative=2, n_redundant=0,
                                 n_classes=2, random_state=11)
    gb2 = GradientBoostingClassifier(n_estimators=4, max_depth=2,
                                     learning_rate=0.5,
                                     random_state=11).fit(Xb, yb)
    write_dump(gb2, os.path.join(FIXTURES, "gb_binary.dump.json"))
    write_reference("gb_binary", gb2, rng, 3, -4.0, 4.0)

    # a depth-16 request must pass through unchanged
    Xd, yd = make_classification(n_samples=2000, n_features=5,
                                 n_informative=4, n_redundant=0, n_classes=2,
                                 random_state=13, flip_y=0.2)
    gbd = GradientBoostingClassifier(n_estimators=2, max_depth=16,
                                     min_samples_leaf=1, learning_rate=0.5,
                                     random_state=13).fit(Xd, yd)
    write_dump(gbd, os.path.join(FIXTURES, "gb_deep.dump.json"))
    write_reference("gb_deep", gbd, rng, 5, -4.0, 4.0)
    depth = max(e.tree_.max_depth for stage in gbd.estimators_ for e in stage)
    with open(os.path.join(FIXTURES, "gb_deep.meta.json"), "w") as handle:
        json.dump({"max_depth_param": 16, "actual_max_depth": int(depth)}, handle)

    print(f"fixtures written to {os.path.abspath(FIXTURES)}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
