"""Train the (type, depth, trees) grid of models used for desk-scale
verification runs and write their ensemble dumps plus an accuracy log.

Forests train on a synthetic 6-feature collision-style dataset (two
interleaved classes of trajectories, locally generated); boosting models
train on the bundled 8x8 digit images with an 85/15 train/test split.
Gradient boosting defaults to a 0.5 learning rate; only the tree count and
maximum depth vary across the grid.

Usage:
  python3 scripts/train_case_study_models.py --type rf --depths 5,10 \\
      --trees 1,2,4,8 --out models/
  python3 scripts/train_case_study_models.py --type gb --depths 5 \\
      --trees 10 --learning-rate 0.5 --out models/

Convert the dumps with: node dist/cli.js convert <dump> --out <model>
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

sys.path.insert(0, os.path.dirname(__file__))
from dump_sklearn import write_dump


def collision_dataset(seed: int = 0):
    """Synthetic 6-feature binary task: two vehicles' (position, speed,
    heading) with label = whether their straight-line paths come close."""
    rng = np.random.default_rng(seed)
    count = 4000
    X = np.column_stack([
        rng.uniform(0, 100, count),    # x distance between vehicles
        rng.uniform(-20, 20, count),   # y offset
        rng.uniform(0, 30, count),     # own speed
        rng.uniform(0, 30, count),     # other speed
        rng.uniform(-1, 1, count),     # own heading (sin)
        rng.uniform(-1, 1, count),     # other heading (sin)
    ])
    closing = X[:, 2] + X[:, 3] * np.cos(np.arcsin(np.clip(X[:, 5], -1, 1)))
    time_to_meet = X[:, 0] / np.maximum(closing, 1e-3)
    lateral = np.abs(X[:, 1] + (X[:, 4] - X[:, 5]) * 10 * time_to_meet)
    y = ((time_to_meet < 6) & (lateral < 8)).astype(int)
    return X, y


def digit_dataset():
    try:
        from sklearn.datasets import load_digits
        digits = load_digits()
    except Exception as exc:  # pragma: no cover - bundled with scikit-learn
        raise SystemExit(
            "digit dataset unavailable: install scikit-learn with its bundled "
            f"datasets (pip install scikit-learn) -- {exc}")
    return digits.data, digits.target


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--type", choices=["rf", "gb"], required=True)
    parser.add_argument("--depths", required=True,
                        help="comma-separated maximum depths")
    parser.add_argument("--trees", required=True,
                        help="comma-separated tree counts")
    parser.add_argument("--learning-rate", type=float, default=0.5)
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    from sklearn.ensemble import (GradientBoostingClassifier,
                                  RandomForestClassifier)
    from sklearn.model_selection import train_test_split

    depths = [int(d) for d in args.depths.split(",")]
    tree_counts = [int(b) for b in args.trees.split(",")]
    os.makedirs(args.out, exist_ok=True)

    if args.type == "rf":
        X, y = collision_dataset(args.seed)
        test_size = 0.2
    else:
        X, y = digit_dataset()
        test_size = 0.15  # 85/15 split for the digit task
    X_train, X_test, y_train, y_test = train_test_split(
        X, y, test_size=test_size, random_state=args.seed)

    log_path = os.path.join(args.out, "accuracy.csv")
    with open(log_path, "w", newline="") as log:
        writer = csv.writer(log)
        writer.writerow(["type", "depth", "trees", "train_acc", "test_acc",
                         "dump"])
        for d in depths:
            for B in tree_counts:
                if args.type == "rf":
                    clf = RandomForestClassifier(
                        n_estimators=B, max_depth=d, random_state=args.seed)
                else:
                    clf = GradientBoostingClassifier(
                        n_estimators=B, max_depth=d,
                        learning_rate=args.learning_rate,
                        random_state=args.seed)
                clf.fit(X_train, y_train)
                name = f"{args.type}_d{d}_B{B}.dump.json"
                write_dump(clf, os.path.join(args.out, name))
                train_acc = clf.score(X_train, y_train)
                test_acc = clf.score(X_test, y_test)
                writer.writerow([args.type, d, B, f"{train_acc:.4f}",
                                 f"{test_acc:.4f}", name])
                print(f"{name}: train {train_acc:.3f}, test {test_acc:.3f}")
    print(f"accuracy log: {log_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
