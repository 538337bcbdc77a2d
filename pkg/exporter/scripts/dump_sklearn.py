"""Serialize fitted scikit-learn tree ensembles into the exporter's
library-neutral dump format (node arrays per tree, JSON).

The TypeScript converter turns these dumps into verifier model files;
keeping the Python side to raw array extraction means all format decisions
(threshold flooring, leaf normalization, softmax wiring) live in one place.
"""

from __future__ import annotations

import json

import numpy as np
import sklearn


def _dump_tree(tree_, value_rows) -> dict:
    return {
        "children_left": tree_.children_left.tolist(),
        "children_right": tree_.children_right.tolist(),
        "feature": tree_.feature.tolist(),
        "threshold": tree_.threshold.tolist(),
        "value": value_rows,
    }


def _params_echo(clf) -> dict:
    keep = ("n_estimators", "max_depth", "learning_rate", "criterion",
            "min_samples_leaf", "random_state")
    params = clf.get_params()
    return {k: params[k] for k in keep if k in params}


def dump_random_forest(clf) -> dict:
    trees = []
    for est in clf.estimators_:
        t = est.tree_
        counts = np.asarray(t.value[:, 0, :], dtype=np.float64)
        trees.append(_dump_tree(t, counts.tolist()))
    return {
        "library": "scikit-learn",
        "library_version": sklearn.__version__,
        "kind": "random_forest",
        "n_features": int(clf.n_features_in_),
        "n_classes": int(clf.n_classes_),
        "params": _params_echo(clf),
        "trees": trees,
    }


def dump_gradient_boosting(clf) -> dict:
    columns = int(clf.estimators_.shape[1])
    n = int(clf.n_features_in_)
    lr = float(clf.learning_rate)

    # recover the constant initial raw prediction through the public API:
    # decision_function = init + lr * sum of tree predictions
    X0 = np.zeros((1, n))
    raw0 = np.atleast_2d(clf.decision_function(X0))[0].astype(np.float64)
    contrib = np.zeros(columns)
    for stage in clf.estimators_:
        for k in range(columns):
            contrib[k] += lr * float(stage[k].predict(X0)[0])
    init_raw = raw0[-columns:] - contrib

    stages = []
    for stage in clf.estimators_:
        row = []
        for k in range(columns):
            t = stage[k].tree_
            values = np.asarray(t.value[:, 0, :], dtype=np.float64)
            row.append(_dump_tree(t, values.tolist()))
        stages.append(row)
    return {
        "library": "scikit-learn",
        "library_version": sklearn.__version__,
        "kind": "gradient_boosting",
        "n_features": n,
        "n_classes": int(clf.n_classes_),
        "learning_rate": lr,
        "columns": columns,
        "init_raw": init_raw.tolist(),
        "params": _params_echo(clf),
        "stages": stages,
    }


def dump_model(clf) -> dict:
    from sklearn.ensemble import (GradientBoostingClassifier,
                                  RandomForestClassifier)
    if isinstance(clf, RandomForestClassifier):
        return dump_random_forest(clf)
    if isinstance(clf, GradientBoostingClassifier):
        return dump_gradient_boosting(clf)
    raise TypeError(f"unsupported model type {type(clf).__name__}")


def write_dump(clf, path) -> None:
    with open(path, "w") as handle:
        json.dump(dump_model(clf), handle)
        handle.write("\n")
