"""treeverify: equivalence-class verification of tree ensembles."""

from .approximation import TreeBounds, ensemble_bounds, tree_bounds
from .enumeration import (CONTINUE, DEFAULT_STRATEGY, STOP, EnumerationStats,
                          Mapping, NumericOverflowError, Strategy, Verdict,
                          count_classes, for_each_class, forall)
from .geometry import Box, Interval, OutputRange, parse_domain, pred32, succ32
from .model import (Ensemble, Internal, Leaf, ModelFormatError, Node,
                    PostProcess, Tree, classify, ensemble_eval, load_model,
                    load_model_file, save_model, save_model_file, softmax32,
                    tree_eval)
from .properties import (BatchSummary, RangeResult, RangeSpec,
                         RobustnessQuery, SlidingWindowReport,
                         batch_robustness, check_range, check_robustness,
                         check_robustness_sliding_window, load_testset_csv)

__version__ = "0.1.0"

__all__ = [
    "Box", "Interval", "OutputRange", "parse_domain", "succ32", "pred32",
    "Ensemble", "Tree", "Node", "Leaf", "Internal", "PostProcess",
    "ModelFormatError", "tree_eval", "ensemble_eval", "classify",
    "load_model", "load_model_file", "save_model", "save_model_file",
    "softmax32",
    "Mapping", "Verdict", "Strategy", "DEFAULT_STRATEGY", "EnumerationStats",
    "NumericOverflowError", "for_each_class", "forall", "count_classes",
    "CONTINUE", "STOP",
    "TreeBounds", "tree_bounds", "ensemble_bounds",
    "RangeSpec", "RangeResult", "RobustnessQuery", "BatchSummary",
    "SlidingWindowReport", "check_range", "check_robustness",
    "check_robustness_sliding_window", "batch_robustness", "load_testset_csv",
]
