"""Command-line front end.

Exit codes: 0 = verified / run completed, 1 = property violated,
2 = usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from .enumeration import (DEFAULT_STRATEGY, EnumerationStats, Strategy,
                          count_classes)
from .geometry import Box, parse_domain
from .model import ModelFormatError, classify, ensemble_eval, load_model_file
from .properties import (METHOD_APPROXIMATE, RangeSpec, RobustnessQuery,
                         batch_robustness, check_range, load_testset_csv)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_ERROR = 2


class CliError(Exception):
    pass


def _load(path):
    try:
        return load_model_file(path)
    except (ModelFormatError, OSError) as exc:
        raise CliError(f"cannot load model {path}: {exc}") from exc


def _domain(args, n: int) -> Box:
    if getattr(args, "domain", None):
        try:
            return parse_domain(args.domain, n)
        except ValueError as exc:
            raise CliError(f"bad --domain: {exc}") from exc
    return Box.full(n)


def _strategy(args) -> Strategy:
    try:
        return Strategy.parse(args.strategy)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _parse_row(text: str, n: int) -> np.ndarray:
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != n:
        raise CliError(f"input row has {len(parts)} values, model expects {n}")
    try:
        return np.asarray([float(p) for p in parts], dtype=np.float32)
    except ValueError as exc:
        raise CliError(f"bad input row: {exc}") from exc


def _region_text(box: Box) -> str:
    return ", ".join(f"[{float(lo)}, {float(hi)}]"
                     for lo, hi in zip(box.lower, box.upper))


def _emit(report: dict, as_json: bool, lines: list[str]) -> None:
    if as_json:
        print(json.dumps(report, indent=2))
    else:
        for line in lines:
            print(line)


def cmd_eval(args) -> int:
    e = _load(args.model)
    if args.testset:
        try:
            samples = load_testset_csv(args.testset, e.n)
        except (OSError, ValueError) as exc:
            raise CliError(f"cannot read test set: {exc}") from exc
        rows = [x for x, _ in samples]
    elif args.input is not None:
        rows = [_parse_row(args.input, e.n)]
    else:
        raise CliError("eval needs --input or --testset")
    results = []
    for x in rows:
        out = ensemble_eval(e, x)
        entry = {"outputs": [float(v) for v in out]}
        if e.m >= 2:
            entry["class"] = classify(e, x)
        results.append(entry)
    if args.json:
        print(json.dumps(results, indent=2))
    else:
        for entry in results:
            text = " ".join(repr(v) for v in entry["outputs"])
            if "class" in entry:
                text += f"  class={entry['class']}"
            print(text)
    return EXIT_PASS


def _broadcast_bound(text: str, m: int, flag: str) -> np.ndarray:
    parts = [p for p in text.replace(",", " ").split() if p]
    try:
        values = [float(p) for p in parts]
    except ValueError as exc:
        raise CliError(f"bad {flag}: {exc}") from exc
    if len(values) == 1:
        values = values * m
    if len(values) != m:
        raise CliError(f"{flag} has {len(values)} values, model has {m} outputs")
    return np.asarray(values, dtype=np.float32)


def cmd_check_range(args) -> int:
    e = _load(args.model)
    domain = _domain(args, e.n)
    strategy = _strategy(args)
    alpha = _broadcast_bound(args.alpha, e.m, "--alpha")
    beta = _broadcast_bound(args.beta, e.m, "--beta")
    try:
        spec = RangeSpec.of(alpha, beta, e.m)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    start = time.perf_counter()
    result = check_range(e, domain, spec, strategy=strategy)
    elapsed = time.perf_counter() - start
    verdict = result.verdict
    report = {
        "verdict": "PASS" if verdict.passed else "FAIL",
        "method": result.method,
        "classes_visited": result.classes_visited,
        "elapsed_s": elapsed,
    }
    lines = [
        f"verdict: {report['verdict']}",
        f"method: {result.method}",
        f"classes visited: {result.classes_visited}",
        f"elapsed: {elapsed:.3f}s",
    ]
    if not verdict.passed:
        ce = verdict.counterexample
        report["counterexample"] = {
            "region": _region_text(ce.region),
            "outputs": [float(v) for v in ce.outputs.lower],
        }
        lines.append(f"counterexample region: {_region_text(ce.region)}")
        lines.append(f"counterexample output: {[float(v) for v in ce.outputs.lower]}")
    _emit(report, args.json, lines)
    return EXIT_PASS if verdict.passed else EXIT_FAIL


def _parse_ints(text: str, count: int, flag: str) -> tuple[int, ...]:
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != count:
        raise CliError(f"{flag} expects {count} comma-separated integers")
    try:
        return tuple(int(p) for p in parts)
    except ValueError as exc:
        raise CliError(f"bad {flag}: {exc}") from exc


def cmd_check_robustness(args) -> int:
    e = _load(args.model)
    strategy = _strategy(args)
    if args.epsilon < 0:
        raise CliError("--epsilon must be non-negative")
    window = None
    image_dims = None
    if args.window:
        if not args.image_dims:
            raise CliError("--window requires --image-dims")
        window = _parse_ints(args.window, 3, "--window")
        image_dims = _parse_ints(args.image_dims, 2, "--image-dims")
    elif args.image_dims:
        raise CliError("--image-dims requires --window")
    domain = None
    if args.domain:
        domain = _domain(args, e.n)
    try:
        samples = load_testset_csv(args.testset, e.n)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read test set: {exc}") from exc
    start = time.perf_counter()
    try:
        summary = batch_robustness(e, samples, args.epsilon, window=window,
                                   image_dims=image_dims, strategy=strategy,
                                   domain=domain)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    elapsed = time.perf_counter() - start
    report = {
        "robustness_pct": summary.robustness_pct,
        "robust": summary.robust,
        "total": summary.total,
        "misclassified": summary.misclassified,
        "failures": summary.failures,
        "elapsed_s": elapsed,
    }
    lines = [
        f"robustness: {summary.robustness_pct:.1f}% ({summary.robust}/{summary.total})",
        f"misclassified samples: {summary.misclassified}",
        f"non-robust samples: {summary.failures}",
        f"elapsed: {elapsed:.3f}s",
    ]
    _emit(report, args.json, lines)
    return EXIT_PASS


def cmd_count_classes(args) -> int:
    e = _load(args.model)
    domain = _domain(args, e.n)
    strategy = _strategy(args)
    stats = EnumerationStats()
    start = time.perf_counter()
    count = count_classes(e, domain, strategy=strategy, stats=stats)
    elapsed = time.perf_counter() - start
    report = {
        "classes": count,
        "nodes_visited": stats.nodes_visited,
        "elapsed_s": elapsed,
    }
    lines = [
        f"classes: {count}",
        f"nodes visited: {stats.nodes_visited}",
        f"elapsed: {elapsed:.3f}s",
    ]
    _emit(report, args.json, lines)
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treeverify",
        description="Verify input-output properties of tree ensembles.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, domain=True):
        p.add_argument("model", help="model JSON file")
        if domain:
            p.add_argument("--domain", help="per-dimension lo:hi pairs, comma-"
                           "separated; one pair broadcasts to all dimensions")
        p.add_argument("--strategy", default="least-points",
                       choices=["left", "right", "least-points"],
                       help="node selection strategy (default: least-points)")
        p.add_argument("--json", action="store_true",
                       help="machine-readable report")

    p = sub.add_parser("eval", help="evaluate the model on input points")
    p.add_argument("model")
    p.add_argument("--input", help="one comma-separated feature row")
    p.add_argument("--testset", help="CSV of feature rows + label column")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("check-range", help="plausibility-of-range property")
    common(p)
    p.add_argument("--alpha", default="0", help="lower output bounds")
    p.add_argument("--beta", default="1", help="upper output bounds")
    p.set_defaults(func=cmd_check_range)

    p = sub.add_parser("check-robustness",
                       help="robustness against noise over a test set")
    common(p)
    p.add_argument("--testset", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--window", help="W,H,STRIDE sliding window")
    p.add_argument("--image-dims", help="W,H image geometry")
    p.set_defaults(func=cmd_check_robustness)

    p = sub.add_parser("count-classes", help="count equivalence classes")
    common(p)
    p.set_defaults(func=cmd_count_classes)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
