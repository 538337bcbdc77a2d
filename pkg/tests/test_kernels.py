"""Parity between the numba build and the interpreted build of the hot
kernels, and between the kernels and the callback engine."""

import numpy as np
import pytest

from treeverify import (Box, PostProcess, Strategy, ensemble_eval, forall)
from treeverify import kernels
from treeverify.kernels import (MODE_ARGMAX, MODE_COUNT, MODE_RANGE,
                                flatten, predict_batch, run_enumeration)
from treeverify.properties import strict_argmax_predicate

from helpers import two_tree_example, random_ensemble, stump

F32 = np.float32


class TestDeterministicExp:
    def test_accurate_against_libm(self):
        import math
        from treeverify.fastexp import _exp64
        rng = np.random.default_rng(7)
        for x in rng.uniform(-90.0, 90.0, size=5000):
            ref = math.exp(x)
            assert abs(_exp64(float(x)) - ref) <= 4e-16 * ref

    def test_jit_matches_interpreter_bitwise(self):
        from treeverify import fastexp
        if fastexp.exp64 is fastexp._exp64:
            pytest.skip("no jit build available")
        rng = np.random.default_rng(8)
        xs = rng.uniform(-90.0, 90.0, size=20000)
        for x in xs:
            assert fastexp.exp64(float(x)) == fastexp._exp64(float(x))

    def test_extremes(self):
        from treeverify.fastexp import _exp64
        assert _exp64(0.0) == 1.0
        assert _exp64(1000.0) == np.inf
        assert _exp64(-1000.0) == 0.0
        assert np.isnan(_exp64(float("nan")))


@pytest.fixture
def no_jit(monkeypatch):
    monkeypatch.setenv(kernels.ENV_DISABLE, "1")


def test_env_flag_disables_jit(no_jit):
    assert not kernels.jit_enabled()


def test_jit_enabled_by_default(monkeypatch):
    monkeypatch.delenv(kernels.ENV_DISABLE, raising=False)
    assert kernels.jit_enabled() == kernels.HAVE_NUMBA


@pytest.mark.parametrize("post", list(PostProcess))
def test_predict_batch_matches_reference_eval(post):
    rng = np.random.default_rng(11)
    e = random_ensemble(rng, 3, 2, 3, 4, post=post)
    X = rng.uniform(-4, 4, size=(200, 3)).astype(F32)
    flat = flatten(e)
    fast = predict_batch(flat, X)
    for i, x in enumerate(X):
        assert fast[i].tobytes() == ensemble_eval(e, x).tobytes()


def test_predict_batch_parity_across_builds(monkeypatch):
    rng = np.random.default_rng(12)
    e = random_ensemble(rng, 2, 3, 2, 3, post=PostProcess.SOFTMAX)
    X = rng.uniform(-4, 4, size=(64, 2)).astype(F32)
    flat = flatten(e)
    monkeypatch.delenv(kernels.ENV_DISABLE, raising=False)
    jit_out = predict_batch(flat, X)
    monkeypatch.setenv(kernels.ENV_DISABLE, "1")
    pure_out = predict_batch(flat, X)
    assert jit_out.tobytes() == pure_out.tobytes()


@pytest.mark.parametrize("strategy", list(Strategy))
def test_enumeration_parity_across_builds(monkeypatch, strategy):
    rng = np.random.default_rng(13)
    for _ in range(5):
        e = random_ensemble(rng, 2, 2, 3, 4)
        flat = flatten(e)
        lo, hi = Box.full(2).lower, Box.full(2).upper
        monkeypatch.delenv(kernels.ENV_DISABLE, raising=False)
        jit_res = run_enumeration(flat, lo, hi, strategy.value, MODE_COUNT)
        monkeypatch.setenv(kernels.ENV_DISABLE, "1")
        pure_res = run_enumeration(flat, lo, hi, strategy.value, MODE_COUNT)
        assert jit_res[:3] == pure_res[:3]


@pytest.mark.parametrize("strategy", list(Strategy))
def test_kernel_matches_callback_engine_on_failures(strategy):
    # same strategy => same visit order => same first counterexample
    rng = np.random.default_rng(14)
    for _ in range(10):
        e = stump(0, float(rng.uniform(-1, 1)), (1, 0), (0, 1), 1)
        flat = flatten(e)
        box = Box([-2.0], [2.0])
        status, count, visited, fail_lo, fail_hi, fail_out = run_enumeration(
            flat, box.lower, box.upper, strategy.value, MODE_ARGMAX, expected=0)
        verdict = forall(e, box, strict_argmax_predicate(0), strategy=strategy)
        assert (status == kernels.STATUS_FAIL) == (not verdict.passed)
        if not verdict.passed:
            ce = verdict.counterexample
            assert fail_lo.tobytes() == ce.region.lower.tobytes()
            assert fail_hi.tobytes() == ce.region.upper.tobytes()
            assert fail_out.tobytes() == ce.outputs.lower.tobytes()


def test_kernel_range_mode_matches_engine():
    e = two_tree_example()
    flat = flatten(e)
    box = Box.full(1)
    alpha = np.asarray([0.0], dtype=F32)
    beta = np.asarray([3.0], dtype=F32)
    status, count, visited, fail_lo, fail_hi, fail_out = run_enumeration(
        flat, box.lower, box.upper, Strategy.LEFT_FIRST.value, MODE_RANGE,
        alpha=alpha, beta=beta)
    assert status == kernels.STATUS_FAIL
    assert fail_out[0] == 4.0


def test_kernel_visit_counts_match_engine():
    from treeverify import EnumerationStats, for_each_class
    rng = np.random.default_rng(15)
    for strategy in Strategy:
        e = random_ensemble(rng, 2, 1, 2, 4)
        stats = EnumerationStats()
        for_each_class(e, Box.full(2), lambda mp: None, strategy=strategy,
                       stats=stats)
        flat = flatten(e)
        _, count, visited, *_ = run_enumeration(
            flat, Box.full(2).lower, Box.full(2).upper, strategy.value,
            MODE_COUNT)
        assert count == stats.classes_emitted
        assert visited == stats.nodes_visited
