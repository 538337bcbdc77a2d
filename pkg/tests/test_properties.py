import itertools

import numpy as np
import pytest

from treeverify import (Box, Ensemble, PostProcess, RangeSpec,
                        RobustnessQuery, Strategy, Tree, batch_robustness,
                        check_range, check_robustness,
                        check_robustness_sliding_window, classify,
                        load_testset_csv, succ32)
from treeverify.properties import METHOD_APPROXIMATE, METHOD_EXACT

from helpers import two_tree_example, leaf, node, random_ensemble, stump

F32 = np.float32


def rf_style_model():
    # probability-tuple leaves with divisor post: bounds stay within [0, 1]
    t1 = Tree(node(0, 0.3, leaf(0.9, 0.1), leaf(0.2, 0.8)))
    t2 = Tree(node(1, 0.5, leaf(0.7, 0.3), leaf(0.1, 0.9)))
    return Ensemble(trees=(t1, t2), n=2, m=2, post=PostProcess.DIVISOR)


def two_class_stump():
    return stump(0, 0.0, (1, 0), (0, 1), 1)


class TestCheckRange:
    def test_probability_leaves_pass_via_approximation(self):
        e = rf_style_model()
        result = check_range(e, Box.full(2), RangeSpec.of(0, 1, 2))
        assert result.verdict.passed
        assert result.method == METHOD_APPROXIMATE
        assert result.classes_visited == 0

    def test_two_tree_beta3_fails_with_counterexample(self):
        result = check_range(two_tree_example(), Box.full(1),
                             RangeSpec.of(0, 3, 1))
        assert not result.verdict.passed
        assert result.method == METHOD_EXACT
        assert result.verdict.counterexample.region == Box([succ32(5.0)], [np.inf])

    def test_two_tree_tight_spec_passes_approximately(self):
        result = check_range(two_tree_example(), Box.full(1),
                             RangeSpec.of(2, 4, 1))
        assert result.verdict.passed
        assert result.method == METHOD_APPROXIMATE

    def test_invalid_spec_rejected(self):
        with pytest.raises(ValueError):
            RangeSpec.of(1, 0, 1)

    @pytest.mark.parametrize("seed", range(10))
    def test_approximate_pass_implies_exact_pass(self, seed):
        rng = np.random.default_rng(900 + seed)
        e = random_ensemble(rng, 2, 2, 2, 3, post=PostProcess.DIVISOR)
        spec = RangeSpec.of(-5, 5, 2)
        approx = check_range(e, Box.full(2), spec)
        if approx.method == METHOD_APPROXIMATE:
            # force the exact leg by bypassing the approximation
            from treeverify.enumeration import forall
            from treeverify.properties import range_predicate
            assert forall(e, Box.full(2), range_predicate(spec)).passed


class TestCheckRobustness:
    def test_epsilon_zero_passes(self):
        e = two_class_stump()
        q = RobustnessQuery(test_point=[5.0], epsilon=0.0)
        assert check_robustness(e, q).passed

    def test_point_far_from_boundary_passes(self):
        e = two_class_stump()
        q = RobustnessQuery(test_point=[5.0], epsilon=1.0)
        assert check_robustness(e, q).passed

    def test_box_straddling_boundary_fails(self):
        e = two_class_stump()
        q = RobustnessQuery(test_point=[0.5], epsilon=1.0)
        verdict = check_robustness(e, q)
        assert not verdict.passed
        # the counterexample's lower corner concretely violates the property
        corner = verdict.counterexample.region.lower
        assert classify(e, corner) != classify(e, [0.5])

    def test_monotone_in_epsilon(self):
        e = two_class_stump()
        for eps in (0.0, 0.5, 2.0, 4.0):
            q = RobustnessQuery(test_point=[5.0], epsilon=eps)
            assert check_robustness(e, q).passed
        assert not check_robustness(
            e, RobustnessQuery(test_point=[5.0], epsilon=6.0)).passed

    def test_explicit_expected_class(self):
        e = two_class_stump()
        q = RobustnessQuery(test_point=[5.0], epsilon=1.0, expected_class=0)
        assert not check_robustness(e, q).passed

    def test_domain_clamp_can_rescue(self):
        e = two_class_stump()
        q = RobustnessQuery(test_point=[0.5], epsilon=1.0)
        clamped = check_robustness(e, q, domain=Box([0.25], [10.0]))
        assert clamped.passed

    def test_negative_epsilon_rejected(self):
        with pytest.raises(ValueError):
            RobustnessQuery(test_point=[0.0], epsilon=-1.0)


def pixel_stump_model(n, pixel, threshold):
    tree = Tree(node(pixel, threshold, leaf(1, 0), leaf(0, 1)))
    return Ensemble(trees=(tree,), n=n, m=2, post=PostProcess.IDENTITY)


class TestSlidingWindow:
    def test_full_window_equals_plain_check(self):
        e = pixel_stump_model(4, 0, 0.5)
        x = np.asarray([0.2, 0.0, 0.0, 0.0], dtype=F32)
        q = RobustnessQuery(test_point=x, epsilon=1.0)
        full = check_robustness(e, q)
        windowed = check_robustness_sliding_window(e, q, 2, 2, (2, 2), 1)
        assert full.passed == windowed.passed

    def test_window_count_at_stride_one(self):
        e = pixel_stump_model(9, 0, 10.0)
        x = np.zeros(9, dtype=F32)
        report = check_robustness_sliding_window(
            e, RobustnessQuery(test_point=x, epsilon=0.5), 2, 2, (3, 3), 1)
        assert report.passed
        assert len(report.windows) == (3 - 2 + 1) ** 2

    def test_toy_image_matches_corner_oracle(self):
        # 3x3 image, 2x2 window, stump on pixel 0: class regions are boxes,
        # so corner enumeration is a complete oracle per window
        e = pixel_stump_model(9, 0, 0.4)
        x = np.full(9, 0.3, dtype=F32)
        q = RobustnessQuery(test_point=x, epsilon=1.0)
        report = check_robustness_sliding_window(e, q, 2, 2, (3, 3), 1,
                                                 stop_on_failure=False)
        expected = classify(e, x)
        for result in report.windows:
            ox, oy = result.position
            pixels = [(oy + r) * 3 + (ox + c) for r in range(2) for c in range(2)]
            corner_ok = True
            for signs in itertools.product((-1.0, 1.0), repeat=4):
                pt = x.copy()
                for p, s in zip(pixels, signs):
                    pt[p] = F32(pt[p] + F32(s) * F32(1.0))
                if classify(e, pt) != expected:
                    corner_ok = False
            assert result.verdict.passed == corner_ok

    def test_geometry_mismatch(self):
        e = pixel_stump_model(9, 0, 0.4)
        q = RobustnessQuery(test_point=np.zeros(9, dtype=F32), epsilon=1.0)
        with pytest.raises(ValueError):
            check_robustness_sliding_window(e, q, 2, 2, (4, 4), 1)
        with pytest.raises(ValueError):
            check_robustness_sliding_window(e, q, 5, 5, (3, 3), 1)


class TestBatchRobustness:
    def test_empty_test_set(self):
        summary = batch_robustness(two_class_stump(), [], epsilon=1.0)
        assert summary.total == 0 and summary.robust == 0
        assert summary.robustness_pct == 0.0

    def test_far_sample_is_robust(self):
        summary = batch_robustness(two_class_stump(),
                                   [(np.asarray([5.0]), 1)], epsilon=1.0)
        assert summary.robust == 1 and summary.total == 1

    def test_half_robust(self):
        samples = [(np.asarray([5.0]), 1), (np.asarray([0.5]), 1)]
        summary = batch_robustness(two_class_stump(), samples, epsilon=1.0)
        assert summary.robust == 1 and summary.total == 2
        assert summary.robustness_pct == 50.0
        assert summary.failures == [1]

    def test_misclassified_sample_not_robust(self):
        # clean prediction disagrees with the label: skipped, reported apart
        samples = [(np.asarray([5.0]), 0)]
        summary = batch_robustness(two_class_stump(), samples, epsilon=0.1)
        assert summary.robust == 0
        assert summary.misclassified == [0]

    def test_bad_label_reports_row(self):
        with pytest.raises(ValueError, match="sample 0"):
            batch_robustness(two_class_stump(), [(np.asarray([5.0]), 7)],
                             epsilon=0.1)


class TestTestsetCsv:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "set.csv"
        path.write_text("f0,label\n0.5,1\n-2,0\n")
        samples = load_testset_csv(path, 1)
        assert len(samples) == 2
        assert samples[0][0] == np.asarray([0.5], dtype=F32)
        assert samples[1][1] == 0

    def test_no_header(self, tmp_path):
        path = tmp_path / "set.csv"
        path.write_text("0.5,1\n")
        assert len(load_testset_csv(path, 1)) == 1

    def test_bad_row_reports_line(self, tmp_path):
        path = tmp_path / "set.csv"
        path.write_text("0.5,1\n0.2,0.3,1\n")
        with pytest.raises(ValueError, match="row 2"):
            load_testset_csv(path, 1)
