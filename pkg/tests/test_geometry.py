import numpy as np
import pytest
from hypothesis import given, strategies as st

from treeverify import Box, Interval, parse_domain, succ32
from treeverify.geometry import side_measure

F32 = np.float32


def box1(lo, hi):
    return Box([lo], [hi])


class TestSplit:
    def test_interior_threshold(self):
        left, right = box1(0, 10).split(0, 5)
        assert left == box1(0, 5)
        assert right == Box([succ32(5)], [10])

    def test_threshold_at_upper_bound(self):
        left, right = box1(0, 10).split(0, 10)
        assert left == box1(0, 10)
        assert right.is_empty

    def test_threshold_below_box(self):
        left, right = box1(6, 10).split(0, 5)
        assert left.is_empty
        assert right == box1(6, 10)

    def test_dim_out_of_range(self):
        with pytest.raises(IndexError):
            box1(0, 1).split(1, 0.5)

    def test_children_are_subsets(self):
        box = Box([0, -1], [10, 1])
        left, right = box.split(0, 3)
        for child in (left, right):
            assert np.all(child.lower >= box.lower)
            assert np.all(child.upper <= box.upper)

    def test_exhaustive_partition_of_float_range(self):
        # every representable float32 in the box falls in exactly one child
        xs = []
        x = F32(0.5)
        while x <= F32(0.5004):
            xs.append(x)
            x = succ32(x)
        box = box1(0.5, 0.5004)
        left, right = box.split(0, 0.50017)
        for x in xs:
            in_left = left.contains([x]) and not left.is_empty
            in_right = right.contains([x]) and not right.is_empty
            assert in_left != in_right


class TestContains:
    def test_inside(self):
        box = Box([0, 0], [1, 1])
        assert box.contains([0.5, 1.0])

    def test_outside_by_one_ulp_scale(self):
        box = Box([0, 0], [1, 1])
        assert not box.contains([1.0000001, 0])

    def test_unbounded_interval_contains_any_finite(self):
        box = Box.full(1)
        assert box.contains([3.4e38])
        assert box.contains([-3.4e38])

    def test_arity_mismatch(self):
        with pytest.raises(ValueError):
            Box.full(2).contains([1.0])


class TestSideMeasure:
    def test_interior(self):
        assert side_measure(Interval(F32(0), F32(10)), 2) == (2, 8)

    def test_clamped_at_zero(self):
        assert side_measure(Interval(F32(0), F32(10)), -1) == (0, 11)

    def test_infinite_side(self):
        left, right = side_measure(Interval(F32(0), F32(np.inf)), 5)
        assert left == 5
        assert right == np.inf

    def test_zero_left_iff_empty_left_split(self):
        iv = Interval(F32(3), F32(10))
        left, _ = side_measure(iv, 2)
        box = Box([iv.lower], [iv.upper])
        left_child, _ = box.split(0, 2)
        assert left == 0
        assert left_child.is_empty


class TestEmptiness:
    def test_inverted_dim(self):
        assert Box([0, 5], [1, 3]).is_empty

    def test_point_box(self):
        assert not box1(0, 0).is_empty

    def test_split_below(self):
        left, _ = box1(6, 10).split(0, 5)
        assert left.is_empty


@given(lo=st.floats(-100, 100, width=32),
       width=st.floats(0, 100, width=32),
       thr=st.floats(-150, 150, width=32))
def test_split_children_disjoint_and_cover(lo, width, thr):
    hi = F32(lo) + F32(width)
    box = box1(lo, hi)
    left, right = box.split(0, thr)
    t = F32(thr)
    # disjoint: left tops out at thr, right starts at succ32(thr)
    if not left.is_empty and not right.is_empty:
        assert left.upper[0] < right.lower[0]
    # cover: both endpoints of the parent land in a child
    for x in (box.lower[0], box.upper[0]):
        assert ((not left.is_empty and left.contains([x]))
                or (not right.is_empty and right.contains([x])))


class TestParseDomain:
    def test_broadcast(self):
        box = parse_domain("0:1", 3)
        assert box == Box([0, 0, 0], [1, 1, 1])

    def test_explicit_with_inf(self):
        box = parse_domain("-inf:inf, 0:2", 2)
        assert box.lower[0] == -np.inf and box.upper[0] == np.inf
        assert box.dim(1) == Interval(F32(0), F32(2))

    def test_arity_mismatch(self):
        with pytest.raises(ValueError):
            parse_domain("0:1,0:1", 3)

    def test_empty_pair_rejected(self):
        with pytest.raises(ValueError):
            parse_domain("2:1", 1)
