import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ringsync.errors import OverlappingTrajectoriesError
from ringsync.geometry import (Circle, ClosedPath, Point2, line_angle,
                               line_angle_points, link_positions, min_distance,
                               norm_angle, norm_line_angle, position_at)

TWO_PI = 2.0 * math.pi


@given(st.floats(-50.0, 50.0))
def test_norm_angle_range_and_periodicity(a):
    x = norm_angle(a)
    assert 0.0 <= x < TWO_PI
    assert abs(norm_angle(a + TWO_PI) - x) < 1e-9


@given(st.floats(-50.0, 50.0))
def test_norm_line_angle_range(a):
    x = norm_line_angle(a)
    assert 0.0 <= x < math.pi
    assert abs(norm_line_angle(a + math.pi) - x) < 1e-9 or \
        abs(abs(norm_line_angle(a + math.pi) - x) - math.pi) < 1e-9


def test_link_positions_collinear():
    ci = Circle(Point2(0.0, 0.0))
    cj = Circle(Point2(2.4, 0.0))
    phi_ij, phi_ji = link_positions(ci, cj)
    assert phi_ij == pytest.approx(0.0, abs=1e-12)
    assert phi_ji == pytest.approx(math.pi, abs=1e-12)


@given(st.floats(-5.0, 5.0), st.floats(-5.0, 5.0))
def test_link_positions_antipodal(dx, dy):
    if math.hypot(dx, dy) < 2.05:
        return
    ci = Circle(Point2(0.0, 0.0))
    cj = Circle(Point2(dx, dy))
    phi_ij, phi_ji = link_positions(ci, cj)
    assert norm_angle(phi_ji - phi_ij - math.pi) == pytest.approx(0.0, abs=1e-9) or \
        norm_angle(phi_ji - phi_ij - math.pi) == pytest.approx(TWO_PI, abs=1e-9)


def test_line_angle_symmetric_and_bounded():
    ci = Circle(Point2(0.0, 0.0))
    cj = Circle(Point2(2.2, 2.2))
    b = line_angle(ci, cj)
    assert 0.0 <= b < math.pi
    assert line_angle(cj, ci) == pytest.approx(b, abs=1e-12)
    assert b == pytest.approx(math.pi / 4.0, abs=1e-12)


def test_line_angle_points_vertical():
    assert line_angle_points(Point2(1.0, 0.0), Point2(1.0, 3.0)) == \
        pytest.approx(math.pi / 2.0, abs=1e-12)


def unit_square(x0=0.0, y0=0.0, side=1.0):
    return ClosedPath(np.array([[x0, y0], [x0 + side, y0],
                                [x0 + side, y0 + side], [x0, y0 + side]]))


def test_closed_path_length_and_position():
    sq = unit_square()
    assert sq.length == pytest.approx(4.0)
    p = position_at(sq, 0.5)
    assert (p.x, p.y) == (pytest.approx(0.5), pytest.approx(0.0))
    p = position_at(sq, 2.5)
    assert (p.x, p.y) == (pytest.approx(0.5), pytest.approx(1.0))


@given(st.floats(-20.0, 20.0))
def test_position_at_periodic(s):
    sq = unit_square()
    p = position_at(sq, s)
    q = position_at(sq, s + sq.length)
    assert (p.x, p.y) == (pytest.approx(q.x, abs=1e-9), pytest.approx(q.y, abs=1e-9))


def test_self_intersecting_path_rejected():
    bowtie = np.array([[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(Exception):
        ClosedPath(bowtie)


def test_min_distance_parallel_squares():
    a = unit_square(0.0, 0.0)
    b = unit_square(1.4, 0.0)
    d, si, sj = min_distance(a, b)
    assert d == pytest.approx(0.4, abs=1e-12)
    # closest points sit on the facing edges
    pa, pb = position_at(a, si), position_at(b, sj)
    assert pa.x == pytest.approx(1.0, abs=1e-9)
    assert pb.x == pytest.approx(1.4, abs=1e-9)


def test_min_distance_symmetry():
    a = unit_square(0.0, 0.0)
    b = unit_square(2.0, 1.5)
    d1, _, _ = min_distance(a, b)
    d2, _, _ = min_distance(b, a)
    assert d1 == pytest.approx(d2, abs=1e-12)


def test_min_distance_brute_force_agreement():
    rng = np.random.default_rng(3)
    a = unit_square(0.0, 0.0)
    for _ in range(20):
        dx, dy = rng.uniform(1.5, 4.0), rng.uniform(-2.0, 2.0)
        b = unit_square(dx, dy)
        d, _, _ = min_distance(a, b)
        ss = np.linspace(0.0, 4.0, 400, endpoint=False)
        pa = np.array([[position_at(a, s).x, position_at(a, s).y] for s in ss])
        pb = np.array([[position_at(b, s).x, position_at(b, s).y] for s in ss])
        brute = np.min(np.hypot(pa[:, None, 0] - pb[None, :, 0],
                                pa[:, None, 1] - pb[None, :, 1]))
        assert d <= brute + 1e-9
        assert brute - d < 0.05  # sampling resolution bound


def test_intersecting_paths_rejected():
    a = unit_square(0.0, 0.0)
    b = unit_square(0.5, 0.5)
    with pytest.raises(OverlappingTrajectoriesError):
        min_distance(a, b)


def test_circle_point_at():
    c = Circle(Point2(1.0, 2.0))
    p = c.point_at(math.pi / 2.0)
    assert (p.x, p.y) == (pytest.approx(1.0), pytest.approx(3.0))
