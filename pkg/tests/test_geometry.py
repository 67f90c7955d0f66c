import math

import pytest
from hypothesis import given, strategies as st

from crowdsweep import Vec2
from crowdsweep.errors import DegenerateDirection, InfiniteIntersections, NonFinite
from crowdsweep.geometry import (angle_between_deg, circle_circle_intersections,
                                 rotate_about, segment_circle_first_hit, signed_angle_deg,
                                 unit_direction)

coords = st.floats(-100, 100, allow_nan=False, allow_infinity=False)


def test_vector_arithmetic():
    a, b = Vec2(1.0, 2.0), Vec2(-3.0, 0.5)
    assert a + b == Vec2(-2.0, 2.5)
    assert a - b == Vec2(4.0, 1.5)
    assert a * 2 == Vec2(2.0, 4.0)
    assert a.dot(b) == -2.0
    assert a.cross(b) == 1.0 * 0.5 - 2.0 * -3.0
    assert Vec2(3.0, 4.0).norm() == 5.0
    assert a.perp().dot(a) == 0.0


def test_vec2_rejects_nan():
    with pytest.raises((NonFinite, ValueError)):
        Vec2(float("nan"), 0.0)


def test_unit_direction_points_away_from_second_argument():
    u = unit_direction(Vec2(0.0, 10.0), Vec2(0.0, 0.0))
    assert u == Vec2(0.0, 1.0)
    with pytest.raises(DegenerateDirection):
        unit_direction(Vec2(1.0, 1.0), Vec2(1.0, 1.0))


def test_tangent_points_from_thales_circle():
    obs, R, des = Vec2(0.0, 24.0), 6.0, Vec2(0.0, 0.0)
    pts = circle_circle_intersections(obs, R, (obs + des) * 0.5, 12.0)
    assert len(pts) == 2
    for p in pts:
        assert p.y == pytest.approx(22.5, abs=1e-12)
        assert abs(p.x) == pytest.approx(math.sqrt(36 - 2.25), abs=1e-12)
        # tangency: radius is orthogonal to the sight line
        assert (p - obs).dot(p - des) == pytest.approx(0.0, abs=1e-9)


def test_circle_intersection_cases():
    assert circle_circle_intersections(Vec2(0, 0), 1.0, Vec2(5, 0), 1.0) == []
    touching = circle_circle_intersections(Vec2(0, 0), 1.0, Vec2(2, 0), 1.0)
    assert len(touching) == 1 and touching[0] == Vec2(1.0, 0.0)
    with pytest.raises(InfiniteIntersections):
        circle_circle_intersections(Vec2(0, 0), 1.0, Vec2(0, 0), 1.0)


def test_first_hit_fraction():
    mu = segment_circle_first_hit(Vec2(0, 48), Vec2(0, 0), Vec2(0, 24), 6.0)
    assert mu == pytest.approx(0.375, abs=1e-15)
    assert segment_circle_first_hit(Vec2(10, 48), Vec2(10, 0), Vec2(0, 24), 6.0) is None
    # starting on the circle counts as an immediate hit
    assert segment_circle_first_hit(Vec2(0, 30), Vec2(0, 0), Vec2(0, 24), 6.0) == pytest.approx(0.0)


def test_angles_and_rotation():
    assert angle_between_deg(Vec2(1, 0), Vec2(0, 1)) == pytest.approx(90.0)
    assert signed_angle_deg(Vec2(1, 0), Vec2(0, -1)) == pytest.approx(-90.0)
    p = rotate_about(Vec2(2, 0), Vec2(1, 0), 90.0, 1)
    assert p.x == pytest.approx(1.0) and p.y == pytest.approx(1.0)
    q = rotate_about(Vec2(2, 0), Vec2(1, 0), 90.0, -1)
    assert q.y == pytest.approx(-1.0)


@given(coords, coords, st.floats(0.1, 50), st.floats(-360, 360))
def test_rotation_preserves_radius(x, y, r, ang):
    c = Vec2(x, y)
    p = c + Vec2(r, 0.0)
    assert (rotate_about(p, c, ang, 1) - c).norm() == pytest.approx(r, rel=1e-12)


@given(coords, coords, coords, coords)
def test_angle_between_is_symmetric_and_bounded(a, b, c, d):
    u, v = Vec2(a, b), Vec2(c, d)
    if u.norm() < 1e-6 or v.norm() < 1e-6:
        return
    th = angle_between_deg(u, v)
    assert 0.0 <= th <= 180.0
    assert th == pytest.approx(angle_between_deg(v, u), abs=1e-9)
