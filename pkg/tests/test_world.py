import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roversim.hardware import DriveState
from roversim.world import (
    ChassisConfig,
    Pose,
    Rect,
    World,
    WorldParseError,
    WorldValidationError,
    collision_check,
    load_world,
    normalize_heading,
    raycast,
    raycast_fan,
    step_kinematics,
)


# ---------------------------------------------------------------- world file

def test_load_empty_world():
    w = load_world("bounds 20 20\n")
    assert w.bounds == Rect(0.0, 0.0, 20.0, 20.0)
    assert w.obstacles == ()


def test_load_single_obstacle():
    w = load_world("bounds 20 20\nrect 5 5 1 1\n")
    assert w.obstacles == (Rect(5.0, 5.0, 1.0, 1.0),)


def test_obstacle_outside_bounds_rejected():
    with pytest.raises(WorldValidationError):
        load_world("bounds 20 20\nrect 25 5 1 1\n")


def test_comments_and_blank_lines_skipped():
    text = "# habitat pen\n\nbounds 10 8\n# wall\nrect 4 0 1 8\n"
    w = load_world(text)
    assert w.bounds.w == 10.0 and len(w.obstacles) == 1


def test_unknown_keyword_reports_line():
    with pytest.raises(WorldParseError) as exc:
        load_world("bounds 10 10\ncircle 1 2 3\n")
    assert exc.value.line == 2


def test_malformed_numbers_report_line():
    with pytest.raises(WorldParseError) as exc:
        load_world("bounds 10 ten\n")
    assert exc.value.line == 1


def test_missing_bounds_is_error():
    with pytest.raises(WorldParseError):
        load_world("# nothing here\n")


def test_obstacle_order_preserved():
    w = load_world("bounds 9 9\nrect 1 1 1 1\nrect 3 3 1 1\nrect 5 5 1 1\n")
    assert [r.x for r in w.obstacles] == [1.0, 3.0, 5.0]


# ------------------------------------------------------------- kinematics

CFG = ChassisConfig()


def test_straight_line_step():
    pose = step_kinematics(Pose(0, 0, 0), DriveState(0.5, 0.0), CFG, 0.1)
    assert pose.x == pytest.approx(0.05, abs=1e-15)
    assert pose.y == 0.0
    assert pose.heading == 0.0


def test_zero_speed_holds_pose():
    start = Pose(3.0, 4.0, 1.25)
    pose = step_kinematics(start, DriveState(0.0, math.radians(20)), CFG, 0.5)
    assert pose == start


def _euler_trajectory(v, steer, wheelbase, dt, total_time):
    """Independent fine-step reference: plain forward Euler, no shared code."""
    n = round(total_time / dt)
    x = y = heading = 0.0
    omega = v * math.tan(steer) / wheelbase
    points = [(x, y)]
    for _ in range(n):
        x += v * math.cos(heading) * dt
        y += v * math.sin(heading) * dt
        heading += omega * dt
        points.append((x, y))
    return points


def _max_distance_to_polyline(points, poly):
    arr = np.asarray(poly)
    a, b = arr[:-1], arr[1:]
    ab = b - a
    ab2 = (ab * ab).sum(axis=1)
    worst = 0.0
    for p in points:
        ap = np.asarray(p) - a
        t = np.clip((ap * ab).sum(axis=1) / ab2, 0.0, 1.0)
        proj = a + ab * t[:, None]
        d = np.hypot(*(np.asarray(p) - proj).T).min()
        worst = max(worst, d)
    return worst


def test_constant_turn_matches_fine_reference():
    # One full heading wrap of a 20 degree turn at 0.2 m/s.
    v, steer, wb, dt = 0.2, math.radians(20), 0.15, 0.01
    omega = v * math.tan(steer) / wb
    wrap_time = 2 * math.pi / omega
    pose = Pose(0, 0, 0)
    drive = DriveState(v, steer)
    coarse = [(0.0, 0.0)]
    t = 0.0
    while t < wrap_time:
        pose = step_kinematics(pose, drive, ChassisConfig(wheelbase=wb), dt)
        coarse.append((pose.x, pose.y))
        t += dt
    radius = wb / math.tan(steer)
    assert radius == pytest.approx(0.4121, abs=1e-4)
    reference = _euler_trajectory(v, steer, wb, 1e-5, wrap_time)[::100]
    assert _max_distance_to_polyline(coarse, reference) < 1e-3


def test_heading_wraps_into_range():
    pose = Pose(0, 0, 6.2)
    drive = DriveState(0.5, math.radians(30))
    for _ in range(200):
        pose = step_kinematics(pose, drive, CFG, 0.05)
        assert 0.0 <= pose.heading < 2 * math.pi


def test_step_is_pure():
    pose = Pose(1.0, 2.0, 0.3)
    drive = DriveState(0.35, -0.2)
    a = step_kinematics(pose, drive, CFG, 0.02)
    b = step_kinematics(pose, drive, CFG, 0.02)
    assert (a.x, a.y, a.heading) == (b.x, b.y, b.heading)


# ---------------------------------------------------------------- raycast

def _world(*rects, bounds=(40, 40)):
    return World(Rect(0, 0, *bounds), tuple(Rect(*r) for r in rects))


def test_raycast_perpendicular_wall():
    # spec geometry is origin-centric; shift everything into positive space
    w = _world((22, 19, 1, 2))
    assert raycast(w, (20, 20), (1.0, 0.0), 4.0) == pytest.approx(2.0, abs=1e-12)


def test_raycast_miss_returns_none():
    w = _world()
    assert raycast(w, (20, 20), (1.0, 0.0), 4.0) is None


def _dense_sample_first_hit(rect, origin, direction, max_range, step=1e-5):
    """Independent oracle: walk the ray and report the first point inside."""
    x0, y0, x1, y1 = rect
    t = 0.0
    while t <= max_range:
        px = origin[0] + t * direction[0]
        py = origin[1] + t * direction[1]
        if x0 <= px <= x1 and y0 <= py <= y1:
            return t
        t += step
    return None


def test_raycast_diagonal_matches_dense_sampling():
    w = _world((21, 21, 1, 1))
    d = (math.cos(math.radians(45)), math.sin(math.radians(45)))
    got = raycast(w, (20, 20), d, 4.0)
    assert got == pytest.approx(math.sqrt(2), abs=1e-12)
    oracle = _dense_sample_first_hit((21, 21, 22, 22), (20, 20), d, 4.0)
    assert abs(got - oracle) < 2e-5


def test_raycast_hits_world_bounds():
    w = _world(bounds=(10, 10))
    assert raycast(w, (5, 5), (1.0, 0.0), 20.0) == pytest.approx(5.0)


def test_raycast_from_inside_obstacle_exits_at_edge():
    w = _world((18, 18, 4, 4))
    assert raycast(w, (20, 20), (1.0, 0.0), 10.0) == pytest.approx(2.0)


@st.composite
def _ray_cases(draw):
    rects = draw(
        st.lists(
            st.tuples(
                st.floats(1, 30), st.floats(1, 30), st.floats(0.2, 8), st.floats(0.2, 8)
            ),
            max_size=6,
        )
    )
    rects = [(x, y, min(w, 39 - x), min(h, 39 - y)) for x, y, w, h in rects]
    ox = draw(st.floats(0.5, 39.0))
    oy = draw(st.floats(0.5, 39.0))
    ang = draw(st.floats(0, 2 * math.pi))
    rng = draw(st.floats(0.5, 60.0))
    return rects, (ox, oy), ang, rng


@given(_ray_cases())
@settings(max_examples=150, deadline=None)
def test_raycast_properties(case):
    rects, origin, ang, max_range = case
    w = _world(*rects)
    d = (math.cos(ang), math.sin(ang))
    hit = raycast(w, origin, d, max_range)
    if hit is not None:
        assert 0.0 <= hit <= max_range
        # extending the range never changes a hit
        assert raycast(w, origin, d, max_range + 5.0) == hit
        # re-cast from just before the hit point lands within eps + 1e-9
        eps = min(1e-4, hit)
        near = (origin[0] + (hit - eps) * d[0], origin[1] + (hit - eps) * d[1])
        again = raycast(w, near, d, max_range)
        assert again is not None and again <= eps + 1e-9


@given(_ray_cases())
@settings(max_examples=100, deadline=None)
def test_fan_matches_scalar_raycast(case):
    rects, origin, ang, max_range = case
    w = _world(*rects)
    angles = [ang + k * 0.13 for k in range(7)]
    dx = np.array([math.cos(a) for a in angles])
    dy = np.array([math.sin(a) for a in angles])
    depths = raycast_fan(w, origin, dx, dy)
    for i, a in enumerate(angles):
        scalar = raycast(w, origin, (math.cos(a), math.sin(a)), math.inf)
        if scalar is None:
            assert depths[i] == math.inf
        else:
            assert depths[i] == scalar


# ------------------------------------------------------------- collision

def test_no_collision_in_empty_world():
    w = _world()
    assert collision_check(w, Pose(20, 20, 0), 0.12) is False


def test_collision_inside_obstacle():
    w = _world((19, 19, 2, 2))
    assert collision_check(w, Pose(20, 20, 0), 0.12) is True


def test_tangency_is_not_collision():
    w = _world((21, 19, 1, 2))
    # disc edge exactly touching the rect's left face
    assert collision_check(w, Pose(20.88, 20, 0), 0.12) is False
    assert collision_check(w, Pose(20.89, 20, 0), 0.12) is True


def test_leaving_bounds_is_collision():
    w = _world(bounds=(10, 10))
    assert collision_check(w, Pose(0.12, 5, 0), 0.12) is False
    assert collision_check(w, Pose(0.11, 5, 0), 0.12) is True


# ------------------------------------------------------------ normalization

@given(st.floats(-1000.0, 1000.0))
def test_normalize_heading_range(h):
    n = normalize_heading(h)
    assert 0.0 <= n < 2 * math.pi
