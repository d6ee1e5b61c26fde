from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from birdbench.geometry import (
    Box,
    Circle,
    HollowBox,
    Polyline,
    Vec2,
    find_supporters,
    first_obstruction,
    parabola_y,
    sample_trajectory,
    segment_shape_hit,
    solve_launch_angles,
    trajectory_blockers,
)


class Obstacle:
    def __init__(self, id, shape, x, y, angle=0.0, kind="block"):
        self.id = id
        self.shape = shape
        self.x = x
        self.y = y
        self.angle = angle
        self.kind = kind


def bisect_angle(v, g, target, lo, hi, steps=200):
    """Independent root finder on f(a) = parabola_y(a, x_t) - y_t."""

    def f(a):
        return parabola_y(a, v, g, target.x) - target.y

    flo = f(lo)
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (flo < 0) == (fm < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestSolveLaunchAngles:
    def test_max_range_collapses_to_45_degrees(self):
        sol = solve_launch_angles(10.0, 10.0, Vec2(10.0, 0.0))
        assert sol.reachable
        assert sol.low_angle == pytest.approx(math.radians(45.0), abs=1e-9)
        assert sol.high_angle == pytest.approx(math.radians(45.0), abs=1e-9)

    def test_beyond_max_range_unreachable(self):
        sol = solve_launch_angles(10.0, 10.0, Vec2(20.0, 0.0))
        assert not sol.reachable

    def test_agrees_with_bisection_oracle(self):
        # Oracle: bisection over the analytic flight equation, independent
        # of the closed form under test.
        v, g = 20.0, 9.8
        target = Vec2(30.0, 5.0)
        sol = solve_launch_angles(v, g, target)
        assert sol.reachable
        apex = math.atan2(v * v, g * target.x)  # angle of maximum reach along this ray
        low_oracle = bisect_angle(v, g, target, math.radians(1e-6), apex)
        high_oracle = bisect_angle(v, g, target, apex, math.radians(90.0) - 1e-9)
        assert sol.low_angle == pytest.approx(low_oracle, abs=1e-9)
        assert sol.high_angle == pytest.approx(high_oracle, abs=1e-9)

    def test_rejects_targets_behind_launch(self):
        with pytest.raises(ValueError):
            solve_launch_angles(10.0, 9.8, Vec2(0.0, 1.0))
        with pytest.raises(ValueError):
            solve_launch_angles(10.0, 9.8, Vec2(-3.0, 1.0))

    @given(st.floats(5.0, 60.0), st.floats(-4.0, 12.0))
    @settings(max_examples=200, deadline=None)
    def test_both_angles_pass_through_target(self, x, y):
        sol = solve_launch_angles(28.0, 9.8, Vec2(x, y))
        if not sol.reachable:
            return
        for angle in (sol.low_angle, sol.high_angle):
            assert parabola_y(angle, 28.0, 9.8, x) == pytest.approx(y, abs=1e-9)

    @given(st.floats(2.0, 9.9))
    @settings(max_examples=100, deadline=None)
    def test_branch_order_at_launch_height(self, x):
        sol = solve_launch_angles(10.0, 10.0, Vec2(x, 0.0))
        assert sol.reachable
        assert 0.0 <= sol.low_angle <= sol.high_angle < math.pi / 2

    def test_equal_angles_only_at_zero_discriminant(self):
        v, g = 10.0, 10.0
        exact = solve_launch_angles(v, g, Vec2(v * v / g, 0.0))
        assert abs(exact.high_angle - exact.low_angle) < 1e-12
        near = solve_launch_angles(v, g, Vec2(v * v / g - 0.01, 0.0))
        assert near.high_angle - near.low_angle > 1e-12


class TestSampleTrajectory:
    def test_flat_shot_first_point(self):
        path = sample_trajectory(0.0, 5.0, 10.0, dt_sample=0.1, t_max=1.0)
        assert path.points[0] == Vec2(0.0, 0.0)
        p1 = path.points[1]
        assert p1.x == pytest.approx(0.5)
        assert p1.y == pytest.approx(-0.05)

    def test_vertical_shot_keeps_zero_x(self):
        path = sample_trajectory(math.pi / 2, 5.0, 10.0, dt_sample=0.05, t_max=1.0)
        assert all(abs(p.x) < 1e-12 for p in path.points)

    def test_apex_matches_formula(self):
        angle, v, g = math.radians(45.0), 10.0, 10.0
        path = sample_trajectory(angle, v, g, dt_sample=1e-4, t_max=2.0)
        apex = max(p.y for p in path.points)
        assert apex == pytest.approx(v * v * math.sin(angle) ** 2 / (2 * g), abs=1e-6)

    def test_stops_below_floor(self):
        path = sample_trajectory(0.0, 5.0, 10.0, dt_sample=0.01, t_max=10.0, floor_y=-1.0)
        assert path.points[-1].y < -1.0
        assert all(p.y >= -1.0 for p in path.points[:-1])

    def test_rejects_bad_sampling(self):
        with pytest.raises(ValueError):
            sample_trajectory(0.5, 5.0, 10.0, dt_sample=0.0)
        with pytest.raises(ValueError):
            sample_trajectory(0.5, 5.0, 10.0, dt_sample=0.1, t_max=0.05)


def straight_path(x0, y0, x1, y1, n=200):
    pts = [Vec2(x0 + (x1 - x0) * k / n, y0 + (y1 - y0) * k / n) for k in range(n + 1)]
    return Polyline(pts, 0.01)


def oracle_first_hit(path, scene, target_id):
    """Exhaustive segment-by-segment scan used as the obstruction oracle."""
    best = None
    for i in range(len(path.points) - 1):
        p0, p1 = path.points[i], path.points[i + 1]
        for obj in scene:
            if obj.id == target_id:
                continue
            t = segment_shape_hit(p0, p1, obj.shape, obj.x, obj.y, obj.angle)
            if t is not None and (best is None or (i, t, obj.id) < best):
                best = (i, t, obj.id)
    return None if best is None else best[2]


class TestFirstObstruction:
    def test_empty_scene_is_clear(self):
        scene = [Obstacle("t", Circle(0.5), 10.0, 0.0)]
        assert first_obstruction(straight_path(0, 0, 10, 0), scene, "t") is None

    def test_block_on_path_is_hit(self):
        scene = [
            Obstacle("t", Circle(0.5), 10.0, 0.0),
            Obstacle("wall", Box(1.0, 4.0), 5.0, 0.0),
        ]
        hit = first_obstruction(straight_path(0, 0, 10, 0), scene, "t")
        assert hit is not None
        assert hit[0] == "wall"
        assert hit[1].x == pytest.approx(4.5, abs=0.06)

    def test_two_blocks_matches_exhaustive_oracle(self):
        scene = [
            Obstacle("t", Circle(0.5), 12.0, 0.0),
            Obstacle("far", Box(1.0, 4.0), 8.0, 0.0),
            Obstacle("near", Box(1.0, 4.0), 4.0, 0.0),
        ]
        path = straight_path(0, 0, 12, 0)
        hit = first_obstruction(path, scene, "t")
        assert hit[0] == oracle_first_hit(path, scene, "t") == "near"

    def test_unknown_target_raises(self):
        scene = [Obstacle("a", Circle(0.5), 5.0, 0.0)]
        with pytest.raises(ValueError):
            first_obstruction(straight_path(0, 0, 10, 0), scene, "nope")

    def test_hollow_box_open_interior(self):
        # A path through the middle of a hollow box only hits the walls.
        shape = HollowBox(4.0, 4.0, 0.4)
        scene = [
            Obstacle("t", Circle(0.3), 20.0, 0.0),
            Obstacle("frame", shape, 10.0, 0.0),
        ]
        hit = first_obstruction(straight_path(0, 0, 20, 0), scene, "t")
        assert hit[0] == "frame"
        assert hit[1].x == pytest.approx(8.0, abs=0.11)  # outer left wall
        # A path entering through a (hypothetically removed) side is not
        # modelled, but one passing between the walls vertically is clear.
        inner = straight_path(10.0 - 1.0, -1.0, 10.0 + 1.0, 1.0)
        assert first_obstruction(inner, [Obstacle("t", Circle(0.3), 20.0, 0.0),
                                         Obstacle("frame", shape, 10.0, 5.0)], "t") is None

    @given(st.permutations(range(4)))
    @settings(max_examples=24, deadline=None)
    def test_scene_order_invariance(self, order):
        objs = [
            Obstacle("t", Circle(0.5), 14.0, 0.0),
            Obstacle("a", Box(1.0, 3.0), 5.0, 0.0),
            Obstacle("b", Box(1.0, 3.0), 9.0, 0.0),
            Obstacle("c", Circle(0.8), 7.0, 0.2),
        ]
        path = straight_path(0, 0, 14, 0)
        baseline = first_obstruction(path, objs, "t")
        shuffled = [objs[i] for i in order]
        assert first_obstruction(path, shuffled, "t") == baseline


class TestTrajectoryBlockers:
    def test_counts_stop_at_target(self):
        scene = [
            Obstacle("t", Circle(0.5), 10.0, 0.0),
            Obstacle("before", Box(0.5, 3.0), 5.0, 0.0),
            Obstacle("behind", Box(0.5, 3.0), 15.0, 0.0),
        ]
        path = straight_path(0, 0, 20, 0)
        assert trajectory_blockers(path, scene, "t") == ["before"]

    def test_order_preserved(self):
        scene = [
            Obstacle("t", Circle(0.5), 20.0, 0.0),
            Obstacle("b", Box(0.5, 3.0), 9.0, 0.0),
            Obstacle("a", Box(0.5, 3.0), 4.0, 0.0),
        ]
        path = straight_path(0, 0, 20, 0)
        assert trajectory_blockers(path, scene, "t") == ["a", "b"]


class TestFindSupporters:
    def test_single_block_on_terrain(self):
        scene = [
            Obstacle("ground", Box(40.0, 2.0), 0.0, -1.0, kind="terrain"),
            Obstacle("b", Box(2.0, 1.0), 0.0, 0.5),
        ]
        assert find_supporters("b", scene) == {"terrain"}

    def test_bridge_on_two_pillars(self):
        scene = [
            Obstacle("p1", Box(0.5, 2.0), -2.0, 1.0),
            Obstacle("p2", Box(0.5, 2.0), 2.0, 1.0),
            Obstacle("deck", Box(6.0, 0.5), 0.0, 2.25),
        ]
        assert find_supporters("deck", scene) == {"p1", "p2"}

    def test_airborne_block_has_no_supporters(self):
        scene = [
            Obstacle("ground", Box(40.0, 2.0), 0.0, -1.0, kind="terrain"),
            Obstacle("b", Box(2.0, 1.0), 0.0, 6.0),
        ]
        assert find_supporters("b", scene) == set()

    def test_unknown_id_raises(self):
        with pytest.raises(ValueError):
            find_supporters("nope", [Obstacle("a", Box(1, 1), 0, 0)])

    @given(st.floats(-1.5, 1.5), st.floats(0.0, 0.05))
    @settings(max_examples=60, deadline=None)
    def test_supporter_top_below_block_bottom(self, dx, gap):
        base = Obstacle("base", Box(2.0, 1.0), 0.0, 0.5)
        top = Obstacle("top", Box(1.0, 1.0), dx, 1.5 + gap)
        supporters = find_supporters("top", [base, top])
        for sid in supporters:
            # supporter's bounding-box top must sit at/below block bottom
            # within the contact tolerance
            assert 1.0 <= (1.5 + gap) - 0.5 + 0.02 * 1.0 + 1e-12
            assert sid == "base"
