"""Planar geometry and projectile kinematics.

Vector and convex-shape primitives, the closed-form two-angle launch
solver, parabola sampling, and the swept obstruction / support queries
used by both the game engine and the agents.  Everything here is pure:
no mutation of inputs, no hidden state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TERRAIN_ID = "terrain"

# Resting-contact slack for the supporter query, as a fraction of the
# smaller body's bounding-box height.
SUPPORT_TOLERANCE_FRAC = 0.02

# Default sampling step for obstruction polylines; finer than the 1/60 s
# physics step so the geometric sweep cannot tunnel through thin walls.
OBSTRUCTION_DT = 1.0 / 120.0


@dataclass(slots=True)
class Vec2:
    x: float
    y: float

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> "Vec2":
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y

    def length(self) -> float:
        return math.hypot(self.x, self.y)


@dataclass(slots=True)
class Circle:
    r: float


@dataclass(slots=True)
class Box:
    w: float
    h: float


@dataclass(slots=True)
class ConvexPolygon:
    # Counter-clockwise vertices in the body frame.
    vertices: tuple[tuple[float, float], ...]


@dataclass(slots=True)
class HollowBox:
    w: float
    h: float
    wall: float


Shape = Circle | Box | ConvexPolygon | HollowBox


@dataclass(slots=True)
class TrajectorySolution:
    low_angle: float
    high_angle: float
    reachable: bool


@dataclass(slots=True)
class Polyline:
    points: list[Vec2]
    dt_sample: float


def solve_launch_angles(launch_speed: float, gravity: float, target: Vec2) -> TrajectorySolution:
    """Solve the two launch angles whose ideal parabola passes through target.

    The target is given relative to the launch point with x pointing
    down-range.  Returns the flat (low) and steep (high) roots of
    tan(a) = (v^2 +- sqrt(v^4 - g(g x^2 + 2 y v^2))) / (g x); when the
    discriminant is negative the target is out of range and
    ``reachable`` is False.  Raises ValueError for targets at or behind
    the launch point.
    """
    if launch_speed <= 0:
        raise ValueError("launch_speed must be positive")
    if gravity <= 0:
        raise ValueError("gravity must be positive")
    if target.x <= 0:
        raise ValueError("target must be ahead of the launch point (x > 0)")
    v2 = launch_speed * launch_speed
    disc = v2 * v2 - gravity * (gravity * target.x * target.x + 2.0 * target.y * v2)
    if disc < 0.0:
        return TrajectorySolution(0.0, 0.0, False)
    root = math.sqrt(disc)
    gx = gravity * target.x
    low = math.atan((v2 - root) / gx)
    high = math.atan((v2 + root) / gx)
    return TrajectorySolution(low, high, True)


def parabola_y(angle: float, launch_speed: float, gravity: float, x: float) -> float:
    """Height of the ideal trajectory at down-range distance x."""
    t = math.tan(angle)
    c = math.cos(angle)
    return x * t - gravity * x * x / (2.0 * launch_speed * launch_speed * c * c)


def flight_time_to_x(angle: float, launch_speed: float, x: float) -> float:
    """Time at which the trajectory crosses down-range distance x."""
    vx = launch_speed * math.cos(angle)
    if vx <= 0:
        raise ValueError("trajectory never advances in x")
    return x / vx


def sample_trajectory(
    angle: float,
    launch_speed: float,
    gravity: float,
    dt_sample: float = OBSTRUCTION_DT,
    t_max: float = 10.0,
    origin: Vec2 | None = None,
    floor_y: float | None = None,
) -> Polyline:
    """Sample the ideal parabola at fixed time intervals.

    Stops at ``t_max`` or at the first sample below ``floor_y`` (that
    sample is kept so the polyline crosses the floor).
    """
    if dt_sample <= 0:
        raise ValueError("dt_sample must be positive")
    if t_max < dt_sample:
        raise ValueError("t_max must be at least dt_sample")
    if origin is None:
        origin = Vec2(0.0, 0.0)
    vx = launch_speed * math.cos(angle)
    vy = launch_speed * math.sin(angle)
    points = [Vec2(origin.x, origin.y)]
    k = 1
    while k * dt_sample <= t_max:
        t = k * dt_sample
        p = Vec2(origin.x + vx * t, origin.y + vy * t - 0.5 * gravity * t * t)
        points.append(p)
        if floor_y is not None and p.y < floor_y:
            break
        k += 1
    return Polyline(points, dt_sample)


# -- shape queries -----------------------------------------------------------


def _box_corners(w: float, h: float, cx: float, cy: float, angle: float,
                 ox: float = 0.0, oy: float = 0.0) -> tuple[tuple[float, float], ...]:
    c = math.cos(angle)
    s = math.sin(angle)
    hw = 0.5 * w
    hh = 0.5 * h
    out = []
    for lx, ly in ((-hw, -hh), (hw, -hh), (hw, hh), (-hw, hh)):
        px = lx + ox
        py = ly + oy
        out.append((cx + px * c - py * s, cy + px * s + py * c))
    return tuple(out)


def _hollow_walls(shape: HollowBox) -> list[tuple[float, float, float, float]]:
    # (w, h, offset_x, offset_y) of the four wall rectangles in the body frame.
    w, h, t = shape.w, shape.h, shape.wall
    return [
        (w, t, 0.0, (h - t) * 0.5),
        (w, t, 0.0, -(h - t) * 0.5),
        (t, h - 2.0 * t, (w - t) * 0.5, 0.0),
        (t, h - 2.0 * t, -(w - t) * 0.5, 0.0),
    ]


def world_polygons(shape: Shape, cx: float, cy: float, angle: float) -> list[tuple[tuple[float, float], ...]]:
    """Convex world-space polygons approximating a (non-circle) shape.

    Hollow boxes decompose into their four wall rectangles so that paths
    through the opening are not treated as hits.
    """
    if isinstance(shape, Box):
        return [_box_corners(shape.w, shape.h, cx, cy, angle)]
    if isinstance(shape, ConvexPolygon):
        c = math.cos(angle)
        s = math.sin(angle)
        return [tuple((cx + x * c - y * s, cy + x * s + y * c) for x, y in shape.vertices)]
    if isinstance(shape, HollowBox):
        return [_box_corners(w, h, cx, cy, angle, ox, oy) for w, h, ox, oy in _hollow_walls(shape)]
    raise TypeError(f"not a polygonal shape: {shape!r}")


def shape_aabb(shape: Shape, cx: float, cy: float, angle: float) -> tuple[float, float, float, float]:
    """World-space (min_x, min_y, max_x, max_y) bounds."""
    if isinstance(shape, Circle):
        return (cx - shape.r, cy - shape.r, cx + shape.r, cy + shape.r)
    xs: list[float] = []
    ys: list[float] = []
    for poly in world_polygons(shape, cx, cy, angle):
        for x, y in poly:
            xs.append(x)
            ys.append(y)
    return (min(xs), min(ys), max(xs), max(ys))


def _segment_circle_hit(p0: Vec2, p1: Vec2, cx: float, cy: float, r: float) -> float | None:
    dx = p1.x - p0.x
    dy = p1.y - p0.y
    fx = p0.x - cx
    fy = p0.y - cy
    a = dx * dx + dy * dy
    if a == 0.0:
        return 0.0 if fx * fx + fy * fy <= r * r else None
    b = 2.0 * (fx * dx + fy * dy)
    c = fx * fx + fy * fy - r * r
    if c <= 0.0:
        return 0.0  # starts inside
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return None
    t = (-b - math.sqrt(disc)) / (2.0 * a)
    if 0.0 <= t <= 1.0:
        return t
    return None


def _segment_polygon_hit(p0: Vec2, p1: Vec2, poly: tuple[tuple[float, float], ...]) -> float | None:
    # Clip the segment parameter interval against each CCW edge half-plane.
    t_enter = 0.0
    t_exit = 1.0
    dx = p1.x - p0.x
    dy = p1.y - p0.y
    n = len(poly)
    for i in range(n):
        ax, ay = poly[i]
        bx, by = poly[(i + 1) % n]
        # Outward normal of a CCW edge.
        nx = by - ay
        ny = ax - bx
        dist = nx * (p0.x - ax) + ny * (p0.y - ay)
        denom = nx * dx + ny * dy
        if denom == 0.0:
            if dist > 0.0:
                return None  # parallel and fully outside this edge
            continue
        t = -dist / denom
        if denom < 0.0:
            if t > t_enter:
                t_enter = t
        else:
            if t < t_exit:
                t_exit = t
        if t_enter > t_exit:
            return None
    return t_enter


def segment_shape_hit(p0: Vec2, p1: Vec2, shape: Shape, cx: float, cy: float, angle: float) -> float | None:
    """Entry parameter in [0, 1] where segment p0->p1 first meets the shape."""
    if isinstance(shape, Circle):
        return _segment_circle_hit(p0, p1, cx, cy, shape.r)
    best: float | None = None
    for poly in world_polygons(shape, cx, cy, angle):
        t = _segment_polygon_hit(p0, p1, poly)
        if t is not None and (best is None or t < best):
            best = t
    return best


def _scene_by_id(scene) -> dict:
    return {obj.id: obj for obj in scene}


def _path_hits(path: Polyline, scene, skip_id: str) -> list[tuple[int, float, str, Vec2]]:
    """All (segment index, parameter, object id, point) hits, sorted."""
    hits: list[tuple[int, float, str, Vec2]] = []
    objs = [o for o in scene if o.id != skip_id]
    remaining = {o.id for o in objs}
    pts = path.points
    for i in range(len(pts) - 1):
        if not remaining:
            break
        p0 = pts[i]
        p1 = pts[i + 1]
        for obj in objs:
            if obj.id not in remaining:
                continue
            t = segment_shape_hit(p0, p1, obj.shape, obj.x, obj.y, obj.angle)
            if t is not None:
                hit = Vec2(p0.x + (p1.x - p0.x) * t, p0.y + (p1.y - p0.y) * t)
                hits.append((i, t, obj.id, hit))
                remaining.discard(obj.id)
    hits.sort(key=lambda h: (h[0], h[1], h[2]))
    return hits


def first_obstruction(path: Polyline, scene, target_id: str) -> tuple[str, Vec2] | None:
    """First scene object (excluding the target) crossed by the path.

    Segments are scanned in order; ties at equal segment index are broken
    by the smaller intersection parameter, then by object id, so the
    result is independent of scene ordering.
    """
    if not path.points:
        raise ValueError("path is empty")
    if target_id not in _scene_by_id(scene):
        raise ValueError(f"unknown target_id: {target_id!r}")
    hits = _path_hits(path, scene, target_id)
    if not hits:
        return None
    _, _, obj_id, point = hits[0]
    return obj_id, point


def trajectory_blockers(path: Polyline, scene, target_id: str) -> list[str]:
    """Ids of objects the path crosses before first reaching the target.

    If the path never reaches the target, every crossed object counts.
    Hit order along the path is preserved.
    """
    by_id = _scene_by_id(scene)
    if target_id not in by_id:
        raise ValueError(f"unknown target_id: {target_id!r}")
    hits = _path_hits(path, scene, target_id)
    target = by_id[target_id]
    target_key: tuple[int, float] | None = None
    pts = path.points
    for i in range(len(pts) - 1):
        t = segment_shape_hit(pts[i], pts[i + 1], target.shape, target.x, target.y, target.angle)
        if t is not None:
            target_key = (i, t)
            break
    out = []
    for seg, t, obj_id, _ in hits:
        if target_key is not None and (seg, t) >= target_key:
            break
        out.append(obj_id)
    return out


def find_supporters(block_id: str, scene, tolerance: float | None = None) -> set[str]:
    """Ids of objects in resting contact beneath the given block.

    A supporter's bounding-box top must sit within the contact tolerance
    of the block's bounding-box bottom while overlapping it horizontally.
    The default tolerance is 2% of the smaller body's height; callers
    working from quantized (screen-derived) geometry should pass a looser
    absolute value.  Terrain bodies are reported under the distinguished
    id ``terrain``.
    """
    by_id = _scene_by_id(scene)
    if block_id not in by_id:
        raise ValueError(f"unknown block id: {block_id!r}")
    block = by_id[block_id]
    bx0, by0, bx1, by1 = shape_aabb(block.shape, block.x, block.y, block.angle)
    block_h = by1 - by0
    out: set[str] = set()
    for obj in scene:
        if obj.id == block_id:
            continue
        ox0, oy0, ox1, oy1 = shape_aabb(obj.shape, obj.x, obj.y, obj.angle)
        tol = tolerance
        if tol is None:
            tol = SUPPORT_TOLERANCE_FRAC * min(block_h, oy1 - oy0)
        if abs(oy1 - by0) > tol:
            continue
        if min(bx1, ox1) - max(bx0, ox0) <= 0.0:
            continue
        if getattr(obj, "kind", None) == "terrain":
            out.add(TERRAIN_ID)
        else:
            out.add(obj.id)
    return out
