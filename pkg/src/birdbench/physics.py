"""Deterministic fixed-timestep 2D rigid-body engine.

Semi-implicit Euler integration with impulse-based contact resolution
(restitution + Coulomb friction), contact-impulse damage, bird abilities,
TNT blasts, and motion-based settle detection.  Determinism rules: bodies
are always visited in sorted-id order, contact pairs are solved in sorted
pair order, and every computation uses one canonical evaluation order, so
two worlds built from the same level and fed the same actions agree
bit-for-bit at every step.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

from .geometry import Box, Circle, ConvexPolygon, HollowBox, Shape, Vec2, shape_aabb, world_polygons


class IllegalAction(Exception):
    """Raised for actions the current game state does not allow."""


class OutOfBirds(IllegalAction):
    """Raised when launching with an empty bird queue."""


@dataclass(frozen=True, slots=True)
class DamageEvent:
    step: int
    subject: str
    kind: str  # damaged | destroyed | pig_killed | tnt_detonated
    amount: float


@dataclass(frozen=True)
class MaterialProps:
    density: float
    restitution: float
    friction: float
    hp_per_area: float


# Block materials.  HP pools are artifact constants tuned against the
# bundled level pack (stone must shrug off several bird hits, wood must
# shatter on one).
MATERIALS = {
    "wood": MaterialProps(density=1.0, restitution=0.12, friction=0.55, hp_per_area=2.0),
    "ice": MaterialProps(density=0.8, restitution=0.08, friction=0.10, hp_per_area=1.0),
    "stone": MaterialProps(density=2.5, restitution=0.10, friction=0.65, hp_per_area=15.0),
}

PIG_HP = 0.75
TNT_HP = 1e-6  # any positive damage detonates


@dataclass(frozen=True)
class BirdSpec:
    bird_type: str
    radius: float
    mass: float
    ability: str  # none | split3 | boost | blast | egg_bomb
    tap_fraction: float


BIRD_SPECS = {
    "red": BirdSpec("red", 0.35, 1.0, "none", 0.0),
    "blue": BirdSpec("blue", 0.28, 0.6, "split3", 0.75),
    "yellow": BirdSpec("yellow", 0.35, 0.9, "boost", 0.85),
    "black": BirdSpec("black", 0.45, 1.5, "blast", 0.98),
    "white": BirdSpec("white", 0.45, 1.2, "egg_bomb", 0.80),
}

# Damage multiplier of a bird type against a block material.  Each type is
# strong (x2) against one material and takes a x0.75 penalty against its
# designated weak materials; everything else (and non-bird impacts) is x1.
EFFECTIVENESS = {
    "red": {},
    "yellow": {"wood": 2.0, "stone": 0.75},
    "blue": {"ice": 2.0, "wood": 0.75, "stone": 0.75},
    "black": {"stone": 2.0},
    "white": {"stone": 0.75},
}


def effectiveness(bird_type: str | None, material: str) -> float:
    if bird_type is None:
        return 1.0
    return EFFECTIVENESS.get(bird_type, {}).get(material, 1.0)


def compute_damage(
    material: str,
    impulse: float,
    bird_type: str | None = None,
    *,
    threshold: float = 0.0,
    gain: float = 1.0,
) -> float:
    """Damage points inflicted by a contact of the given normal impulse.

    Impulses at or below the threshold cause no damage; beyond it damage
    grows linearly, scaled by the attacking bird's effectiveness against
    the material.
    """
    if impulse < 0:
        raise ValueError("impulse must be non-negative")
    if impulse <= threshold:
        return 0.0
    return (impulse - threshold) * gain * effectiveness(bird_type, material)


@dataclass
class PhysicsConfig:
    dt: float = 1.0 / 60.0
    gravity: float = 9.8
    v_max: float = 28.0
    iterations: int = 8
    # Full restitution applies above this approach speed, none below;
    # keeps resting stacks from buzzing.
    restitution_threshold: float = 1.0
    # Contacts slower than this never damage, so load-bearing stacks do
    # not grind themselves down under their own weight.
    damage_velocity_min: float = 0.75
    damage_threshold_coef: float = 0.5  # threshold = coef * victim mass
    damage_gain: float = 1.0
    # One physical impact spans several solver steps; after a damaging
    # step the pair is quiet for this long so damage is counted once.
    damage_cooldown: float = 0.25
    correction_percent: float = 0.35
    correction_slop: float = 0.002
    tnt_radius: float = 4.5
    tnt_impulse: float = 40.0
    black_radius: float = 6.0
    black_impulse: float = 45.0
    egg_mass: float = 2.0
    egg_speed: float = 12.0
    kill_floor: float = -10.0
    settle_v_eps: float = 0.08
    settle_k_steps: int = 30
    settle_t_cap: float = 10.0
    # Island sleeping: a body slower than sleep_v_eps for sleep_steps in a
    # row freezes until something fast touches it or a neighbour dies.
    sleep_v_eps: float = 0.06
    sleep_steps: int = 12
    wake_speed: float = 0.25


class Body:
    __slots__ = (
        "id", "kind", "material", "shape", "x", "y", "angle",
        "vx", "vy", "omega", "mass", "inv_mass", "inv_inertia",
        "hp", "hp_max", "alive", "restitution", "friction", "bird_type",
        "sleeping", "quiet_steps",
    )

    def __init__(self, id, kind, material, shape, x, y, angle, mass, inertia,
                 hp, restitution, friction, bird_type=None, static=False):
        self.id = id
        self.kind = kind
        self.material = material
        self.shape = shape
        self.x = x
        self.y = y
        self.angle = angle
        self.vx = 0.0
        self.vy = 0.0
        self.omega = 0.0
        self.mass = mass
        self.inv_mass = 0.0 if static else 1.0 / mass
        self.inv_inertia = 0.0 if static else (1.0 / inertia if inertia > 0 else 0.0)
        self.hp = hp
        self.hp_max = hp
        self.alive = True
        self.restitution = restitution
        self.friction = friction
        self.bird_type = bird_type
        self.sleeping = False
        self.quiet_steps = 0

    def aabb(self):
        return shape_aabb(self.shape, self.x, self.y, self.angle)

    def speed(self) -> float:
        return math.hypot(self.vx, self.vy)

    def wake(self) -> None:
        self.sleeping = False
        self.quiet_steps = 0


def shape_area(shape: Shape) -> float:
    if isinstance(shape, Circle):
        return math.pi * shape.r * shape.r
    if isinstance(shape, Box):
        return shape.w * shape.h
    if isinstance(shape, HollowBox):
        inner_w = shape.w - 2.0 * shape.wall
        inner_h = shape.h - 2.0 * shape.wall
        return shape.w * shape.h - max(inner_w, 0.0) * max(inner_h, 0.0)
    if isinstance(shape, ConvexPolygon):
        a = 0.0
        vs = shape.vertices
        for i in range(len(vs)):
            x0, y0 = vs[i]
            x1, y1 = vs[(i + 1) % len(vs)]
            a += x0 * y1 - x1 * y0
        return abs(a) * 0.5
    raise TypeError(f"unknown shape: {shape!r}")


def shape_inertia(shape: Shape, mass: float) -> float:
    if isinstance(shape, Circle):
        return 0.5 * mass * shape.r * shape.r
    if isinstance(shape, Box):
        return mass * (shape.w * shape.w + shape.h * shape.h) / 12.0
    if isinstance(shape, HollowBox):
        total_area = shape_area(shape)
        from .geometry import _hollow_walls  # noqa: PLC0415

        inertia = 0.0
        for w, h, ox, oy in _hollow_walls(shape):
            m = mass * (w * h) / total_area
            inertia += m * (w * w + h * h) / 12.0 + m * (ox * ox + oy * oy)
        return inertia
    if isinstance(shape, ConvexPolygon):
        # Second moment about the centroid-ish origin of the vertex frame.
        num = 0.0
        den = 0.0
        vs = shape.vertices
        for i in range(len(vs)):
            x0, y0 = vs[i]
            x1, y1 = vs[(i + 1) % len(vs)]
            cross = x0 * y1 - x1 * y0
            num += cross * (x0 * x0 + x0 * x1 + x1 * x1 + y0 * y0 + y0 * y1 + y1 * y1)
            den += cross
        if den == 0:
            return mass * 0.1
        return mass * num / (6.0 * den)
    raise TypeError(f"unknown shape: {shape!r}")


def make_block(id: str, material: str, shape: Shape, x: float, y: float, angle: float = 0.0) -> Body:
    props = MATERIALS[material]
    area = shape_area(shape)
    mass = props.density * area
    return Body(id, "block", material, shape, x, y, angle, mass,
                shape_inertia(shape, mass), props.hp_per_area * area,
                props.restitution, props.friction)


def make_pig(id: str, shape: Circle, x: float, y: float) -> Body:
    mass = 1.0 * shape_area(shape)
    return Body(id, "pig", "none", shape, x, y, 0.0, mass,
                shape_inertia(shape, mass), PIG_HP, 0.25, 0.5)


def make_tnt(id: str, shape: Shape, x: float, y: float, angle: float = 0.0) -> Body:
    mass = 0.8 * shape_area(shape)
    return Body(id, "tnt", "none", shape, x, y, angle, mass,
                shape_inertia(shape, mass), TNT_HP, 0.05, 0.6)


def make_terrain(id: str, shape: Box, x: float, y: float) -> Body:
    return Body(id, "terrain", "none", shape, x, y, 0.0, 1.0, 1.0,
                float("inf"), 0.25, 0.8, static=True)


def make_bird(id: str, bird_type: str) -> Body:
    spec = BIRD_SPECS[bird_type]
    shape = Circle(spec.radius)
    return Body(id, "bird", "none", shape, 0.0, 0.0, 0.0, spec.mass,
                shape_inertia(shape, spec.mass), float("inf"), 0.35, 0.45,
                bird_type=bird_type)


class World:
    """One game instance: bodies, bird queue, events, and the step loop."""

    def __init__(self, config: PhysicsConfig, launch: Vec2, seed: int = 0):
        self.config = config
        self.launch = launch
        self.seed = seed
        self.bodies: dict[str, Body] = {}
        self.birds_queue: list[str] = []
        self.active_bird_ids: list[str] = []
        self.tap_armed = False
        self.time = 0.0
        self.step_index = 0
        self.launch_count = 0
        self.damage_enabled = True
        self.event_log: list[DamageEvent] = []
        self._arbiters: dict[tuple, _Contact] = {}
        self._damage_cooldowns: dict[tuple[str, str], int] = {}

    def add_body(self, body: Body) -> None:
        if body.id in self.bodies:
            raise ValueError(f"duplicate body id: {body.id!r}")
        self.bodies[body.id] = body

    def living(self, kind: str) -> list[Body]:
        return [b for bid, b in sorted(self.bodies.items()) if b.kind == kind and b.alive]

    def pigs_alive(self) -> int:
        return len(self.living("pig"))

    def solved(self) -> bool:
        return self.pigs_alive() == 0

    def bird_in_flight(self) -> bool:
        return any(bid in self.bodies and self.bodies[bid].alive for bid in self.active_bird_ids)

    def lost(self) -> bool:
        return not self.solved() and not self.birds_queue and not self.bird_in_flight()

    def _emit(self, subject: str, kind: str, amount: float) -> None:
        self.event_log.append(DamageEvent(self.step_index, subject, kind, amount))


# -- narrowphase -------------------------------------------------------------


def _poly_normals(poly):
    out = []
    n = len(poly)
    for i in range(n):
        ax, ay = poly[i]
        bx, by = poly[(i + 1) % n]
        nx = by - ay
        ny = ax - bx
        ln = math.hypot(nx, ny)
        out.append((nx / ln, ny / ln))
    return out


def _collision_shapes(body: Body):
    """Per-body convex pieces with precomputed face normals and AABB."""
    if isinstance(body.shape, Circle):
        r = body.shape.r
        aabb = (body.x - r, body.y - r, body.x + r, body.y + r)
        return [("circle", (body.x, body.y, r), None)], aabb
    pieces = []
    min_x = min_y = math.inf
    max_x = max_y = -math.inf
    for poly in world_polygons(body.shape, body.x, body.y, body.angle):
        pieces.append(("poly", poly, _poly_normals(poly)))
        for x, y in poly:
            min_x = min(min_x, x)
            min_y = min(min_y, y)
            max_x = max(max_x, x)
            max_y = max(max_y, y)
    return pieces, (min_x, min_y, max_x, max_y)


def _max_separation(poly_a, normals_a, poly_b):
    best = -math.inf
    best_face = 0
    for i in range(len(poly_a)):
        nx, ny = normals_a[i]
        vx, vy = poly_a[i]
        s = min(nx * (wx - vx) + ny * (wy - vy) for wx, wy in poly_b)
        if s > best:
            best = s
            best_face = i
    return best, best_face


def _clip_below(points, nx, ny, offset):
    # Clip a 1- or 2-point face against the half-plane n.p <= offset.
    if len(points) == 1:
        px, py = points[0]
        return points if nx * px + ny * py - offset <= 0.0 else []
    p0, p1 = points
    d0 = nx * p0[0] + ny * p0[1] - offset
    d1 = nx * p1[0] + ny * p1[1] - offset
    out = []
    if d0 <= 0.0:
        out.append(p0)
    if d1 <= 0.0:
        out.append(p1)
    if d0 * d1 < 0.0:
        t = d0 / (d0 - d1)
        out.append((p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1])))
    return out


def _poly_poly(poly_a, normals_a, poly_b, normals_b):
    sep_a, face_a = _max_separation(poly_a, normals_a, poly_b)
    if sep_a > 0.0:
        return None
    sep_b, face_b = _max_separation(poly_b, normals_b, poly_a)
    if sep_b > 0.0:
        return None
    if sep_b > sep_a + 1e-10:
        ref_poly, ref_normals, inc_poly, inc_normals, ref_face, flip = (
            poly_b, normals_b, poly_a, normals_a, face_b, True)
    else:
        ref_poly, ref_normals, inc_poly, inc_normals, ref_face, flip = (
            poly_a, normals_a, poly_b, normals_b, face_a, False)
    nx, ny = ref_normals[ref_face]
    rv1 = ref_poly[ref_face]
    rv2 = ref_poly[(ref_face + 1) % len(ref_poly)]
    # Incident face: the one most anti-parallel to the reference normal.
    best_dot = math.inf
    inc_face = 0
    for i in range(len(inc_poly)):
        inx, iny = inc_normals[i]
        d = inx * nx + iny * ny
        if d < best_dot:
            best_dot = d
            inc_face = i
    pts = [inc_poly[inc_face], inc_poly[(inc_face + 1) % len(inc_poly)]]
    # Clip by the reference face's side planes.
    tx = rv2[0] - rv1[0]
    ty = rv2[1] - rv1[1]
    tl = math.hypot(tx, ty)
    tx /= tl
    ty /= tl
    pts = _clip_below(pts, -tx, -ty, -(tx * rv1[0] + ty * rv1[1]))
    if len(pts) < 1:
        return None
    pts = _clip_below(pts, tx, ty, tx * rv2[0] + ty * rv2[1])
    if len(pts) < 1:
        return None
    contacts = []
    for px, py in pts:
        sep = nx * (px - rv1[0]) + ny * (py - rv1[1])
        if sep <= 0.0:
            contacts.append((px, py, -sep))
    if not contacts:
        return None
    if flip:
        return (-nx, -ny), contacts
    return (nx, ny), contacts


def _circle_circle(c_a, c_b):
    ax, ay, ra = c_a
    bx, by, rb = c_b
    dx = bx - ax
    dy = by - ay
    rsum = ra + rb
    d2 = dx * dx + dy * dy
    if d2 >= rsum * rsum:
        return None
    d = math.sqrt(d2)
    if d == 0.0:
        nx, ny = 0.0, 1.0
    else:
        nx, ny = dx / d, dy / d
    pen = rsum - d
    px = ax + nx * (ra - 0.5 * pen)
    py = ay + ny * (ra - 0.5 * pen)
    return (nx, ny), [(px, py, pen)]


def _poly_circle(poly, normals, circ):
    cx, cy, r = circ
    best_sep = -math.inf
    best_face = 0
    for i in range(len(poly)):
        nx, ny = normals[i]
        vx, vy = poly[i]
        s = nx * (cx - vx) + ny * (cy - vy)
        if s > r:
            return None
        if s > best_sep:
            best_sep = s
            best_face = i
    nx, ny = normals[best_face]
    if best_sep < 1e-12:
        # Center inside the polygon: push out along the least-penetrated face.
        pen = r - best_sep
        return (nx, ny), [(cx - nx * r, cy - ny * r, pen)]
    v1 = poly[best_face]
    v2 = poly[(best_face + 1) % len(poly)]
    ex = v2[0] - v1[0]
    ey = v2[1] - v1[1]
    el2 = ex * ex + ey * ey
    t = ((cx - v1[0]) * ex + (cy - v1[1]) * ey) / el2
    t = min(max(t, 0.0), 1.0)
    qx = v1[0] + ex * t
    qy = v1[1] + ey * t
    dx = cx - qx
    dy = cy - qy
    d2 = dx * dx + dy * dy
    if d2 > r * r:
        return None
    d = math.sqrt(d2)
    if d == 0.0:
        return (nx, ny), [(qx, qy, r)]
    return (dx / d, dy / d), [(qx, qy, r - d)]


def _pair_manifolds(pieces_a, pieces_b):
    manifolds = []
    for ia, (kind_a, data_a, normals_a) in enumerate(pieces_a):
        for ib, (kind_b, data_b, normals_b) in enumerate(pieces_b):
            if kind_a == "circle" and kind_b == "circle":
                m = _circle_circle(data_a, data_b)
            elif kind_a == "poly" and kind_b == "poly":
                m = _poly_poly(data_a, normals_a, data_b, normals_b)
            elif kind_a == "poly":
                m = _poly_circle(data_a, normals_a, data_b)
            else:
                m = _poly_circle(data_b, normals_b, data_a)
                if m is not None:
                    (nx, ny), pts = m
                    m = (-nx, -ny), pts
            if m is not None:
                manifolds.append(((ia, ib), m[0], m[1]))
    return manifolds


class _Contact:
    __slots__ = ("a", "b", "nx", "ny", "points", "friction", "key",
                 "ima", "iia", "imb", "iib")

    def __init__(self, a: Body, b: Body, nx: float, ny: float, friction: float, key):
        self.a = a
        self.b = b
        self.nx = nx
        self.ny = ny
        # [rax, ray, rbx, rby, kn_inv, kt_inv, bounce, pn, pt, pen, approach,
        #  world_px, world_py]
        self.points = []
        self.friction = friction
        self.key = key
        # Effective inverse masses, frozen at build time; zero for a
        # sleeping body so it acts as a static anchor while it sleeps.
        self.ima = 0.0 if a.sleeping else a.inv_mass
        self.iia = 0.0 if a.sleeping else a.inv_inertia
        self.imb = 0.0 if b.sleeping else b.inv_mass
        self.iib = 0.0 if b.sleeping else b.inv_inertia


def _build_contact(a: Body, b: Body, nx, ny, pts, cfg: PhysicsConfig, key) -> _Contact:
    e = max(a.restitution, b.restitution)
    contact = _Contact(a, b, nx, ny, math.sqrt(a.friction * b.friction), key)
    ima, iia, imb, iib = contact.ima, contact.iia, contact.imb, contact.iib
    tx, ty = -ny, nx
    for px, py, pen in pts:
        rax = px - a.x
        ray = py - a.y
        rbx = px - b.x
        rby = py - b.y
        ran = rax * ny - ray * nx
        rbn = rbx * ny - rby * nx
        kn = ima + imb + iia * ran * ran + iib * rbn * rbn
        rat = rax * ty - ray * tx
        rbt = rbx * ty - rby * tx
        kt = ima + imb + iia * rat * rat + iib * rbt * rbt
        relvx = b.vx - b.omega * rby - a.vx + a.omega * ray
        relvy = b.vy + b.omega * rbx - a.vy - a.omega * rax
        vn = relvx * nx + relvy * ny
        bounce = -e * vn if -vn > cfg.restitution_threshold else 0.0
        approach = -vn if vn < 0.0 else 0.0
        contact.points.append([rax, ray, rbx, rby,
                               1.0 / kn if kn > 0 else 0.0,
                               1.0 / kt if kt > 0 else 0.0,
                               bounce, 0.0, 0.0, pen, approach, px, py])
    return contact


_WARM_MATCH_DIST2 = 0.04 * 0.04


def _warm_start(contact: _Contact, previous: _Contact | None) -> None:
    """Seed accumulated impulses from last step's matching contact points."""
    if previous is None:
        return
    a = contact.a
    b = contact.b
    nx, ny = contact.nx, contact.ny
    tx, ty = -ny, nx
    for p in contact.points:
        px, py = p[11], p[12]
        best = None
        best_d2 = _WARM_MATCH_DIST2
        for q in previous.points:
            dx = q[11] - px
            dy = q[12] - py
            d2 = dx * dx + dy * dy
            if d2 < best_d2:
                best_d2 = d2
                best = q
        if best is None:
            continue
        pn, pt = best[7], best[8]
        p[7] = pn
        p[8] = pt
        ix = pn * nx + pt * tx
        iy = pn * ny + pt * ty
        a.vx -= ix * contact.ima
        a.vy -= iy * contact.ima
        a.omega -= contact.iia * (p[0] * iy - p[1] * ix)
        b.vx += ix * contact.imb
        b.vy += iy * contact.imb
        b.omega += contact.iib * (p[2] * iy - p[3] * ix)


def _solve_velocities(contacts: list[_Contact], iterations: int) -> None:
    for _ in range(iterations):
        for c in contacts:
            a = c.a
            b = c.b
            nx = c.nx
            ny = c.ny
            tx, ty = -ny, nx
            ima, iia, imb, iib = c.ima, c.iia, c.imb, c.iib
            friction = c.friction
            for p in c.points:
                rax = p[0]
                ray = p[1]
                rbx = p[2]
                rby = p[3]
                relvx = b.vx - b.omega * rby - a.vx + a.omega * ray
                relvy = b.vy + b.omega * rbx - a.vy - a.omega * rax
                vn = relvx * nx + relvy * ny
                pn = p[7]
                pn_new = pn - (vn - p[6]) * p[4]
                if pn_new < 0.0:
                    pn_new = 0.0
                dpn = pn_new - pn
                p[7] = pn_new
                ix = dpn * nx
                iy = dpn * ny
                a.vx -= ix * ima
                a.vy -= iy * ima
                a.omega -= iia * (rax * iy - ray * ix)
                b.vx += ix * imb
                b.vy += iy * imb
                b.omega += iib * (rbx * iy - rby * ix)
                # Coulomb friction against the accumulated normal impulse.
                relvx = b.vx - b.omega * rby - a.vx + a.omega * ray
                relvy = b.vy + b.omega * rbx - a.vy - a.omega * rax
                vt = relvx * tx + relvy * ty
                pt = p[8]
                pt_new = pt - vt * p[5]
                max_pt = friction * pn_new
                if pt_new > max_pt:
                    pt_new = max_pt
                elif pt_new < -max_pt:
                    pt_new = -max_pt
                dpt = pt_new - pt
                p[8] = pt_new
                ix = dpt * tx
                iy = dpt * ty
                a.vx -= ix * ima
                a.vy -= iy * ima
                a.omega -= iia * (rax * iy - ray * ix)
                b.vx += ix * imb
                b.vy += iy * imb
                b.omega += iib * (rbx * iy - rby * ix)


def step(world: World, dt: float) -> World:
    """Advance the world by exactly one fixed timestep."""
    cfg = world.config
    if abs(dt - cfg.dt) > 1e-12:
        raise ValueError(f"dt must equal the configured fixed step {cfg.dt}")
    bodies = world.bodies
    ids = sorted(bodies)
    for bid in ids:
        b = bodies[bid]
        if b.inv_mass > 0.0 and b.alive and not b.sleeping:
            b.vy -= cfg.gravity * dt

    shapes = {}
    aabbs = {}
    for bid in ids:
        b = bodies[bid]
        if b.alive:
            shapes[bid], aabbs[bid] = _collision_shapes(b)

    contacts: list[_Contact] = []
    carried: dict[tuple, _Contact] = {}
    wake_speed = cfg.wake_speed
    margin = 0.01
    n = len(ids)
    for i in range(n):
        a = bodies[ids[i]]
        if not a.alive:
            continue
        ax0, ay0, ax1, ay1 = aabbs[ids[i]]
        a_static = a.inv_mass == 0.0
        a_rest = a.sleeping or a_static
        for j in range(i + 1, n):
            b = bodies[ids[j]]
            if not b.alive:
                continue
            b_static = b.inv_mass == 0.0
            if a_static and b_static:
                continue
            if a.kind == "bird" and b.kind == "bird":
                continue
            bx0, by0, bx1, by1 = aabbs[ids[j]]
            if ax1 + margin < bx0 or bx1 + margin < ax0 or ay1 + margin < by0 or by1 + margin < ay0:
                continue
            b_rest = b.sleeping or b_static
            if a_rest and b_rest:
                # Resting island: keep last step's contacts warm but skip
                # all narrowphase and solving while everything sleeps.
                for key, old in world._arbiters.items():
                    if key[0] == a.id and key[1] == b.id:
                        carried[key] = old
                continue
            # A fast mover wakes the island it touches; a slow one rests
            # against the sleepers as though they were static.
            if a.sleeping and (b.speed() + abs(b.omega)) >= wake_speed:
                wake_island(world, a)
            if b.sleeping and (a.speed() + abs(a.omega)) >= wake_speed:
                wake_island(world, b)
            for sub, (nx, ny), pts in _pair_manifolds(shapes[a.id], shapes[b.id]):
                key = (a.id, b.id, sub)
                contacts.append(_build_contact(a, b, nx, ny, pts, cfg, key))

    # Warm starting runs after every contact has measured its approach
    # velocity, so seeded impulses cannot masquerade as impacts.
    for c in contacts:
        _warm_start(c, world._arbiters.get(c.key))

    _solve_velocities(contacts, cfg.iterations)
    carried.update((c.key, c) for c in contacts)
    world._arbiters = carried

    for bid in ids:
        b = bodies[bid]
        if b.inv_mass > 0.0 and b.alive and not b.sleeping:
            b.x += b.vx * dt
            b.y += b.vy * dt
            b.angle += b.omega * dt

    # Linear positional projection of the deepest point per contact; keeps
    # resting stacks from sinking without injecting bounce energy.
    for c in contacts:
        pen = max(p[9] for p in c.points)
        corr = cfg.correction_percent * max(pen - cfg.correction_slop, 0.0)
        total = c.ima + c.imb
        if corr <= 0.0 or total == 0.0:
            continue
        corr /= total
        c.a.x -= c.nx * corr * c.ima
        c.a.y -= c.ny * corr * c.ima
        c.b.x += c.nx * corr * c.imb
        c.b.y += c.ny * corr * c.imb

    _apply_contact_damage(world, contacts)
    _process_deaths(world)
    _cull_fallen(world)
    _prune(world)
    _update_sleep(world, ids)

    world.time += dt
    world.step_index += 1
    return world


def _update_sleep(world: World, ids) -> None:
    cfg = world.config
    for bid in ids:
        b = world.bodies.get(bid)
        if b is None or b.inv_mass == 0.0 or not b.alive or b.sleeping:
            continue
        if b.speed() < cfg.sleep_v_eps and abs(b.omega) < cfg.sleep_v_eps:
            b.quiet_steps += 1
            if b.quiet_steps >= cfg.sleep_steps:
                b.sleeping = True
                b.vx = 0.0
                b.vy = 0.0
                b.omega = 0.0
        else:
            b.quiet_steps = 0


def _island_adjacency(world: World) -> dict[str, list[str]]:
    """Contact graph between dynamic bodies; static ground does not bridge."""
    adj: dict[str, list[str]] = {}
    for key in world._arbiters:
        a = world.bodies.get(key[0])
        b = world.bodies.get(key[1])
        if a is None or b is None or a.inv_mass == 0.0 or b.inv_mass == 0.0:
            continue
        adj.setdefault(a.id, []).append(b.id)
        adj.setdefault(b.id, []).append(a.id)
    return adj


def wake_island(world: World, body: Body) -> None:
    """Wake a body and everything transitively resting on or against it.

    Sleeping bodies act as static anchors, so a partial wake would let a
    frozen upper stack pin a falling lower block in place.
    """
    adj = _island_adjacency(world)
    frontier = [body.id]
    seen = {body.id}
    while frontier:
        bid = frontier.pop()
        b = world.bodies.get(bid)
        if b is not None and b.alive:
            b.wake()
        for nid in adj.get(bid, ()):
            if nid not in seen:
                seen.add(nid)
                frontier.append(nid)


def _wake_neighbors(world: World, dead_id: str) -> None:
    """A vanished body frees whatever rested on it."""
    for key in list(world._arbiters):
        if key[0] == dead_id:
            other = world.bodies.get(key[1])
        elif key[1] == dead_id:
            other = world.bodies.get(key[0])
        else:
            continue
        if other is not None and other.alive and other.inv_mass > 0.0:
            wake_island(world, other)


def _apply_contact_damage(world: World, contacts: list[_Contact]) -> None:
    if not world.damage_enabled:
        return
    cfg = world.config
    pair_hits: dict[tuple[str, str], tuple[float, float]] = {}
    for c in contacts:
        key = (c.a.id, c.b.id)
        impulse = sum(p[7] for p in c.points)
        approach = max(p[10] for p in c.points)
        prev_j, prev_v = pair_hits.get(key, (0.0, 0.0))
        pair_hits[key] = (prev_j + impulse, max(prev_v, approach))
    by_contact = {(c.a.id, c.b.id): c for c in contacts}
    cooldown_steps = int(round(cfg.damage_cooldown / cfg.dt))
    for key in sorted(pair_hits):
        c = by_contact[key]
        impulse, approach_speed = pair_hits[key]
        # Impact gate on the pre-solve approach speed: static load-bearing
        # contacts press hard but approach slowly, and must not damage.
        if approach_speed < cfg.damage_velocity_min:
            continue
        last = world._damage_cooldowns.get(key)
        if last is not None and world.step_index - last < cooldown_steps:
            continue
        world._damage_cooldowns[key] = world.step_index
        for victim, attacker in ((c.a, c.b), (c.b, c.a)):
            if victim.inv_mass == 0.0 or victim.kind in ("terrain", "bird") or not victim.alive:
                continue
            if attacker.kind == "terrain" and victim.kind == "block":
                # Blocks land on the ground without shattering; pigs and
                # TNT stay fall-sensitive.
                continue
            bird_type = attacker.bird_type if attacker.kind == "bird" else None
            threshold = cfg.damage_threshold_coef * victim.mass
            dmg = compute_damage(victim.material, impulse, bird_type,
                                 threshold=threshold, gain=cfg.damage_gain)
            if dmg > 0.0:
                _damage_body(world, victim, dmg)


def _damage_body(world: World, victim: Body, dmg: float) -> None:
    victim.hp -= dmg
    if victim.kind == "block":
        world._emit(victim.id, "damaged", dmg)


def _process_deaths(world: World) -> None:
    tnt_queue: list[Body] = []
    for bid in sorted(world.bodies):
        b = world.bodies[bid]
        if b.alive and b.hp <= 0.0:
            b.alive = False
            _wake_neighbors(world, b.id)
            if b.kind == "block":
                world._emit(b.id, "destroyed", 0.0)
            elif b.kind == "pig":
                world._emit(b.id, "pig_killed", 0.0)
            elif b.kind == "tnt":
                tnt_queue.append(b)
    while tnt_queue:
        tnt = tnt_queue.pop(0)
        world._emit(tnt.id, "tnt_detonated", 0.0)
        newly_dead = _blast(world, tnt.x, tnt.y, world.config.tnt_radius, world.config.tnt_impulse)
        tnt_queue.extend(newly_dead)


def _blast(world: World, cx: float, cy: float, radius: float, impulse0: float) -> list[Body]:
    """Radial impulse + damage, linearly fading to zero at the blast radius.

    Returns any TNT bodies killed by this blast so chains can propagate.
    """
    cfg = world.config
    for bid in sorted(world.bodies):
        b = world.bodies[bid]
        if not b.alive or b.inv_mass == 0.0:
            continue
        dx = b.x - cx
        dy = b.y - cy
        d = math.hypot(dx, dy)
        if d > radius:
            continue
        j = impulse0 * (1.0 - d / radius)
        if d == 0.0:
            ux, uy = 0.0, 1.0
        else:
            ux, uy = dx / d, dy / d
        wake_island(world, b)
        b.vx += j * b.inv_mass * ux
        b.vy += j * b.inv_mass * uy
        if b.kind == "bird":
            continue
        threshold = cfg.damage_threshold_coef * b.mass
        dmg = compute_damage(b.material, j, None, threshold=threshold, gain=cfg.damage_gain)
        if dmg > 0.0:
            _damage_body(world, b, dmg)
    killed_tnt: list[Body] = []
    for bid in sorted(world.bodies):
        b = world.bodies[bid]
        if b.alive and b.hp <= 0.0:
            b.alive = False
            _wake_neighbors(world, b.id)
            if b.kind == "block":
                world._emit(b.id, "destroyed", 0.0)
            elif b.kind == "pig":
                world._emit(b.id, "pig_killed", 0.0)
            elif b.kind == "tnt":
                killed_tnt.append(b)
    return killed_tnt


def _cull_fallen(world: World) -> None:
    floor = world.config.kill_floor
    for bid in sorted(world.bodies):
        b = world.bodies[bid]
        if not b.alive or b.inv_mass == 0.0 or b.y >= floor:
            continue
        b.alive = False
        _wake_neighbors(world, b.id)
        if b.kind == "block":
            world._emit(b.id, "destroyed", 0.0)
        elif b.kind == "pig":
            world._emit(b.id, "pig_killed", 0.0)


def _prune(world: World) -> None:
    dead = [bid for bid, b in world.bodies.items() if not b.alive]
    for bid in dead:
        del world.bodies[bid]
    if dead:
        world.active_bird_ids = [i for i in world.active_bird_ids if i in world.bodies]


# -- actions -----------------------------------------------------------------


def launch_bird(world: World, angle: float, speed_fraction: float) -> World:
    """Fire the front bird of the queue from the launch point."""
    if not world.birds_queue:
        raise OutOfBirds("bird queue is empty")
    if world.bird_in_flight():
        raise IllegalAction("a bird is already in flight")
    if not 0.0 <= speed_fraction <= 1.0:
        raise ValueError("speed_fraction must lie in [0, 1]")
    bird_type = world.birds_queue.pop(0)
    bid = f"bird:{world.launch_count}"
    world.launch_count += 1
    bird = make_bird(bid, bird_type)
    bird.x = world.launch.x
    bird.y = world.launch.y
    speed = speed_fraction * world.config.v_max
    bird.vx = speed * math.cos(angle)
    # Half-step bias compensation: with this kick the discrete ballistic
    # positions land exactly on the ideal parabola the planner solved.
    bird.vy = speed * math.sin(angle) + 0.5 * world.config.gravity * world.config.dt
    world.add_body(bird)
    world.active_bird_ids = [bid]
    world.tap_armed = BIRD_SPECS[bird_type].ability != "none"
    return world


def activate_ability(world: World) -> World:
    """Trigger the in-flight bird's special ability (the screen tap)."""
    active = [world.bodies[bid] for bid in world.active_bird_ids
              if bid in world.bodies and world.bodies[bid].alive]
    if not active:
        raise IllegalAction("no active bird")
    if not world.tap_armed:
        raise IllegalAction("bird is not tap-armed")
    bird = active[0]
    spec = BIRD_SPECS[bird.bird_type]
    if spec.ability == "none":
        raise IllegalAction("this bird has no ability")
    world.tap_armed = False
    if spec.ability == "boost":
        bird.vx *= 1.7
        bird.vy *= 1.7
        return world
    if spec.ability == "split3":
        speed = bird.speed()
        heading = math.atan2(bird.vy, bird.vx)
        bird.alive = False
        del world.bodies[bird.id]
        new_ids = []
        for tag, off in (("a", math.radians(15.0)), ("b", 0.0), ("c", -math.radians(15.0))):
            child = make_bird(f"{bird.id}:{tag}", bird.bird_type)
            child.mass = bird.mass / 3.0
            child.inv_mass = 3.0 / bird.mass
            child.inv_inertia = child.inv_inertia * 3.0
            child.x = bird.x
            child.y = bird.y
            child.vx = speed * math.cos(heading + off)
            child.vy = speed * math.sin(heading + off)
            world.add_body(child)
            new_ids.append(child.id)
        world.active_bird_ids = new_ids
        return world
    if spec.ability == "blast":
        cx, cy = bird.x, bird.y
        bird.alive = False
        del world.bodies[bird.id]
        world.active_bird_ids = [i for i in world.active_bird_ids if i in world.bodies]
        tnt_queue = _blast(world, cx, cy, world.config.black_radius, world.config.black_impulse)
        while tnt_queue:
            tnt = tnt_queue.pop(0)
            world._emit(tnt.id, "tnt_detonated", 0.0)
            tnt_queue.extend(_blast(world, tnt.x, tnt.y, world.config.tnt_radius,
                                    world.config.tnt_impulse))
        return world
    if spec.ability == "egg_bomb":
        egg = Body(f"{bird.id}:egg", "bird", "none", Circle(0.25),
                   bird.x, bird.y - spec.radius - 0.26, 0.0,
                   world.config.egg_mass, shape_inertia(Circle(0.25), world.config.egg_mass),
                   float("inf"), 0.1, 0.4)
        egg.vy = -world.config.egg_speed
        world.add_body(egg)
        world.active_bird_ids.append(egg.id)
        bird.vx *= 0.6
        bird.vy = abs(bird.vy) * 0.3 + 8.0
        return world
    raise IllegalAction(f"unknown ability: {spec.ability}")


def settle(world: World, v_eps: float | None = None, k_steps: int | None = None,
           t_cap: float | None = None, on_step=None) -> tuple[World, int]:
    """Step until every body is slow for k consecutive steps, or the cap.

    Returns the (mutated) world and the number of steps taken.  ``on_step``
    is called after each step with (world, steps_so_far); it is how timed
    taps are injected during a shot.
    """
    cfg = world.config
    v_eps = cfg.settle_v_eps if v_eps is None else v_eps
    k_steps = cfg.settle_k_steps if k_steps is None else k_steps
    t_cap = cfg.settle_t_cap if t_cap is None else t_cap
    if v_eps <= 0:
        raise ValueError("v_eps must be positive")
    if k_steps < 1:
        raise ValueError("k_steps must be at least 1")
    quiet = 0
    steps = 0
    while True:
        step(world, cfg.dt)
        steps += 1
        if on_step is not None and on_step(world, steps):
            break
        calm = True
        for bid in sorted(world.bodies):
            b = world.bodies[bid]
            if b.inv_mass == 0.0 or not b.alive:
                continue
            if b.speed() >= v_eps or abs(b.omega) >= v_eps:
                calm = False
                break
        quiet = quiet + 1 if calm else 0
        if quiet >= k_steps:
            break
        if steps * cfg.dt >= t_cap:
            break
    return world, steps


def prewarm(world: World, steps: int = 30) -> None:
    """Establish resting contacts for a freshly built scene.

    Runs a short damage-free simulation so stacked structures converge to
    their load-bearing equilibrium, then zeroes all velocities.  Without
    this, the solver's first-contact convergence transient can register as
    a damaging impact on load-bearing supports.
    """
    world.damage_enabled = False
    for _ in range(steps):
        step(world, world.config.dt)
    for bid in sorted(world.bodies):
        b = world.bodies[bid]
        b.vx = 0.0
        b.vy = 0.0
        b.omega = 0.0
    world.damage_enabled = True
    world.time = 0.0
    world.step_index = 0


def retire_flight(world: World) -> None:
    """Remove spent bird bodies (and eggs) once a shot has settled."""
    for bid in list(world.bodies):
        if world.bodies[bid].kind == "bird":
            _wake_neighbors(world, bid)
            del world.bodies[bid]
    world.active_bird_ids = []
    world.tap_armed = False


def state_hash(world: World) -> str:
    """Canonical digest of poses, velocities, hp, and the event log."""
    h = hashlib.sha256()
    for bid in sorted(world.bodies):
        b = world.bodies[bid]
        h.update(f"{bid}|{b.x!r}|{b.y!r}|{b.angle!r}|{b.vx!r}|{b.vy!r}|{b.omega!r}|{b.hp!r}\n".encode())
    for ev in world.event_log:
        h.update(f"{ev.step}|{ev.subject}|{ev.kind}|{ev.amount!r}\n".encode())
    h.update(f"{world.step_index}|{len(world.birds_queue)}\n".encode())
    return h.hexdigest()
