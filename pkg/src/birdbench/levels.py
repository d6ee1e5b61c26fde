"""Level schema, loading, scoring rules, and the stability/solvability validators.

A level is a single JSON document:

    {"id": "L01", "slingshot": {"x": 10, "y": 2},
     "birds": ["red", ...],
     "terrain": [{"x0": 0, "x1": 84, "h": 0}, ...],
     "objects": [{"kind": "block", "material": "wood",
                  "shape": {"type": "box", "w": 1, "h": 2},
                  "x": 50, "y": 1, "rot": 0}, ...],
     "metadata": {...}}                      # optional

Only the competition object vocabulary is accepted; anything else is a
load error.  Scoring constants live in one ScoreConfig record and are
non-canonical artifact choices.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from . import physics
from .geometry import Box, Circle, ConvexPolygon, HollowBox, Shape, Vec2, shape_aabb
from .physics import DamageEvent, PhysicsConfig, World

WORLD_WIDTH = 84.0
WORLD_HEIGHT = 48.0

ALLOWED_KINDS = ("block", "pig", "tnt")
ALLOWED_MATERIALS = ("wood", "ice", "stone")
ALLOWED_BIRDS = tuple(physics.BIRD_SPECS)
ALLOWED_SHAPES = ("circle", "box", "polygon", "hollow_box")

_LEVEL_KEYS = {"id", "slingshot", "birds", "terrain", "objects", "metadata"}
_OBJECT_KEYS = {"kind", "material", "shape", "x", "y", "rot"}


class LevelError(ValueError):
    """Malformed or out-of-vocabulary level document."""


@dataclass(frozen=True)
class ObjectSpec:
    kind: str
    material: str
    shape: Shape
    x: float
    y: float
    rot: float


@dataclass(frozen=True)
class TerrainSegment:
    x0: float
    x1: float
    h: float


@dataclass(frozen=True)
class Level:
    id: str
    slingshot: Vec2
    birds: tuple[str, ...]
    terrain: tuple[TerrainSegment, ...]
    objects: tuple[ObjectSpec, ...]
    metadata: dict = field(default_factory=dict)

    def pig_count(self) -> int:
        return sum(1 for o in self.objects if o.kind == "pig")


@dataclass(frozen=True)
class AttemptScore:
    damage_points: int
    pigs_killed: int
    birds_remaining: int
    solved: bool
    total: int


@dataclass
class ScoreConfig:
    pig_killed: int = 5000
    block_destroyed: int = 500
    block_damaged: int = 200
    tnt_detonated: int = 1000
    bird_bonus: int = 10000


SCORING = ScoreConfig()


@dataclass(frozen=True)
class ValidationReport:
    stable: bool
    max_drift: float
    solvable: bool | None = None
    probe_shots: int = 0
    solution: tuple | None = None


def _shape_from_doc(doc: dict) -> Shape:
    if not isinstance(doc, dict) or "type" not in doc:
        raise LevelError("shape must be an object with a 'type' field")
    kind = doc["type"]
    try:
        if kind == "circle":
            return Circle(float(doc["r"]))
        if kind == "box":
            return Box(float(doc["w"]), float(doc["h"]))
        if kind == "hollow_box":
            return HollowBox(float(doc["w"]), float(doc["h"]), float(doc["wall"]))
        if kind == "polygon":
            verts = tuple((float(x), float(y)) for x, y in doc["vertices"])
            if len(verts) < 3:
                raise LevelError("polygon needs at least 3 vertices")
            return ConvexPolygon(verts)
    except KeyError as exc:
        raise LevelError(f"shape {kind!r} is missing dimension {exc}") from exc
    raise LevelError(f"disallowed shape type: {kind!r}")


def _shape_to_doc(shape: Shape) -> dict:
    if isinstance(shape, Circle):
        return {"type": "circle", "r": shape.r}
    if isinstance(shape, Box):
        return {"type": "box", "w": shape.w, "h": shape.h}
    if isinstance(shape, HollowBox):
        return {"type": "hollow_box", "w": shape.w, "h": shape.h, "wall": shape.wall}
    if isinstance(shape, ConvexPolygon):
        return {"type": "polygon", "vertices": [list(v) for v in shape.vertices]}
    raise TypeError(f"unknown shape: {shape!r}")


def load_level(document: bytes | str) -> Level:
    """Parse and validate a level document."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise LevelError(f"level document is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise LevelError("level document must be a JSON object")
    unknown = set(doc) - _LEVEL_KEYS
    if unknown:
        raise LevelError(f"unknown level fields: {sorted(unknown)}")
    for key in ("id", "slingshot", "birds", "terrain", "objects"):
        if key not in doc:
            raise LevelError(f"missing level field: {key!r}")

    birds = tuple(doc["birds"])
    if not birds:
        raise LevelError("birds: a level needs at least one bird")
    for b in birds:
        if b not in ALLOWED_BIRDS:
            raise LevelError(f"birds: disallowed bird type {b!r}")

    sling = doc["slingshot"]
    slingshot = Vec2(float(sling["x"]), float(sling["y"]))
    if not (0.0 <= slingshot.x <= WORLD_WIDTH and 0.0 <= slingshot.y <= WORLD_HEIGHT):
        raise LevelError("slingshot: outside world bounds")

    terrain = []
    for i, seg in enumerate(doc["terrain"]):
        x0, x1, h = float(seg["x0"]), float(seg["x1"]), float(seg["h"])
        if not (0.0 <= x0 < x1 <= WORLD_WIDTH) or h < 0.0 or h > WORLD_HEIGHT:
            raise LevelError(f"terrain[{i}]: segment out of bounds")
        terrain.append(TerrainSegment(x0, x1, h))
    terrain.sort(key=lambda s: s.x0)
    for a, b in zip(terrain, terrain[1:]):
        if b.x0 < a.x1:
            raise LevelError("terrain: segments overlap")

    objects = []
    pig_count = 0
    for i, obj in enumerate(doc["objects"]):
        unknown = set(obj) - _OBJECT_KEYS
        if unknown:
            raise LevelError(f"objects[{i}]: unknown fields {sorted(unknown)}")
        kind = obj.get("kind")
        if kind not in ALLOWED_KINDS:
            raise LevelError(f"objects[{i}]: disallowed object kind {kind!r}")
        material = obj.get("material", "none")
        if kind == "block":
            if material not in ALLOWED_MATERIALS:
                raise LevelError(f"objects[{i}]: disallowed block material {material!r}")
        elif material not in ("none",):
            raise LevelError(f"objects[{i}]: {kind} must have material 'none'")
        shape = _shape_from_doc(obj.get("shape", {}))
        if kind == "pig" and not isinstance(shape, Circle):
            raise LevelError(f"objects[{i}]: pigs must be circles")
        x = float(obj["x"])
        y = float(obj["y"])
        rot = float(obj.get("rot", 0.0))
        x0, y0, x1, y1 = shape_aabb(shape, x, y, rot)
        if x0 < 0.0 or y0 < -1.0 or x1 > WORLD_WIDTH or y1 > WORLD_HEIGHT:
            raise LevelError(f"objects[{i}]: outside world bounds")
        if kind == "pig":
            pig_count += 1
        objects.append(ObjectSpec(kind, material, shape, x, y, rot))
    if pig_count == 0:
        raise LevelError("objects: a level needs at least one pig")

    return Level(
        id=str(doc["id"]),
        slingshot=slingshot,
        birds=birds,
        terrain=tuple(terrain),
        objects=tuple(objects),
        metadata=dict(doc.get("metadata", {})),
    )


def serialize_level(level: Level) -> str:
    """Canonical JSON for a level; load(serialize(load(x))) is identity."""
    doc = {
        "id": level.id,
        "slingshot": {"x": level.slingshot.x, "y": level.slingshot.y},
        "birds": list(level.birds),
        "terrain": [{"x0": s.x0, "x1": s.x1, "h": s.h} for s in level.terrain],
        "objects": [
            {
                "kind": o.kind,
                "material": o.material,
                "shape": _shape_to_doc(o.shape),
                "x": o.x,
                "y": o.y,
                "rot": o.rot,
            }
            for o in level.objects
        ],
    }
    if level.metadata:
        doc["metadata"] = level.metadata
    return json.dumps(doc, indent=2)


TERRAIN_DEPTH = 2.0


def world_from_level(level: Level, config: PhysicsConfig | None = None,
                     seed: int = 0, warm: bool = True) -> World:
    """Build a fresh physics world for one attempt at the level."""
    config = config or PhysicsConfig()
    world = World(config, Vec2(level.slingshot.x, level.slingshot.y), seed=seed)
    for i, seg in enumerate(level.terrain):
        shape = Box(seg.x1 - seg.x0, seg.h + TERRAIN_DEPTH)
        cx = (seg.x0 + seg.x1) * 0.5
        cy = (seg.h - TERRAIN_DEPTH) * 0.5
        world.add_body(physics.make_terrain(f"terrain:{i}", shape, cx, cy))
    counters = {"block": 0, "pig": 0, "tnt": 0}
    for spec in level.objects:
        n = counters[spec.kind]
        counters[spec.kind] += 1
        bid = f"{spec.kind}:{n}"
        if spec.kind == "block":
            body = physics.make_block(bid, spec.material, spec.shape, spec.x, spec.y, spec.rot)
        elif spec.kind == "pig":
            body = physics.make_pig(bid, spec.shape, spec.x, spec.y)
        else:
            body = physics.make_tnt(bid, spec.shape, spec.x, spec.y, spec.rot)
        world.add_body(body)
    world.birds_queue = list(level.birds)
    if warm:
        physics.prewarm(world)
    return world


def score_attempt(event_log: list[DamageEvent], birds_remaining: int, solved: bool,
                  scoring: ScoreConfig | None = None) -> AttemptScore:
    """Score one attempt from its damage-event log.

    Damage points: per killed pig, per destroyed block, once per
    damaged-but-surviving block, and per detonated TNT.  The bird bonus
    applies only when the level was solved.
    """
    sc = scoring or SCORING
    pigs = sum(1 for ev in event_log if ev.kind == "pig_killed")
    tnts = sum(1 for ev in event_log if ev.kind == "tnt_detonated")
    destroyed = {ev.subject for ev in event_log if ev.kind == "destroyed"}
    damaged = {ev.subject for ev in event_log if ev.kind == "damaged"} - destroyed
    damage_points = (
        pigs * sc.pig_killed
        + len(destroyed) * sc.block_destroyed
        + len(damaged) * sc.block_damaged
        + tnts * sc.tnt_detonated
    )
    bonus = sc.bird_bonus * birds_remaining if solved else 0
    return AttemptScore(
        damage_points=damage_points,
        pigs_killed=pigs,
        birds_remaining=birds_remaining,
        solved=solved,
        total=damage_points + bonus,
    )


def validate_stability(level: Level, t_sim: float = 5.0, eps: float = 0.1) -> ValidationReport:
    """Simulate with no shot; stable iff nothing drifts by eps or more.

    Drift is measured against the authored positions, so a level that only
    holds together after objects slump into place is reported unstable.
    A destroyed object counts as infinite drift.
    """
    world = world_from_level(level, warm=False)
    start = {}
    counters = {"block": 0, "pig": 0, "tnt": 0}
    for spec in level.objects:
        n = counters[spec.kind]
        counters[spec.kind] += 1
        start[f"{spec.kind}:{n}"] = (spec.x, spec.y)
    physics.prewarm(world)
    steps = int(round(t_sim / world.config.dt))
    for _ in range(steps):
        physics.step(world, world.config.dt)
    max_drift = 0.0
    for bid, (x0, y0) in start.items():
        body = world.bodies.get(bid)
        if body is None or not body.alive:
            max_drift = math.inf
            break
        max_drift = max(max_drift, math.hypot(body.x - x0, body.y - y0))
    return ValidationReport(stable=max_drift < eps, max_drift=max_drift)


def validate_solvability(level: Level, probe_agent, shot_budget: int = 10) -> ValidationReport:
    """Play full attempts with the probe agent, hunting for a solving sequence.

    ``probe_agent`` must expose ``select(percept) -> Shot``.  A False result
    only means "not proven solvable" within the budget.  The solving shot
    sequence is recorded in the report.
    """
    from .server import GameSession  # noqa: PLC0415 (levels <-> server layering)

    shots_used = 0
    attempts = 0
    while attempts < shot_budget:
        attempts += 1
        session = GameSession("probe", [level])
        session.load_level(0)
        shots: list[tuple[float, float, int]] = []
        while True:
            percept = session.percept()
            if percept["level_state"] != "playing":
                break
            shot = probe_agent.select(percept)
            shots.append((shot.angle, shot.speed_fraction, shot.tap_ms))
            shots_used += 1
            session.shoot(shot.angle, shot.speed_fraction, shot.tap_ms)
        if session.percept()["level_state"] == "solved":
            return ValidationReport(stable=True, max_drift=0.0, solvable=True,
                                    probe_shots=shots_used, solution=tuple(shots))
    return ValidationReport(stable=True, max_drift=0.0, solvable=False,
                            probe_shots=shots_used)
