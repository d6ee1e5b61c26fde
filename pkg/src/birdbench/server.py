"""Game server: sessions, percepts, the wire protocol, and the TCP front end.

The protocol is newline-delimited JSON over TCP.  Requests look like
``{"op": ..., "args": {...}, "seq": n}`` and every request gets exactly
one ``{"seq": n, "ok": bool, "data"|"error": ...}`` response, in order.
A malformed line is answered with ``seq: null`` and the connection stays
up.  The full op vocabulary and worked examples live in docs/protocol.md.
"""

from __future__ import annotations

import json
import math
import socketserver
import threading
import time as time_mod
from dataclasses import dataclass

from . import levels as levels_mod
from . import physics
from .levels import Level, score_attempt
from .physics import IllegalAction, OutOfBirds, PhysicsConfig

SCREEN_W = 840
SCREEN_H = 480
DEFAULT_PORT = 2004
DEFAULT_BUDGET = 1800.0  # competition round: 30 minutes for 8 levels
DEFAULT_GRACE = 120.0
MVM_BUDGET = 600.0  # man-vs-machine round: 10 minutes for 4 levels

# Ops that only read state and stay available during the grace window.
_INFO_OPS = {"HELLO", "GET_STATE", "GET_MY_SCORE", "GET_BEST_SCORES", "TIME_LEFT"}


class ProtocolError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class RoundClock:
    """Round time budget, in wall seconds or simulated (logical) seconds.

    Logical mode only advances while shots simulate, which makes entire
    rounds replayable bit-for-bit; wall mode matches live competition use.
    """

    def __init__(self, budget: float, grace: float = DEFAULT_GRACE,
                 mode: str = "wall", time_scale: float = 1.0, now=time_mod.monotonic):
        if mode not in ("wall", "logical"):
            raise ValueError(f"unknown clock mode: {mode!r}")
        self.mode = mode
        self.budget = budget * time_scale
        self.grace = grace * time_scale
        self._now = now
        self._start = now() if mode == "wall" else 0.0
        self._consumed = 0.0

    def remaining(self) -> float:
        if self.mode == "wall":
            return max(self.budget - (self._now() - self._start), 0.0)
        return max(self.budget - self._consumed, 0.0)

    def consume(self, sim_seconds: float) -> None:
        if self.mode == "logical":
            self._consumed += sim_seconds

    def actions_allowed(self) -> bool:
        return self.remaining() > 0.0

    def in_grace(self) -> bool:
        if self.actions_allowed():
            return True
        if self.mode == "logical":
            return True
        over = (self._now() - self._start) - self.budget
        return over <= self.grace


class ScoreBoard:
    """Shared per-(agent, level) best solved scores with max-merge updates."""

    def __init__(self, visibility: str = "global", groups: dict[str, str] | None = None):
        if visibility not in ("global", "group"):
            raise ValueError(f"unknown visibility: {visibility!r}")
        self.visibility = visibility
        self.groups = dict(groups or {})
        self._best: dict[tuple[str, str], int] = {}
        self._lock = threading.Lock()

    def record(self, agent_id: str, level_id: str, total: int) -> None:
        key = (agent_id, level_id)
        with self._lock:
            if total > self._best.get(key, 0):
                self._best[key] = total

    def agent_bests(self, agent_id: str) -> dict[str, int]:
        with self._lock:
            return {lvl: score for (agent, lvl), score in self._best.items() if agent == agent_id}

    def visible_to(self, agent_id: str) -> dict[str, dict]:
        """Per-level high scores this agent may see under the stage's scoping."""
        my_group = self.groups.get(agent_id)
        out: dict[str, dict] = {}
        with self._lock:
            items = sorted(self._best.items())
        for (agent, level_id), score in items:
            if self.visibility == "group" and self.groups.get(agent) != my_group:
                continue
            cur = out.get(level_id)
            if cur is None or score > cur["score"] or (score == cur["score"] and agent < cur["agent_id"]):
                out[level_id] = {"agent_id": agent, "score": score}
        return out


@dataclass
class AttemptRecord:
    agent_id: str
    level_index: int
    level_id: str
    shots: list[dict]
    total: int
    damage_points: int
    pigs_killed: int
    solved: bool

    def as_json(self) -> dict:
        return {
            "agent_id": self.agent_id,
            "level_index": self.level_index,
            "level_id": self.level_id,
            "shots": self.shots,
            "total": self.total,
            "damage_points": self.damage_points,
            "pigs_killed": self.pigs_killed,
            "solved": self.solved,
        }


class GameSession:
    """One agent's seat: a private world per attempt plus round bookkeeping."""

    def __init__(self, agent_id: str, levels: list[Level],
                 config: PhysicsConfig | None = None,
                 clock: RoundClock | None = None,
                 scoreboard: ScoreBoard | None = None,
                 on_attempt=None):
        self.agent_id = agent_id
        self.levels = levels
        self.config = config or PhysicsConfig()
        self.clock = clock or RoundClock(DEFAULT_BUDGET, mode="logical")
        self.scoreboard = scoreboard or ScoreBoard()
        self.on_attempt = on_attempt
        self.world: physics.World | None = None
        self.level_index: int | None = None
        self.current_shots: list[dict] = []
        self.attempt_finalized = False
        self.attempts: list[AttemptRecord] = []
        self.attempt_counts: dict[int, int] = {}
        self.last_action_at = time_mod.monotonic()

    # -- level lifecycle ------------------------------------------------

    def load_level(self, index: int) -> dict:
        if not 0 <= index < len(self.levels):
            raise ProtocolError("unknown_level", f"no level with index {index}")
        self._finalize_attempt()
        level = self.levels[index]
        self.world = levels_mod.world_from_level(level, self.config)
        self.level_index = index
        self.current_shots = []
        self.attempt_finalized = False
        self.attempt_counts[index] = self.attempt_counts.get(index, 0) + 1
        return {"level_id": level.id, "index": index, "birds": list(level.birds)}

    def restart_level(self) -> dict:
        if self.level_index is None:
            raise ProtocolError("no_level", "no level loaded")
        return self.load_level(self.level_index)

    def _level_state(self) -> str:
        assert self.world is not None
        if self.world.solved():
            return "solved"
        if self.world.lost():
            return "lost"
        return "playing"

    def _attempt_score(self) -> levels_mod.AttemptScore:
        assert self.world is not None
        return score_attempt(self.world.event_log, len(self.world.birds_queue),
                             self.world.solved())

    def _finalize_attempt(self) -> None:
        """Record the attempt in progress, if it did anything."""
        if self.world is None or self.attempt_finalized or not self.current_shots:
            return
        self.attempt_finalized = True
        level = self.levels[self.level_index]
        score = self._attempt_score()
        record = AttemptRecord(
            agent_id=self.agent_id,
            level_index=self.level_index,
            level_id=level.id,
            shots=list(self.current_shots),
            total=score.total,
            damage_points=score.damage_points,
            pigs_killed=score.pigs_killed,
            solved=score.solved,
        )
        self.attempts.append(record)
        if score.solved:
            self.scoreboard.record(self.agent_id, level.id, score.total)
        if self.on_attempt is not None:
            self.on_attempt(record)

    # -- percept ----------------------------------------------------------

    def percept(self) -> dict:
        if self.world is None:
            raise ProtocolError("no_level", "no level loaded")
        world = self.world
        scale = SCREEN_W / levels_mod.WORLD_WIDTH
        objects = []
        for bid in sorted(world.bodies):
            body = world.bodies[bid]
            if not body.alive:
                continue
            x0, y0, x1, y1 = body.aabb()
            objects.append({
                "id": bid,
                "kind": body.kind,
                "material": body.material,
                "bounds": _screen_bounds(x0, y0, x1, y1, scale),
                "shape": _shape_tag(body.shape),
                "rot": round(body.angle, 3),
            })
        sx, sy = world.launch.x, world.launch.y
        objects.append({
            "id": "slingshot",
            "kind": "slingshot",
            "material": "none",
            "bounds": _screen_bounds(sx - 0.5, sy - 1.0, sx + 0.5, sy + 1.0, scale),
            "shape": "box",
            "rot": 0.0,
        })
        queue = list(world.birds_queue)
        score = self._attempt_score()
        return {
            "level_index": self.level_index,
            "level_id": self.levels[self.level_index].id,
            "objects": objects,
            "current_bird": queue[0] if queue else None,
            "birds_remaining": queue,
            "level_state": self._level_state(),
            "current_score": score.total,
            "time_left": round(self.clock.remaining(), 3),
        }

    # -- actions ---------------------------------------------------------

    def shoot(self, angle: float, speed_fraction: float, tap_ms: float) -> dict:
        """Launch, apply the tap mid-flight, block until settled, and score."""
        if self.world is None:
            raise ProtocolError("no_level", "no level loaded")
        if not self.clock.actions_allowed():
            raise ProtocolError("round_closed", "round time budget exhausted")
        state = self._level_state()
        if state != "playing":
            if not self.world.birds_queue and state == "lost":
                raise OutOfBirds("no birds left")
            raise IllegalAction(f"level is {state}; load or restart to continue")
        world = self.world
        before = self._attempt_score().total
        physics.launch_bird(world, angle, speed_fraction)
        self.current_shots.append({
            "angle_deg": math.degrees(angle),
            "speed_fraction": speed_fraction,
            "tap_ms": tap_ms,
        })
        self.last_action_at = time_mod.monotonic()
        tap_step = int(round((tap_ms / 1000.0) / world.config.dt)) if tap_ms > 0 else 0

        def on_step(w, steps):
            if tap_step and steps == tap_step and w.tap_armed and w.bird_in_flight():
                physics.activate_ability(w)

        _, steps = physics.settle(world, on_step=on_step)
        physics.retire_flight(world)
        self.clock.consume(steps * world.config.dt)
        after = self._attempt_score()
        state = self._level_state()
        if state in ("solved", "lost"):
            self._finalize_attempt()
        return {
            "level_state": state,
            "score": after.total,
            "delta": after.total - before,
            "birds_remaining": len(world.birds_queue),
            "pigs_remaining": world.pigs_alive(),
        }

    def my_score(self) -> dict:
        bests = self.scoreboard.agent_bests(self.agent_id)
        return {"combined": sum(bests.values()), "per_level": bests}


def run_round_clock(session: GameSession, budget: float, grace: float = DEFAULT_GRACE,
                    mode: str = "wall", time_scale: float = 1.0) -> None:
    """Arm (or re-arm) a session's round clock with the given budget."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    session.clock = RoundClock(budget, grace, mode, time_scale)


def _screen_bounds(x0: float, y0: float, x1: float, y1: float, scale: float) -> list[int]:
    """World AABB to outward-rounded screen pixels (origin top-left)."""
    px0 = math.floor(x0 * scale)
    px1 = math.ceil(x1 * scale)
    py0 = math.floor(SCREEN_H - y1 * scale)
    py1 = math.ceil(SCREEN_H - y0 * scale)
    return [
        max(0, min(px0, SCREEN_W)),
        max(0, min(py0, SCREEN_H)),
        max(0, min(px1, SCREEN_W)),
        max(0, min(py1, SCREEN_H)),
    ]


def _shape_tag(shape) -> str:
    from .geometry import Box, Circle, HollowBox

    if isinstance(shape, Circle):
        return "circle"
    if isinstance(shape, Box):
        return "box"
    if isinstance(shape, HollowBox):
        return "hollow_box"
    return "polygon"


def snapshot_percept(session: GameSession) -> dict:
    return session.percept()


class GameServer:
    """Session registry plus the op dispatcher shared by TCP and in-process use."""

    def __init__(self, levels: list[Level], config: PhysicsConfig | None = None,
                 budget: float = DEFAULT_BUDGET, grace: float = DEFAULT_GRACE,
                 clock_mode: str = "logical", time_scale: float = 1.0,
                 scoreboard: ScoreBoard | None = None, on_attempt=None):
        self.levels = levels
        self.config = config or PhysicsConfig()
        self.budget = budget
        self.grace = grace
        self.clock_mode = clock_mode
        self.time_scale = time_scale
        self.scoreboard = scoreboard or ScoreBoard()
        self.on_attempt = on_attempt
        self.sessions: dict[str, GameSession] = {}
        self._lock = threading.Lock()

    def hello(self, agent_id: str) -> GameSession:
        with self._lock:
            session = self.sessions.get(agent_id)
            if session is None:
                session = GameSession(
                    agent_id, self.levels, self.config,
                    clock=RoundClock(self.budget, self.grace, self.clock_mode,
                                     self.time_scale),
                    scoreboard=self.scoreboard,
                    on_attempt=self.on_attempt,
                )
                self.sessions[agent_id] = session
            return session

    def config_payload(self, session: GameSession) -> dict:
        return {
            "agent_id": session.agent_id,
            "levels": len(self.levels),
            "world_width": levels_mod.WORLD_WIDTH,
            "world_height": levels_mod.WORLD_HEIGHT,
            "screen_width": SCREEN_W,
            "screen_height": SCREEN_H,
            "v_max": self.config.v_max,
            "gravity": self.config.gravity,
            "time_left": round(session.clock.remaining(), 3),
        }

    def handle(self, session: GameSession | None, msg: dict) -> tuple[dict, GameSession | None]:
        """Dispatch one request; returns (response, possibly-new session)."""
        seq = msg.get("seq")
        op = msg.get("op")
        args = msg.get("args") or {}
        if not isinstance(op, str):
            return _err(seq, "bad_request", "request needs a string 'op'"), session
        if not isinstance(args, dict):
            return _err(seq, "bad_request", "'args' must be an object"), session
        try:
            if op == "HELLO":
                agent_id = args.get("agent_id")
                if not isinstance(agent_id, str) or not agent_id:
                    raise ProtocolError("bad_args", "HELLO needs a non-empty agent_id")
                session = self.hello(agent_id)
                return _ok(seq, self.config_payload(session)), session
            if session is None:
                raise ProtocolError("protocol_error", "say HELLO first")
            if not session.clock.in_grace() and op not in ("HELLO",):
                raise ProtocolError("round_closed", "round is over")
            if op not in _INFO_OPS and not session.clock.actions_allowed():
                raise ProtocolError("round_closed", "round time budget exhausted")

            if op == "LOAD_LEVEL":
                index = args.get("index")
                if not isinstance(index, int):
                    raise ProtocolError("bad_args", "LOAD_LEVEL needs an integer index")
                return _ok(seq, session.load_level(index)), session
            if op == "RESTART_LEVEL":
                return _ok(seq, session.restart_level()), session
            if op == "GET_STATE":
                return _ok(seq, session.percept()), session
            if op == "SHOOT":
                try:
                    angle_deg = float(args["angle_deg"])
                    speed_fraction = float(args["speed_fraction"])
                    tap_ms = float(args.get("tap_ms", 0))
                except (KeyError, TypeError, ValueError) as exc:
                    raise ProtocolError(
                        "bad_args", "SHOOT needs numeric angle_deg, speed_fraction, tap_ms"
                    ) from exc
                if not 0.0 <= angle_deg < 90.0:
                    raise ProtocolError("bad_args", "angle_deg must lie in [0, 90)")
                if not 0.0 <= speed_fraction <= 1.0:
                    raise ProtocolError("bad_args", "speed_fraction must lie in [0, 1]")
                if tap_ms < 0:
                    raise ProtocolError("bad_args", "tap_ms must be non-negative")
                result = session.shoot(math.radians(angle_deg), speed_fraction, tap_ms)
                return _ok(seq, result), session
            if op == "GET_MY_SCORE":
                return _ok(seq, session.my_score()), session
            if op == "GET_BEST_SCORES":
                return _ok(seq, {"per_level": session.scoreboard.visible_to(session.agent_id)}), session
            if op == "TIME_LEFT":
                return _ok(seq, {"time_left": round(session.clock.remaining(), 3)}), session
            raise ProtocolError("unknown_op", f"unknown op: {op!r}")
        except ProtocolError as exc:
            return _err(seq, exc.code, str(exc)), session
        except OutOfBirds as exc:
            return _err(seq, "out_of_birds", str(exc)), session
        except IllegalAction as exc:
            return _err(seq, "illegal_action", str(exc)), session
        except ValueError as exc:
            return _err(seq, "bad_args", str(exc)), session


def _ok(seq, data: dict) -> dict:
    return {"seq": seq, "ok": True, "data": data}


def _err(seq, code: str, message: str) -> dict:
    return {"seq": seq, "ok": False, "error": {"code": code, "message": message}}


def encode_response(resp: dict) -> bytes:
    return (json.dumps(resp, separators=(",", ":")) + "\n").encode("utf-8")


def parse_request(line: str) -> dict | None:
    try:
        msg = json.loads(line)
    except json.JSONDecodeError:
        return None
    if not isinstance(msg, dict):
        return None
    return msg


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        server: BirdTCPServer = self.server  # type: ignore[assignment]
        session = None
        while True:
            try:
                raw = self.rfile.readline()
            except (ConnectionError, OSError):
                break
            if not raw:
                break
            line = raw.decode("utf-8", errors="replace").strip()
            if not line:
                continue
            msg = parse_request(line)
            if msg is None:
                resp = _err(None, "parse_error", "request is not a JSON object")
            else:
                resp, session = server.game.handle(session, msg)
            try:
                self.wfile.write(encode_response(resp))
            except (ConnectionError, OSError):
                break


class BirdTCPServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, game: GameServer, host: str = "127.0.0.1", port: int = DEFAULT_PORT):
        super().__init__((host, port), _Handler)
        self.game = game

    @property
    def port(self) -> int:
        return self.server_address[1]


def serve_background(game: GameServer, host: str = "127.0.0.1", port: int = 0) -> BirdTCPServer:
    """Start a TCP server on a daemon thread; port 0 picks a free port."""
    server = BirdTCPServer(game, host, port)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server
