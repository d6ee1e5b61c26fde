"""Knockout orchestration: stages, leaderboards, advancement, and benchmarks.

A tournament runs qualification -> quarter-finals (grouped, group-scoped
leaderboard visibility) -> semi-final (top four) -> grand final (top two).
Every attempt is persisted as one JSON line so a whole stage can be
replayed and checked for equality.
"""

from __future__ import annotations

import json
import logging
import math
import os
import threading
import time as time_mod
from dataclasses import dataclass, field

from .agents import make_agent
from .client import ClientSession, InProcessTransport, play_round
from .levels import Level
from .server import DEFAULT_BUDGET, AttemptRecord, GameServer, GameSession, ScoreBoard

log = logging.getLogger(__name__)

STAGE_NAMES = ("qualification", "quarterfinal", "semifinal", "grandfinal", "benchmark", "mvm")


@dataclass
class Stage:
    name: str
    groups: list[list[str]]
    levels: list[str]
    budget: float = DEFAULT_BUDGET
    visibility: str = "global"

    def agents(self) -> list[str]:
        return [a for g in self.groups for a in g]


@dataclass
class AgentSpec:
    id: str
    kind: str
    seed: int = 0
    options: dict = field(default_factory=dict)


@dataclass
class LeaderboardRow:
    agent_id: str
    combined: int
    per_level: dict[str, int]


class Leaderboard:
    """Ranked per-agent combined scores with a deterministic tie-break."""

    def __init__(self, rows: list[LeaderboardRow]):
        self.rows = sorted(rows, key=lambda r: self._rank_key(r))

    @staticmethod
    def _rank_key(row: LeaderboardRow):
        # Higher combined first; ties broken by the higher best single-level
        # score, then lexicographic agent id.
        bests = sorted(row.per_level.values(), reverse=True)
        return (-row.combined, [-b for b in bests], row.agent_id)

    def ranking(self) -> list[str]:
        return [r.agent_id for r in self.rows]

    def combined(self, agent_id: str) -> int:
        for r in self.rows:
            if r.agent_id == agent_id:
                return r.combined
        return 0

    def top(self, n: int) -> list[str]:
        return self.ranking()[:n]

    def as_json(self) -> list[dict]:
        return [{"agent_id": r.agent_id, "combined": r.combined,
                 "per_level": dict(sorted(r.per_level.items()))} for r in self.rows]


def combined_score(session_history: list[dict]) -> int:
    """Sum over levels of the best total among solved attempts."""
    best: dict[str, int] = {}
    for attempt in session_history:
        if not attempt.get("solved"):
            continue
        level = attempt["level_id"]
        total = int(attempt["total"])
        if total > best.get(level, 0):
            best[level] = total
    return sum(best.values())


def leaderboard_from_attempts(agents: list[str], attempts: list[dict]) -> Leaderboard:
    rows = []
    for agent_id in agents:
        history = [a for a in attempts if a["agent_id"] == agent_id]
        per_level: dict[str, int] = {}
        for a in history:
            if a.get("solved") and a["total"] > per_level.get(a["level_id"], 0):
                per_level[a["level_id"]] = a["total"]
        rows.append(LeaderboardRow(agent_id, combined_score(history), per_level))
    return Leaderboard(rows)


def snake_groups(ranked: list[str], n_groups: int) -> list[list[str]]:
    """Deal a ranking into groups boustrophedon-style (1..n, n..1, ...)."""
    groups: list[list[str]] = [[] for _ in range(n_groups)]
    direction = 1
    idx = 0
    for agent in ranked:
        groups[idx].append(agent)
        nxt = idx + direction
        if nxt < 0 or nxt >= n_groups:
            direction = -direction
        else:
            idx = nxt
    return groups


class StageNotComplete(ValueError):
    pass


def advance(stage: Stage, board: Leaderboard) -> Stage:
    """Build the next stage's groups from a finished stage's leaderboard.

    Levels and budget are carried over; the caller swaps in the next
    round's level set.  Tie-breaks are deterministic and logged.
    """
    missing = set(stage.agents()) - set(board.ranking())
    if missing:
        raise StageNotComplete(f"no results for: {sorted(missing)}")
    ranked = board.ranking()
    _log_ties(board)
    if stage.name == "qualification":
        n_groups = max(1, -(-len(ranked) // 4))  # ceil; groups of 3-4
        if len(ranked) <= 4:
            n_groups = 1
        return Stage("quarterfinal", snake_groups(ranked, n_groups),
                     list(stage.levels), stage.budget, visibility="group")
    if stage.name == "quarterfinal":
        return Stage("semifinal", [board.top(4)], list(stage.levels),
                     stage.budget, visibility="global")
    if stage.name == "semifinal":
        return Stage("grandfinal", [board.top(2)], list(stage.levels),
                     stage.budget, visibility="global")
    raise ValueError(f"no stage follows {stage.name!r}")


def champion(board: Leaderboard) -> str:
    return board.ranking()[0]


def _log_ties(board: Leaderboard) -> None:
    rows = board.rows
    for a, b in zip(rows, rows[1:]):
        if a.combined == b.combined:
            log.info("tie at %d between %s and %s broken by per-level bests then id",
                     a.combined, a.agent_id, b.agent_id)


class StageRunner:
    """Runs one stage: one concurrent session per agent, persisted attempts."""

    def __init__(self, levels_by_id: dict[str, Level], out_dir: str | None = None,
                 time_scale: float = 1.0, clock_mode: str = "logical",
                 max_attempts: int = 120, watchdog_idle: float | None = None):
        self.levels_by_id = levels_by_id
        self.out_dir = out_dir
        self.time_scale = time_scale
        self.clock_mode = clock_mode
        self.max_attempts = max_attempts
        self.watchdog_idle = watchdog_idle

    def run(self, stage: Stage, agent_specs: list[AgentSpec]) -> Leaderboard:
        levels = [self.levels_by_id[lid] for lid in stage.levels]
        groups = {a: f"group{gi}" for gi, g in enumerate(stage.groups) for a in g}
        board_store = ScoreBoard(visibility=stage.visibility, groups=groups)
        attempts: list[dict] = []
        attempts_lock = threading.Lock()

        def on_attempt(record: AttemptRecord) -> None:
            with attempts_lock:
                attempts.append(record.as_json())

        game = GameServer(levels, budget=stage.budget, clock_mode=self.clock_mode,
                          time_scale=self.time_scale, scoreboard=board_store,
                          on_attempt=on_attempt)
        specs = [s for s in agent_specs if s.id in set(stage.agents())]
        threads = []
        failures: dict[str, str] = {}

        def play(spec: AgentSpec) -> None:
            try:
                agent = make_agent(spec.kind, seed=spec.seed, **spec.options)
                session = ClientSession(InProcessTransport(game), spec.id)
                play_round(session, agent, max_attempts=self.max_attempts)
            except Exception as exc:  # a broken agent scores 0, stage goes on
                failures[spec.id] = str(exc)
                log.warning("agent %s failed: %s", spec.id, exc)

        if self.watchdog_idle is not None:
            stop_watchdog = threading.Event()
            watchdog = threading.Thread(
                target=self._watch_idle_sessions,
                args=(game, stop_watchdog), daemon=True)
            watchdog.start()
        for spec in specs:
            t = threading.Thread(target=play, args=(spec,), daemon=True)
            t.start()
            threads.append(t)
        for t in threads:
            t.join()
        if self.watchdog_idle is not None:
            stop_watchdog.set()

        board = leaderboard_from_attempts(stage.agents(), attempts)
        if self.out_dir:
            self._persist(stage, attempts, board, failures)
        return board

    def _watch_idle_sessions(self, game: GameServer, stop: threading.Event) -> None:
        """Reset levels for agents that stall without shooting (wall clock)."""
        idle = self.watchdog_idle * self.time_scale
        while not stop.wait(idle / 4):
            now = time_mod.monotonic()
            for session in list(game.sessions.values()):
                if session.world is None:
                    continue
                if now - session.last_action_at > idle:
                    log.warning("watchdog: restarting idle level for %s", session.agent_id)
                    try:
                        session.restart_level()
                    except Exception:
                        pass
                    session.last_action_at = now

    def _persist(self, stage: Stage, attempts: list[dict], board: Leaderboard,
                 failures: dict[str, str]) -> None:
        stage_dir = os.path.join(self.out_dir, stage.name)
        os.makedirs(stage_dir, exist_ok=True)
        with open(os.path.join(stage_dir, "attempts.jsonl"), "w", encoding="utf-8") as fh:
            for a in attempts:
                fh.write(json.dumps(a, sort_keys=True) + "\n")
        payload = {
            "stage": stage.name,
            "groups": stage.groups,
            "levels": stage.levels,
            "budget": stage.budget,
            "visibility": stage.visibility,
            "leaderboard": board.as_json(),
            "failures": failures,
        }
        with open(os.path.join(stage_dir, "leaderboard.json"), "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)


def replay_stage(levels_by_id: dict[str, Level], attempts: list[dict]) -> list[dict]:
    """Re-execute persisted shots on fresh worlds; returns recomputed attempts.

    Byte-equality of the recomputed records against the originals is the
    stage's replay-invariance check.
    """
    out = []
    for attempt in attempts:
        level = levels_by_id[attempt["level_id"]]
        session = GameSession(attempt["agent_id"], [level])
        session.load_level(0)
        for shot in attempt["shots"]:
            percept = session.percept()
            if percept["level_state"] != "playing":
                break
            session.shoot(math.radians(shot["angle_deg"]), shot["speed_fraction"],
                          shot["tap_ms"])
        score = session._attempt_score()
        out.append({
            "agent_id": attempt["agent_id"],
            "level_index": attempt["level_index"],
            "level_id": attempt["level_id"],
            "shots": attempt["shots"],
            "total": score.total,
            "damage_points": score.damage_points,
            "pigs_killed": score.pigs_killed,
            "solved": score.solved,
        })
    return out


def run_tournament(levels_by_id: dict[str, Level], agent_specs: list[AgentSpec],
                   rounds: dict[str, list[str]], budget: float = DEFAULT_BUDGET,
                   out_dir: str | None = None, time_scale: float = 1.0,
                   max_attempts: int = 120) -> dict:
    """Full knockout: qualification through grand final.

    ``rounds`` maps stage name -> level ids for that round.  Returns a
    summary with every stage leaderboard and the champion.
    """
    runner = StageRunner(levels_by_id, out_dir=out_dir, time_scale=time_scale,
                         max_attempts=max_attempts)
    all_ids = [s.id for s in agent_specs]
    stage = Stage("qualification", [all_ids], rounds["qualification"], budget, "global")
    summary: dict = {"stages": {}}
    while True:
        board = runner.run(stage, agent_specs)
        summary["stages"][stage.name] = {
            "groups": stage.groups,
            "leaderboard": board.as_json(),
        }
        if stage.name == "grandfinal":
            summary["champion"] = champion(board)
            break
        nxt = advance(stage, board)
        nxt.levels = rounds.get(nxt.name, stage.levels)
        stage = nxt
    return summary


def benchmark(agent_spec: AgentSpec, levels: list[Level], budget: float,
              time_scale: float = 1.0, max_attempts: int = 200) -> dict:
    """Single-agent run over a level set with the stage machinery."""
    levels_by_id = {l.id: l for l in levels}
    runner = StageRunner(levels_by_id, time_scale=time_scale, max_attempts=max_attempts)
    stage = Stage("benchmark", [[agent_spec.id]], [l.id for l in levels], budget, "global")
    board = runner.run(stage, [agent_spec])
    row = board.rows[0]
    return {"agent_id": agent_spec.id, "total": row.combined,
            "per_level": dict(sorted(row.per_level.items()))}
