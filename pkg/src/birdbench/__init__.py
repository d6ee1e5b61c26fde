"""birdbench: a deterministic physics-puzzle competition stack.

A slingshot-and-pigs game engine, a newline-JSON TCP game server,
reference shot-selection agents, and a knockout tournament harness.
"""

from .agents import (
    BlockingAgent,
    MultiStrategyAgent,
    NaiveAgent,
    Shot,
    SimulationAgent,
    make_agent,
)
from .geometry import Polyline, TrajectorySolution, Vec2, solve_launch_angles
from .levels import AttemptScore, Level, load_level, score_attempt
from .physics import BIRD_SPECS, PhysicsConfig, World, compute_damage
from .server import GameServer, GameSession

__version__ = "0.1.0"

__all__ = [
    "BIRD_SPECS",
    "AttemptScore",
    "BlockingAgent",
    "GameServer",
    "GameSession",
    "Level",
    "MultiStrategyAgent",
    "NaiveAgent",
    "PhysicsConfig",
    "Polyline",
    "Shot",
    "SimulationAgent",
    "TrajectorySolution",
    "Vec2",
    "World",
    "compute_damage",
    "load_level",
    "make_agent",
    "score_attempt",
    "solve_launch_angles",
]
