"""Command line front end: serve, agent, tournament, benchmark, validate."""

from __future__ import annotations

import argparse
import glob
import json
import logging
import os
import sys

from . import tournament as tourney
from .agents import AGENT_KINDS, make_agent
from .client import ClientSession, TcpTransport, WeightedResidual, play_round
from .levels import load_level, validate_solvability, validate_stability
from .server import DEFAULT_BUDGET, DEFAULT_GRACE, DEFAULT_PORT, BirdTCPServer, GameServer


def _load_pack(path: str):
    files = sorted(glob.glob(os.path.join(path, "*.json")))
    if not files:
        raise SystemExit(f"no level files found under {path!r}")
    levels = []
    for f in files:
        with open(f, encoding="utf-8") as fh:
            levels.append(load_level(fh.read()))
    return levels


def cmd_serve(args) -> int:
    levels = _load_pack(args.levels)
    game = GameServer(levels, budget=args.budget, grace=args.grace,
                      clock_mode=args.clock, time_scale=args.time_scale)
    server = BirdTCPServer(game, args.host, args.port)
    print(f"serving {len(levels)} levels on {args.host}:{server.port} "
          f"(budget {args.budget:.0f}s, clock {args.clock})", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0


def cmd_agent(args) -> int:
    session = ClientSession(TcpTransport(args.host, args.port), args.agent_id)
    agent = make_agent(args.kind, seed=args.seed)
    policy = None
    if args.replay_policy == "weighted":
        policy = WeightedResidual(int(session.config["levels"]), seed=args.seed)
    summary = play_round(session, agent, level_policy=policy)
    print(json.dumps(summary, indent=2, sort_keys=True))
    session.close()
    return 0


def cmd_tournament(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        config = json.load(fh)
    levels = _load_pack(args.levels)
    levels_by_id = {l.id: l for l in levels}
    specs = [tourney.AgentSpec(a["id"], a["kind"], a.get("seed", 0),
                               a.get("options", {}))
             for a in config["agents"]]
    rounds = config["rounds"]
    summary = tourney.run_tournament(
        levels_by_id, specs, rounds,
        budget=config.get("budget", DEFAULT_BUDGET),
        out_dir=args.out,
        time_scale=args.time_scale,
        max_attempts=config.get("max_attempts", 120),
    )
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def cmd_benchmark(args) -> int:
    levels = _load_pack(args.levels)
    spec = tourney.AgentSpec(f"{args.agent}-{args.seed}", args.agent, args.seed)
    report = tourney.benchmark(spec, levels, budget=args.budget,
                               time_scale=args.time_scale)
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def cmd_validate(args) -> int:
    levels = _load_pack(args.levels)
    failures = 0
    for level in levels:
        stability = validate_stability(level, t_sim=args.t_sim, eps=args.eps)
        line = f"{level.id}: stable={stability.stable} drift={stability.max_drift:.4f}"
        if args.probe:
            agent = make_agent(args.probe, seed=args.seed,
                               **({"candidates": 48} if args.probe == "simulation" else {}))
            solv = validate_solvability(level, agent, shot_budget=args.shot_budget)
            line += f" solvable={solv.solvable} probe_shots={solv.probe_shots}"
            if not solv.solvable:
                failures += 1
        if not stability.stable:
            failures += 1
        print(line)
    return 1 if failures else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="birdbench",
                                     description="physics-puzzle game server, agents, and tournaments")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the TCP game server")
    p.add_argument("--levels", default="levels")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int,
                   default=int(os.environ.get("BIRDBENCH_PORT", DEFAULT_PORT)))
    p.add_argument("--budget", type=float, default=DEFAULT_BUDGET)
    p.add_argument("--grace", type=float, default=DEFAULT_GRACE)
    p.add_argument("--clock", choices=("wall", "logical"), default="wall")
    p.add_argument("--time-scale", type=float, default=1.0)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("agent", help="connect a reference agent to a server")
    p.add_argument("--kind", choices=sorted(AGENT_KINDS), required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=DEFAULT_PORT)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--agent-id", default=None)
    p.add_argument("--replay-policy", choices=("round-robin", "weighted"),
                   default="round-robin")
    p.set_defaults(func=cmd_agent)

    p = sub.add_parser("tournament", help="run a full knockout tournament")
    p.add_argument("--config", required=True)
    p.add_argument("--levels", default="levels")
    p.add_argument("--out", default="runs")
    p.add_argument("--time-scale", type=float, default=1.0)
    p.set_defaults(func=cmd_tournament)

    p = sub.add_parser("benchmark", help="single-agent regression run")
    p.add_argument("--agent", choices=sorted(AGENT_KINDS), required=True)
    p.add_argument("--levels", default="levels")
    p.add_argument("--budget", type=float, default=1200.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--time-scale", type=float, default=1.0)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("validate", help="stability / solvability checks for a level pack")
    p.add_argument("--levels", default="levels")
    p.add_argument("--probe", choices=sorted(AGENT_KINDS), default=None)
    p.add_argument("--shot-budget", type=int, default=10)
    p.add_argument("--t-sim", type=float, default=5.0)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_validate)

    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "agent_id", "unset") is None:
        args.agent_id = f"{args.kind}-{args.seed}"
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
