"""Agent-side SDK: canonical request encoding, transports, and the play loop.

Requests are serialized with a fixed key order and a fixed number format
(documented in docs/protocol.md) so independent client implementations
produce byte-identical request streams for the same decision sequence.
"""

from __future__ import annotations

import json
import math
import socket

from .agents import Shot
from .prng import Minstd
from .server import GameServer, encode_response, parse_request


class ClientError(Exception):
    pass


class ServerSideError(ClientError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


def format_wire_number(x) -> str:
    """Canonical wire form of a number.

    Floats are rounded half-up to 4 decimals; integral values print with
    no decimal point.  The quantized range keeps both Python and
    JavaScript shortest-round-trip printing in plain (non-exponent) form.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not wire numbers")
    if isinstance(x, int):
        return str(x)
    q = math.floor(x * 10000.0 + 0.5) / 10000.0
    if q == int(q):
        return str(int(q))
    return repr(q)


def encode_request(op: str, args: list[tuple[str, object]], seq: int) -> str:
    parts = []
    for key, value in args:
        if isinstance(value, str):
            encoded = '"' + value + '"'
        else:
            encoded = format_wire_number(value)
        parts.append(f'"{key}":{encoded}')
    return '{"op":"' + op + '","args":{' + ",".join(parts) + '},"seq":' + str(seq) + "}"


class TcpTransport:
    """Blocking line transport over a TCP socket."""

    def __init__(self, host: str, port: int, timeout: float = 60.0):
        self.sock = socket.create_connection((host, port), timeout=timeout)
        self._reader = self.sock.makefile("r", encoding="utf-8", newline="\n")

    def send_line(self, line: str) -> str:
        self.sock.sendall((line + "\n").encode("utf-8"))
        reply = self._reader.readline()
        if not reply:
            raise ClientError("server closed the connection")
        return reply.rstrip("\n")

    def close(self) -> None:
        try:
            self._reader.close()
        finally:
            self.sock.close()


class InProcessTransport:
    """Drives a GameServer directly, still round-tripping through the
    wire encoding so protocol semantics stay byte-equivalent."""

    def __init__(self, game: GameServer):
        self.game = game
        self.session = None

    def send_line(self, line: str) -> str:
        msg = parse_request(line)
        if msg is None:
            from .server import _err  # noqa: PLC0415

            return encode_response(_err(None, "parse_error", "not JSON")).decode().rstrip("\n")
        resp, self.session = self.game.handle(self.session, msg)
        return encode_response(resp).decode("utf-8").rstrip("\n")

    def close(self) -> None:
        pass


class ClientSession:
    """One agent's protocol session: strictly sequential request/response."""

    def __init__(self, transport, agent_id: str, record_to: list[str] | None = None):
        self.transport = transport
        self.agent_id = agent_id
        self.seq = 0
        self.last_percept: dict | None = None
        self.record = record_to
        self.config = self._request("HELLO", [("agent_id", agent_id)])

    def _request(self, op: str, args: list[tuple[str, object]]) -> dict:
        self.seq += 1
        line = encode_request(op, args, self.seq)
        if self.record is not None:
            self.record.append(line)
        reply = self.transport.send_line(line)
        resp = json.loads(reply)
        if resp.get("seq") != self.seq:
            raise ClientError(f"response out of order: sent seq {self.seq}, got {resp.get('seq')}")
        if not resp.get("ok"):
            err = resp.get("error") or {}
            raise ServerSideError(err.get("code", "unknown"), err.get("message", ""))
        return resp["data"]

    def load_level(self, index: int) -> dict:
        return self._request("LOAD_LEVEL", [("index", index)])

    def restart_level(self) -> dict:
        return self._request("RESTART_LEVEL", [])

    def get_state(self) -> dict:
        self.last_percept = self._request("GET_STATE", [])
        return self.last_percept

    def shoot(self, angle_deg: float, speed_fraction: float, tap_ms: int) -> dict:
        return self._request("SHOOT", [
            ("angle_deg", angle_deg),
            ("speed_fraction", speed_fraction),
            ("tap_ms", int(tap_ms)),
        ])

    def shoot_shot(self, shot: Shot) -> dict:
        return self.shoot(math.degrees(shot.angle), shot.speed_fraction, shot.tap_ms)

    def my_score(self) -> dict:
        return self._request("GET_MY_SCORE", [])

    def best_scores(self) -> dict:
        return self._request("GET_BEST_SCORES", [])

    def time_left(self) -> float:
        return self._request("TIME_LEFT", [])["time_left"]

    def close(self) -> None:
        self.transport.close()


def connect(host: str, port: int, agent_id: str,
            record_to: list[str] | None = None) -> ClientSession:
    return ClientSession(TcpTransport(host, port), agent_id, record_to)


# -- level replay policies ----------------------------------------------------


class RoundRobinUnsolved:
    """Cycle through levels, skipping ones already solved."""

    def __init__(self, n_levels: int):
        self.n = n_levels
        self._cursor = -1

    def next_level(self, solved: set[int], best: dict[int, int],
                   pigs_seen: dict[int, int]) -> int | None:
        if len(solved) >= self.n:
            return None
        for _ in range(self.n):
            self._cursor = (self._cursor + 1) % self.n
            if self._cursor not in solved:
                return self._cursor
        return None


class WeightedResidual:
    """Pick levels with probability proportional to estimated points left.

    The estimate is the level's pig value plus the solve bonus, minus the
    best score already banked; solved levels keep a small weight so high
    scores can still be improved.
    """

    def __init__(self, n_levels: int, seed: int = 0):
        self.n = n_levels
        self.rng = Minstd(seed ^ 0x5EED)

    def next_level(self, solved: set[int], best: dict[int, int],
                   pigs_seen: dict[int, int]) -> int | None:
        if len(solved) >= self.n:
            return None
        weights = []
        for i in range(self.n):
            estimate = 5000 * pigs_seen.get(i, 2) + 10000
            residual = max(estimate - best.get(i, 0), 0)
            weights.append(500 if i in solved else max(residual, 500))
        total = sum(weights)
        draw = self.rng.randrange(total)
        acc = 0
        for i, w in enumerate(weights):
            acc += w
            if draw < acc:
                return i
        return self.n - 1


def play_naive(session: ClientSession, rng_seed: int, level_index: int = 0,
               max_attempts: int = 10) -> dict:
    """The reference naive loop used for cross-implementation parity runs.

    The exact request sequence (ops, argument order, number formatting,
    and PRNG draws) is specified in docs/protocol.md; a client in any
    language following it produces a byte-identical request stream.
    """
    from .agents import NaiveAgent  # noqa: PLC0415

    agent = NaiveAgent(seed=rng_seed, config=session.config)
    try:
        session.load_level(level_index)
        attempts = 1
        while True:
            percept = session.get_state()
            state = percept["level_state"]
            if state == "solved":
                break
            if state == "lost":
                if attempts >= max_attempts:
                    break
                attempts += 1
                session.restart_level()
                continue
            shot = agent.select(percept)
            session.shoot_shot(shot)
    except ServerSideError as exc:
        if exc.code != "round_closed":
            raise
    return session.my_score()


def play_round(session: ClientSession, agent, level_policy=None,
               max_attempts: int = 1000) -> dict:
    """Drive a full round: pick levels, shoot until solved/lost, repeat.

    Stops when the round clock runs out, every level is solved, or the
    attempt budget is exhausted.  Returns the final score summary.
    """
    n_levels = int(session.config["levels"])
    agent.configure(session.config)
    policy = level_policy or RoundRobinUnsolved(n_levels)
    solved: set[int] = set()
    best: dict[int, int] = {}
    pigs_seen: dict[int, int] = {}
    attempts = 0
    while attempts < max_attempts:
        try:
            if session.time_left() <= 0.0:
                break
        except ServerSideError:
            break
        index = policy.next_level(solved, best, pigs_seen)
        if index is None:
            break
        attempts += 1
        try:
            session.load_level(index)
            while True:
                percept = session.get_state()
                pigs_seen.setdefault(
                    index,
                    sum(1 for o in percept["objects"] if o["kind"] == "pig"),
                )
                if percept["level_state"] != "playing":
                    break
                shot = agent.select(percept)
                result = session.shoot_shot(shot)
                if hasattr(agent, "on_result"):
                    agent.on_result(percept, shot, result)
                if result["level_state"] != "playing":
                    percept = {"level_state": result["level_state"],
                               "current_score": result["score"]}
                    break
            if percept["level_state"] == "solved":
                solved.add(index)
                best[index] = max(best.get(index, 0), percept["current_score"])
        except ServerSideError as exc:
            if exc.code in ("round_closed", "out_of_birds"):
                if exc.code == "round_closed":
                    break
                continue
            raise
    return session.my_score()
