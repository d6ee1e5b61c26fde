from __future__ import annotations

import json
import random

import pytest

from birdbench.agents import NaiveAgent
from birdbench.levels import (
    Level,
    LevelError,
    load_level,
    score_attempt,
    serialize_level,
    validate_solvability,
    validate_stability,
)
from birdbench.physics import DamageEvent

from conftest import fixture_path


def minimal_doc(**overrides):
    doc = {
        "id": "mini",
        "slingshot": {"x": 10.0, "y": 2.0},
        "birds": ["red"],
        "terrain": [{"x0": 0.0, "x1": 84.0, "h": 0.0}],
        "objects": [
            {"kind": "pig", "material": "none",
             "shape": {"type": "circle", "r": 0.5}, "x": 45.0, "y": 0.5, "rot": 0.0},
        ],
    }
    doc.update(overrides)
    return doc


class TestLoadLevel:
    def test_minimal_level(self):
        level = load_level(json.dumps(minimal_doc()))
        assert level.pig_count() == 1
        assert level.birds == ("red",)

    def test_disallowed_object_kind(self):
        doc = minimal_doc()
        doc["objects"].append({"kind": "boulder", "material": "stone",
                               "shape": {"type": "circle", "r": 1.0},
                               "x": 50.0, "y": 1.0, "rot": 0.0})
        with pytest.raises(LevelError, match="boulder"):
            load_level(json.dumps(doc))

    def test_disallowed_bird(self):
        with pytest.raises(LevelError, match="green"):
            load_level(json.dumps(minimal_doc(birds=["green"])))

    def test_requires_a_pig(self):
        with pytest.raises(LevelError, match="pig"):
            load_level(json.dumps(minimal_doc(objects=[])))

    def test_requires_birds(self):
        with pytest.raises(LevelError, match="bird"):
            load_level(json.dumps(minimal_doc(birds=[])))

    def test_unknown_field_named_in_error(self):
        doc = minimal_doc()
        doc["gravity"] = 12.0
        with pytest.raises(LevelError, match="gravity"):
            load_level(json.dumps(doc))

    def test_out_of_bounds_object(self):
        doc = minimal_doc()
        doc["objects"][0]["x"] = 200.0
        with pytest.raises(LevelError, match="bounds"):
            load_level(json.dumps(doc))

    def test_overlapping_terrain_rejected(self):
        doc = minimal_doc(terrain=[{"x0": 0.0, "x1": 50.0, "h": 0.0},
                                   {"x0": 40.0, "x1": 84.0, "h": 2.0}])
        with pytest.raises(LevelError, match="overlap"):
            load_level(json.dumps(doc))

    def test_parse_error(self):
        with pytest.raises(LevelError, match="JSON"):
            load_level(b"{nope")

    def test_pack_round_trip_identity(self, level_pack):
        for level in level_pack:
            again = load_level(serialize_level(level))
            assert again == level


def ev(step, subject, kind, amount=0.0):
    return DamageEvent(step, subject, kind, amount)


class TestScoreAttempt:
    def test_empty_unsolved_is_zero(self):
        score = score_attempt([], birds_remaining=2, solved=False)
        assert score.total == 0

    def test_worked_example(self):
        log = [
            ev(1, "pig:0", "pig_killed"),
            ev(2, "pig:1", "pig_killed"),
            ev(1, "block:0", "damaged", 1.0),
            ev(1, "block:0", "destroyed"),
            ev(2, "block:1", "destroyed"),
            ev(2, "block:2", "destroyed"),
        ]
        score = score_attempt(log, birds_remaining=1, solved=True)
        assert score.total == 2 * 5000 + 3 * 500 + 10000
        unsolved = score_attempt(log, birds_remaining=1, solved=False)
        assert unsolved.total == 11500

    def test_damaged_bonus_once_per_block(self):
        log = [
            ev(1, "block:0", "damaged", 0.5),
            ev(2, "block:0", "damaged", 0.5),
            ev(3, "block:1", "damaged", 0.5),
        ]
        score = score_attempt(log, birds_remaining=0, solved=False)
        assert score.total == 400

    def test_damaged_then_destroyed_scores_destroyed_only(self):
        log = [ev(1, "block:0", "damaged", 0.5), ev(2, "block:0", "destroyed")]
        score = score_attempt(log, birds_remaining=0, solved=False)
        assert score.total == 500

    def test_tnt_counts(self):
        log = [ev(1, "tnt:0", "tnt_detonated")]
        assert score_attempt(log, 0, False).total == 1000

    def test_additive_over_disjoint_subjects(self):
        rng = random.Random(42)
        kinds = ("damaged", "destroyed", "pig_killed", "tnt_detonated")
        for _ in range(50):
            log_a = [ev(i, f"a:{rng.randrange(5)}", rng.choice(kinds), 0.5)
                     for i in range(rng.randrange(1, 12))]
            log_b = [ev(i, f"b:{rng.randrange(5)}", rng.choice(kinds), 0.5)
                     for i in range(rng.randrange(1, 12))]
            total_a = score_attempt(log_a, 0, False).damage_points
            total_b = score_attempt(log_b, 0, False).damage_points
            combined = score_attempt(log_a + log_b, 0, False).damage_points
            assert combined == total_a + total_b

    def test_solved_iff_all_pigs_killed(self, level_pack):
        level = level_pack[0]
        log = [ev(1, f"pig:{i}", "pig_killed") for i in range(level.pig_count())]
        score = score_attempt(log, birds_remaining=0, solved=True)
        assert score.pigs_killed == level.pig_count()


class TestValidateStability:
    def test_box_on_flat_terrain(self):
        doc = minimal_doc()
        doc["objects"].append({"kind": "block", "material": "wood",
                               "shape": {"type": "box", "w": 2.0, "h": 1.0},
                               "x": 50.0, "y": 0.5, "rot": 0.0})
        report = validate_stability(load_level(json.dumps(doc)))
        assert report.stable
        assert report.max_drift < 0.05

    def test_floating_box_is_unstable(self):
        with open(fixture_path("unstable_tower.json"), encoding="utf-8") as fh:
            level = load_level(fh.read())
        report = validate_stability(level)
        assert not report.stable
        assert report.max_drift > 1.0

    def test_three_block_tower_drift(self):
        doc = minimal_doc()
        for i in range(3):
            doc["objects"].append({"kind": "block", "material": "stone",
                                   "shape": {"type": "box", "w": 1.5, "h": 0.8},
                                   "x": 50.0, "y": 0.4 + 0.8 * i, "rot": 0.0})
        report = validate_stability(load_level(json.dumps(doc)), t_sim=5.0, eps=0.1)
        assert report.stable
        assert report.max_drift < 0.1

    def test_deterministic_drift(self, level_pack):
        level = level_pack[3]
        a = validate_stability(level)
        b = validate_stability(level)
        assert a.max_drift == b.max_drift

    def test_whole_pack_is_stable(self, level_pack):
        for level in level_pack:
            report = validate_stability(level)
            assert report.stable, (level.id, report.max_drift)


class TestValidateSolvability:
    def test_unprotected_pig_proven_solvable(self, level_pack, agent_config):
        level = level_pack[0]
        probe = NaiveAgent(seed=7, config=agent_config)
        report = validate_solvability(level, probe, shot_budget=10)
        assert report.solvable
        assert report.solution  # the solving shot sequence is recorded
        assert report.probe_shots >= 1

    def test_enclosed_pig_not_proven_solvable(self, agent_config):
        doc = minimal_doc()
        doc["objects"] = [
            {"kind": "pig", "material": "none",
             "shape": {"type": "circle", "r": 0.4}, "x": 50.0, "y": 0.4, "rot": 0.0},
            {"kind": "block", "material": "stone",
             "shape": {"type": "box", "w": 1.4, "h": 6.0}, "x": 47.5, "y": 3.0, "rot": 0.0},
            {"kind": "block", "material": "stone",
             "shape": {"type": "box", "w": 1.4, "h": 6.0}, "x": 52.5, "y": 3.0, "rot": 0.0},
            {"kind": "block", "material": "stone",
             "shape": {"type": "box", "w": 6.4, "h": 1.2}, "x": 50.0, "y": 6.6, "rot": 0.0},
        ]
        level = load_level(json.dumps(doc))
        probe = NaiveAgent(seed=3, config=agent_config)
        report = validate_solvability(level, probe, shot_budget=6)
        assert report.solvable is False
        assert report.solution is None

    def test_zero_budget(self, level_pack, agent_config):
        probe = NaiveAgent(seed=1, config=agent_config)
        report = validate_solvability(level_pack[0], probe, shot_budget=0)
        assert report.solvable is False
        assert report.probe_shots == 0
