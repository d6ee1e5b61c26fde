from __future__ import annotations

import glob
import os

import pytest

from birdbench.levels import load_level

PACK_DIR = os.path.join(os.path.dirname(__file__), "..", "levels")
FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "fixtures")


AGENT_CONFIG = {
    "v_max": 28.0,
    "gravity": 9.8,
    "world_width": 84.0,
    "world_height": 48.0,
    "screen_width": 840,
    "screen_height": 480,
    "levels": 1,
}


@pytest.fixture(scope="session")
def level_pack():
    levels = []
    for path in sorted(glob.glob(os.path.join(PACK_DIR, "*.json"))):
        with open(path, encoding="utf-8") as fh:
            levels.append(load_level(fh.read()))
    assert len(levels) >= 12
    return levels


@pytest.fixture(scope="session")
def levels_by_id(level_pack):
    return {l.id: l for l in level_pack}


@pytest.fixture()
def agent_config():
    return dict(AGENT_CONFIG)


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURE_DIR, name)
