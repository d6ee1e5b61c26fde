#!/usr/bin/env python3
"""Regenerate the bundled level pack under levels/.

Each level is hand-designed data; this script just keeps the JSON tidy
and lets geometry be expressed with a little arithmetic.
"""

from __future__ import annotations

import json
import os

OUT = os.path.join(os.path.dirname(__file__), "..", "levels")

SLING = {"x": 10.0, "y": 2.0}
FLAT = [{"x0": 0.0, "x1": 84.0, "h": 0.0}]


def box(kind, material, w, h, x, y, rot=0.0):
    return {"kind": kind, "material": material,
            "shape": {"type": "box", "w": w, "h": h}, "x": x, "y": y, "rot": rot}


def circle(kind, material, r, x, y):
    return {"kind": kind, "material": material,
            "shape": {"type": "circle", "r": r}, "x": x, "y": y, "rot": 0.0}


def pig(x, y, r=0.5):
    return circle("pig", "none", r, x, y)


def tnt(x, y, s=0.8):
    return box("tnt", "none", s, s, x, y)


def hollow(material, w, h, wall, x, y):
    return {"kind": "block", "material": material,
            "shape": {"type": "hollow_box", "w": w, "h": h, "wall": wall},
            "x": x, "y": y, "rot": 0.0}


LEVELS = [
    {
        "id": "L01",
        "slingshot": SLING,
        "birds": ["red", "red"],
        "terrain": FLAT,
        "objects": [pig(45.0, 0.5)],
        "metadata": {"name": "first_bird", "theme": "unprotected pig",
                     "author": "birdbench"},
    },
    {
        "id": "L02",
        "slingshot": SLING,
        "birds": ["red", "red"],
        "terrain": FLAT,
        "objects": [
            box("block", "wood", 1.6, 2.4, 44.0, 1.2),
            box("block", "wood", 1.6, 1.2, 46.4, 0.6),
            pig(44.0, 2.9),
            pig(46.4, 1.7),
            pig(48.8, 0.5),
        ],
        "metadata": {"name": "pig_parade", "theme": "multi-pig line",
                     "author": "birdbench"},
    },
    {
        "id": "L03",
        "slingshot": SLING,
        "birds": ["red", "red"],
        "terrain": FLAT,
        "objects": [
            tnt(48.0, 0.4),
            pig(50.2, 0.5),
            tnt(51.5, 0.4),
            pig(53.5, 0.5),
            pig(55.0, 0.5),
        ],
        "metadata": {"name": "tnt_chain", "theme": "TNT chain",
                     "author": "birdbench"},
    },
    {
        "id": "L04",
        "slingshot": SLING,
        "birds": ["red", "red"],
        "terrain": FLAT,
        "objects": [
            box("block", "wood", 0.6, 2.4, 48.0, 1.2),
            box("block", "wood", 0.6, 2.4, 52.0, 1.2),
            box("block", "stone", 6.4, 0.8, 50.0, 2.8),
            box("block", "stone", 2.6, 1.7, 47.6, 4.05),
            box("block", "stone", 1.0, 2.0, 50.25, 4.2),
            box("block", "stone", 1.0, 2.0, 52.55, 4.2),
            box("block", "stone", 4.8, 1.0, 51.7, 5.7),
            pig(51.4, 3.7),
        ],
        "metadata": {"name": "stone_portal", "theme": "support-block collapse",
                     "author": "birdbench"},
    },
    {
        "id": "L05",
        "slingshot": SLING,
        "birds": ["red", "red"],
        "terrain": [
            {"x0": 0.0, "x1": 40.0, "h": 0.0},
            {"x0": 40.0, "x1": 52.0, "h": 4.0},
            {"x0": 52.0, "x1": 84.0, "h": 0.0},
        ],
        "objects": [
            circle("block", "stone", 0.8, 50.8, 4.8),
            pig(55.0, 0.5),
        ],
        "metadata": {"name": "boulder_drop", "theme": "round-block roll",
                     "author": "birdbench"},
    },
    {
        "id": "L06",
        "slingshot": SLING,
        "birds": ["red", "red"],
        "terrain": FLAT,
        "objects": [
            hollow("wood", 3.0, 3.0, 0.3, 50.0, 1.5),
            pig(50.0, 0.8),
        ],
        "metadata": {"name": "hollow_window", "theme": "hollow-block shot",
                     "author": "birdbench"},
    },
    {
        "id": "L07",
        "slingshot": SLING,
        "birds": ["blue", "red"],
        "terrain": FLAT,
        "objects": [
            box("block", "ice", 0.5, 3.5, 45.4, 1.75),
            box("block", "ice", 0.5, 3.5, 45.95, 1.75),
            pig(46.9, 0.5),
            box("block", "wood", 0.6, 3.5, 56.6, 1.75),
            pig(57.8, 0.5),
        ],
        "metadata": {"name": "ice_or_wood", "theme": "material-weighted blocking",
                     "author": "birdbench"},
    },
    {
        "id": "L08",
        "slingshot": SLING,
        "birds": ["yellow", "red"],
        "terrain": FLAT,
        "objects": [
            box("block", "wood", 0.8, 3.0, 50.4, 1.5),
            box("block", "wood", 0.8, 3.0, 53.6, 1.5),
            box("block", "wood", 4.6, 0.5, 52.0, 3.25),
            pig(52.0, 0.5),
        ],
        "metadata": {"name": "timber_fort", "theme": "wood fort, boost bird",
                     "author": "birdbench"},
    },
    {
        "id": "L09",
        "slingshot": SLING,
        "birds": ["black", "red"],
        "terrain": FLAT,
        "objects": [
            box("block", "stone", 0.8, 3.0, 50.4, 1.5),
            box("block", "stone", 0.8, 3.0, 54.4, 1.5),
            box("block", "stone", 5.4, 0.6, 52.4, 3.3),
            pig(52.0, 0.5),
            tnt(53.3, 0.4),
        ],
        "metadata": {"name": "granite_vault", "theme": "stone bunker, blast bird",
                     "author": "birdbench"},
    },
    {
        "id": "L10",
        "slingshot": SLING,
        "birds": ["white", "red"],
        "terrain": FLAT,
        "objects": [
            box("block", "stone", 1.2, 6.5, 54.6, 3.25),
            pig(56.4, 0.5),
        ],
        "metadata": {"name": "sky_drop", "theme": "egg drop over a wall",
                     "author": "birdbench"},
    },
    {
        "id": "L11",
        "slingshot": SLING,
        "birds": ["red", "red", "red"],
        "terrain": FLAT,
        "objects": [
            box("block", "wood", 1.0, 3.0, 46.0, 1.5),
            pig(46.0, 3.5),
            box("block", "wood", 1.0, 3.0, 56.0, 1.5),
            pig(56.0, 3.5),
        ],
        "metadata": {"name": "twin_towers", "theme": "two tower pigs",
                     "author": "birdbench"},
    },
    {
        "id": "L12",
        "slingshot": SLING,
        "birds": ["red", "red"],
        "terrain": FLAT,
        "objects": [
            box("block", "wood", 0.8, 5.0, 52.0, 2.5),
            pig(52.0, 5.5),
        ],
        "metadata": {"name": "pedestal_topple", "theme": "topple the pedestal",
                     "author": "birdbench"},
    },
    {
        "id": "L13",
        "slingshot": SLING,
        "birds": ["yellow", "red"],
        "terrain": FLAT,
        "objects": [
            box("block", "stone", 0.8, 2.5, 48.0, 1.25),
            box("block", "stone", 0.8, 2.5, 54.0, 1.25),
            box("block", "wood", 6.6, 0.6, 51.0, 2.8),
            pig(50.2, 0.5),
            pig(52.6, 0.5),
        ],
        "metadata": {"name": "bridge_breaker", "theme": "smash the wood bridge",
                     "author": "birdbench"},
    },
    {
        "id": "L14",
        "slingshot": SLING,
        "birds": ["red", "red"],
        "terrain": FLAT,
        "objects": [
            box("block", "wood", 1.2, 1.0, 70.0, 0.5),
            pig(70.0, 1.5),
        ],
        "metadata": {"name": "long_range", "theme": "far target",
                     "author": "birdbench"},
    },
]


def main():
    os.makedirs(OUT, exist_ok=True)
    for doc in LEVELS:
        path = os.path.join(OUT, f"{doc['id']}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        print("wrote", path)


if __name__ == "__main__":
    main()
