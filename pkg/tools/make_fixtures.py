#!/usr/bin/env python3
"""Regenerate everything under fixtures/. Deterministic; safe to re-run."""

from __future__ import annotations

import csv
import json
from pathlib import Path

from nomos.rng import Splitmix64

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

COMPAS_HEADER = ["age:int", "felonies:int", "misdemeanors:int", "priors:int",
                 "others:int", "is_recid:int", "label"]


def write_compas_rows() -> None:
    rng = Splitmix64(2024)
    rows = [[34, 15, 2, 6, 1, 1]]  # keep one max-felony row for precondition-retry paths
    for _ in range(29):
        rows.append([
            18 + rng.randint(0, 52),
            rng.randint(0, 15),
            rng.randint(0, 12),
            rng.randint(0, 20),
            rng.randint(0, 10),
            rng.randint(0, 1),
        ])
    with (FIXTURES / "compas_rows.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(COMPAS_HEADER)
        for row in rows:
            risk = min(2, (row[1] + row[2] + row[3]) // 9)
            writer.writerow(row + [risk])


def write_trees() -> None:
    nonmono = {
        "type": "decision_tree",
        "root": 0,
        "nodes": [
            {"feature": 1, "threshold": 7.0, "left": 1, "right": 2},
            {"feature": 1, "threshold": 3.0, "left": 3, "right": 4},
            {"class": 0},
            {"class": 1},
            {"class": 2},
        ],
    }
    (FIXTURES / "dt_felony_nonmono.json").write_text(json.dumps(nonmono, indent=2) + "\n")

    mono = {
        "type": "decision_tree",
        "root": 0,
        "nodes": [
            {"feature": 1, "threshold": 5.0, "left": 1, "right": 2},
            {"class": 0},
            {"feature": 1, "threshold": 12.0, "left": 3, "right": 4},
            {"class": 1},
            {"class": 2},
        ],
    }
    (FIXTURES / "dt_felony_mono.json").write_text(json.dumps(mono, indent=2) + "\n")

    depth3 = {
        "type": "decision_tree",
        "root": 0,
        "nodes": [
            {"feature": 0, "threshold": 30.0, "left": 1, "right": 2},
            {"feature": 1, "threshold": 4.0, "left": 3, "right": 4},
            {"feature": 2, "threshold": 6.0, "left": 5, "right": 6},
            {"feature": 2, "threshold": 2.0, "left": 7, "right": 8},
            {"class": 2},
            {"feature": 1, "threshold": 9.0, "left": 9, "right": 10},
            {"class": 0},
            {"class": 1},
            {"class": 0},
            {"class": 2},
            {"class": 1},
        ],
    }
    (FIXTURES / "dt_depth3.json").write_text(json.dumps(depth3, indent=2) + "\n")


def _matrix(rows: int, cols: int, salt: int) -> list[list[float]]:
    return [[(((r * 7 + c * 3 + salt) % 11) - 5) / 7.0 for c in range(cols)]
            for r in range(rows)]


def _bias(n: int, salt: int) -> list[float]:
    return [(((i * 5 + salt) % 9) - 4) / 9.0 for i in range(n)]


def write_mlps() -> None:
    small = {
        "type": "mlp",
        "layers": [
            {"weights": _matrix(4, 6, 1), "bias": _bias(4, 2)},
            {"weights": _matrix(3, 4, 5), "bias": _bias(3, 3)},
        ],
    }
    (FIXTURES / "mlp_small.json").write_text(json.dumps(small, indent=2) + "\n")

    grid = {
        "type": "mlp",
        "layers": [
            {"weights": _matrix(8, 16, 4), "bias": _bias(8, 1)},
            {"weights": _matrix(10, 8, 7), "bias": _bias(10, 6)},
        ],
    }
    (FIXTURES / "mlp_grid.json").write_text(json.dumps(grid, indent=2) + "\n")


def write_grid_rows() -> None:
    rng = Splitmix64(99)
    header = ["label"] + [f"p{r}_{c}" for r in range(4) for c in range(4)]
    with (FIXTURES / "mnist_like.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for _ in range(12):
            cells = [round(rng.uniform01(), 2) for _ in range(16)]
            writer.writerow([rng.randint(0, 9)] + cells)


def write_hotel_rows() -> None:
    pairs = [
        ("great location and staff", "bad wifi", 0),
        ("lovely pool", "noisy street at night", 0),
        ("spotless rooms", "slow elevator", 0),
        ("friendly reception", "tiny bathroom and broken ac", 1),
        ("close to the station", "rude waiter cold food", 1),
        ("nothing special", "dirty carpet and smelly hallway", 1),
        ("nice breakfast", "overpriced minibar", 0),
        ("quiet floor", "no hot water in the morning", 1),
    ]
    with (FIXTURES / "hotel_rows.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["pos:str", "neg:str", "label"])
        for pos, neg, label in pairs:
            writer.writerow([pos, neg, label])


def write_lander_pool() -> None:
    with (FIXTURES / "lander_pool.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["terrain", "lander_x", "lander_vy", "fuel"])
        for terrain in range(1, 7):
            for gap in range(1, 9):
                for vy in range(-4, 1):
                    for fuel in (8, 10):
                        writer.writerow([terrain, terrain + gap, vy, fuel])


ENV = {
    "h_max": 8,
    "gravity": 1,
    "thrust_power": 2,
    "safe_v": 2,
    "thrust_prob": [1.0],
    "max_steps": 64,
}


def _policy_entries(buggy: bool) -> dict[str, str]:
    entries = {}
    for terrain in range(0, 9):
        for gap in range(0, 13):
            for vy in range(-6, 7):
                if buggy and terrain == 0:
                    action = "coast"
                else:
                    action = "thrust" if vy <= -2 else "coast"
                entries[f"{terrain},{gap},{vy}"] = action
    return entries


def write_policies() -> None:
    for name, buggy in (("lander_safe.json", False), ("lander_buggy.json", True)):
        doc = {
            "type": "toy_env_policy",
            "env": ENV,
            "policy": {
                "default": "coast",
                "gap_cap": 12,
                "vy_cap": 6,
                "entries": _policy_entries(buggy),
            },
        }
        (FIXTURES / name).write_text(json.dumps(doc, indent=2) + "\n")


def main() -> None:
    FIXTURES.mkdir(exist_ok=True)
    write_compas_rows()
    write_trees()
    write_mlps()
    write_grid_rows()
    write_hotel_rows()
    write_lander_pool()
    write_policies()
    print(f"fixtures written to {FIXTURES}")


if __name__ == "__main__":
    main()
