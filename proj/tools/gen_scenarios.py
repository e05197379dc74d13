#!/usr/bin/env python3
"""Writes the bundled scenario configs into scenarios/."""

import argparse
import json
import math
from pathlib import Path

SAFE = [{"center": [250.0, 250.0], "radius": 20.0}, {"center": [250.0, -300.0], "radius": 20.0}]


def ring(n, radius, phase=0.0):
    return [
        {"x": round(radius * math.cos(phase + 2 * math.pi * j / n), 4),
         "y": round(radius * math.sin(phase + 2 * math.pi * j / n), 4)}
        for j in range(n)
    ]


def line(center, heading, n, spacing, group):
    # Transverse to the heading, first point on the left.
    nx, ny = -math.sin(heading), math.cos(heading)
    out = []
    for l in range(n):
        o = 0.5 * (n - 1) - l
        out.append({"x": round(center[0] + o * spacing * nx, 4),
                    "y": round(center[1] + o * spacing * ny, 4), "group": group})
    return out


def block(center, rows, cols, spacing, group):
    out = []
    for r in range(rows):
        for c in range(cols):
            out.append({"x": center[0] + (c - 0.5 * (cols - 1)) * spacing,
                        "y": center[1] + (r - 0.5 * (rows - 1)) * spacing, "group": group})
    return out


def towards_origin(p):
    return math.atan2(-p[1], -p[0])


def base(name, seed, duration):
    return {"version": "v1", "name": name, "seed": seed, "dt": 0.02, "duration": duration,
            "trace_stride": 5, "world": {"protected_center": [0.0, 0.0], "protected_radius": 45.0,
                                         "safe_areas": SAFE},
            "split_solver": "rs_miqcqp"}


def scenario1():
    c = base("single_risk_taker", 1, 120.0)
    c["defenders"] = ring(3, 60.0)
    c["attackers"] = [{"x": 300.0, "y": 80.0, "group": -1}]
    return c


def scenario2():
    c = base("one_swarm_herded", 2, 400.0)
    c["defenders"] = ring(6, 60.0)
    c["attackers"] = block((320.0, 60.0), 2, 3, 2.5, 0)
    return c


def scenario3():
    c = base("split_16v16", 3, 600.0)
    c["defenders"] = ring(16, 60.0)
    g0 = (330.0, 40.0)
    g1 = (420.0, 40.0)
    atts = line(g0, towards_origin(g0), 10, 2.5, 0)
    atts += block(g1, 2, 2, 2.5, 1)
    atts += [{"x": 350.0, "y": 120.0, "group": -1}, {"x": 320.0, "y": -60.0, "group": -1}]
    c["attackers"] = atts
    c["scripts"] = [{
        "group": 0, "trigger_distance": 30.0,
        "subgroups": [{"members": [1, 2, 3, 4], "drift_deg": 90.0, "drift_speed": 2.0, "drift_time": 6.0},
                      {"members": [5, 6, 7, 8], "drift_deg": -90.0, "drift_speed": 2.0, "drift_time": 6.0}],
        "breakaways": [{"members": [0], "delay": 0.0, "dash_deg": 60.0, "dash_time": 3.0},
                       {"members": [9], "delay": 0.0, "dash_deg": -60.0, "dash_time": 3.0}],
    }]
    return c


def scenario4():
    c = base("two_swarms_heuristic", 4, 600.0)
    c["split_solver"] = "heuristic"
    c["defenders"] = ring(12, 60.0)
    c["attackers"] = block((300.0, 150.0), 2, 3, 2.5, 0) + block((280.0, -160.0), 2, 2, 2.5, 1)
    c["attackers"] += [{"x": -320.0, "y": 40.0, "group": -1}, {"x": 0.0, "y": 330.0, "group": -1}]
    return c


def scenario5():
    c = base("split_exact_solver", 5, 600.0)
    c["split_solver"] = "miqcqp"
    c["defenders"] = ring(8, 60.0)
    g0 = (-320.0, 60.0)
    c["attackers"] = line(g0, towards_origin(g0), 8, 2.5, 0)
    c["scripts"] = [{
        "group": 0, "trigger_distance": 30.0,
        "subgroups": [{"members": [0, 1, 2, 3], "drift_deg": 90.0, "drift_speed": 2.0, "drift_time": 6.0},
                      {"members": [4, 5, 6, 7], "drift_deg": -90.0, "drift_speed": 2.0, "drift_time": 6.0}],
    }]
    return c


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "scenarios"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i, fn in enumerate([scenario1, scenario2, scenario3, scenario4, scenario5], start=1):
        (out / f"scenario{i}.json").write_text(json.dumps(fn(), indent=2) + "\n")


if __name__ == "__main__":
    main()
