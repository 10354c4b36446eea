"""Regenerate the measurement bundle: JSON reports, CSV tables and SVG drawings."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from sierpinski_hqec.cli import main

RUNS: list[tuple[str, list[str]]] = [
    ("build_l3.json", ["build", "--level", "3"]),
    ("verify_l2.json", ["verify-code", "--level", "2"]),
    ("wedges_l2_arc0-3.json", ["wedges", "--level", "2", "--arc", "0..3"]),
    ("rt_l2_arc0-3.json", ["rt", "--level", "2", "--arc", "0..3", "--states", "random:20", "--mixtures", "2"]),
    ("distance_l4.json", ["distance", "--level", "4", "--hole", "all"]),
    ("recover_l3.json", ["recover", "--level", "3", "--fit", "2,3,4"]),
    ("circuit_l3.json", ["circuit", "--level", "3", "--format", "json"]),
]


def run(out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    status = 0
    for name, argv in RUNS:
        code = main(argv + ["--out", str(out / name)])
        print(f"{name}: exit {code}")
        status = max(status, code)
    extras = [
        ["distance", "--level", "4", "--hole", "all", "--csv", str(out / "distance_l4.csv")],
        ["sweep", "--level", "3", "--csv", str(out / "sweep_l3.csv")],
        ["rt", "--level", "2", "--arc", "2..6", "--csv", str(out / "rt_l2_arc2-6.csv"),
         "--out", str(out / "rt_l2_arc2-6.json")],
        ["wedges", "--level", "3", "--arc", "0..12", "--svg", str(out / "wedges_l3.svg"),
         "--out", str(out / "wedges_l3.json")],
        ["render", "--level", "3", "--view", "boundary", "--arc", "0..12", "--svg", str(out / "ring_l3.svg")],
    ]
    for argv in extras:
        code = main(argv)
        print(f"{argv[0]} {' '.join(argv[1:3])}: exit {code}")
        status = max(status, code)
    return status


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("report"))
    sys.exit(run(parser.parse_args().out))
