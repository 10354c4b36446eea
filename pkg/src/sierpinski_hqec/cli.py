"""Command-line interface: build, verify, analyze and render the code."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import circuit, codespace, duality, probes, render, rt
from .patterns import CapabilityError, brute_force_psi, psi_system

SCHEMA_VERSION = duality.SCHEMA_VERSION
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    """Invalid command-line input."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        raise UsageError(message)


@dataclass
class RunConfig:
    level: int
    command: str
    arc: str | None = None
    qudits: str | None = None
    geometry: str = "fractal"
    out: Path | None = None
    csv: Path | None = None
    svg: Path | None = None
    seed: int = 0
    tolerance: float = 1e-9
    extra: dict = field(default_factory=dict)

    def region(self) -> frozenset[int]:
        return parse_region(self.level, self.arc, self.qudits, self.geometry)


def parse_arc(text: str, n: int) -> list[int]:
    """Ring positions of ``a..b`` inclusive, wrapping past ``n - 1``."""
    try:
        a, b = (int(x) for x in text.split(".."))
    except ValueError as exc:
        raise UsageError(f"arc must look like a..b, got {text!r}") from exc
    if not (0 <= a < n and 0 <= b < n):
        raise UsageError(f"arc endpoints must lie in 0..{n - 1}")
    length = (b - a) % n + 1
    return [(a + i) % n for i in range(length)]


def parse_region(level: int, arc: str | None, qudits: str | None, geometry: str) -> frozenset[int]:
    lat = psi_system(level).lattice
    n = lat.qudit_count
    if (arc is None) == (qudits is None):
        raise UsageError("give exactly one of --arc or --qudits")
    if arc is not None:
        return frozenset(lat.ring_order[p] for p in parse_arc(arc, n))
    try:
        items = [int(x) for x in qudits.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"qudit list must be comma-separated integers, got {qudits!r}") from exc
    if any(not 0 <= x < n for x in items):
        raise UsageError(f"qudit indices must lie in 0..{n - 1}")
    if geometry == "boundary":
        return frozenset(lat.ring_order[p] for p in items)
    return frozenset(items)


def parse_hole(text: str, K: int) -> list[int]:
    if text == "central":
        return [0]
    if text == "all":
        return list(range(K))
    try:
        h = int(text)
    except ValueError as exc:
        raise UsageError(f"hole must be 'central', 'all' or an id, got {text!r}") from exc
    if not 0 <= h < K:
        raise UsageError(f"hole id must lie in 0..{K - 1}")
    return [h]


def _emit(cfg: RunConfig, payload: dict) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    text = json.dumps(payload, indent=2, default=_json_default)
    if cfg.out:
        cfg.out.write_text(text + "\n")
    else:
        print(text)


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (set, frozenset, tuple)):
        return sorted(obj) if isinstance(obj, (set, frozenset)) else list(obj)
    raise TypeError(f"not serializable: {type(obj)}")


def _write_csv(path: Path | None, header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    if path:
        path.write_text(buf.getvalue())
    return buf.getvalue()


def cmd_build(cfg: RunConfig) -> int:
    system = psi_system(cfg.level)
    payload = system.lattice.to_json()
    payload["psi_dimension"] = system.dimension
    payload["constraint_rank"] = system.constraint_rank
    _emit(cfg, payload)
    return EXIT_OK


def cmd_verify_code(cfg: RunConfig) -> int:
    level = cfg.level
    system = psi_system(level)
    results: dict = {"level": level, "psi_dimension": system.dimension,
                     "psi_dimension_ok": system.dimension == 3 * system.K}
    ok = results["psi_dimension_ok"]
    if level <= 2:
        count = len(brute_force_psi(system.lattice))
        results["psi_count"] = count
        results["psi_count_ok"] = count == 8**system.K
        iso = codespace.verify_isometry(level)
        results["isometry"] = iso
        n = system.lattice.qudit_count
        dd = duality.dense_duality(level)
        cr_fail, center_fail, total = [], [], 0
        for region in duality.all_bipartitions(n):
            total += 1
            if not dd.verify_complementary_recovery(region):
                cr_fail.append(sorted(region))
            if not (dd.nontrivial_center(region) and duality.verify_nontrivial_center(system, region)):
                center_fail.append(sorted(region))
        results["bipartitions"] = total
        results["complementary_recovery_failures"] = cr_fail
        results["center_failures"] = center_fail
        ok = ok and results["psi_count_ok"] and iso["passed"] and not cr_fail and not center_fail
    else:
        results["note"] = "dense checks run only at level <= 2"
    results["passed"] = bool(ok)
    _emit(cfg, results)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_wedges(cfg: RunConfig) -> int:
    system = psi_system(cfg.level)
    report = duality.compute_wedges(system, cfg.region())
    payload = report.to_json()
    payload["structure"] = duality.structure_report(report)
    payload["area"] = rt.area_term(report).to_json()
    if cfg.level <= 2:
        report.complementary_recovery = duality.verify_complementary_recovery(cfg.level, report.inside)
        payload["complementary_recovery"] = report.complementary_recovery
    _emit(cfg, payload)
    if cfg.svg:
        colors = render.wedge_colors(report.w_a, report.w_abar, report.e)
        cfg.svg.write_text(render.fractal_svg(system.lattice, report.inside, colors))
    return EXIT_OK if report.complementary_recovery is not False else EXIT_FAIL


def _random_states(text: str, K: int, rng: np.random.Generator) -> list:
    kind, _, count = text.partition(":")
    if kind != "random" or not count.isdigit():
        raise UsageError(f"states must look like random:<count>, got {text!r}")
    return [codespace.random_bulk(K, rng) for _ in range(int(count))]


def cmd_rt(cfg: RunConfig) -> int:
    if cfg.level > codespace.DENSE_BULK_MAX_LEVEL:
        raise CapabilityError(f"entropy checks are limited to level <= {codespace.DENSE_BULK_MAX_LEVEL}")
    system = psi_system(cfg.level)
    rng = np.random.default_rng(cfg.seed)
    states = _random_states(cfg.extra["states"], system.K, rng)
    for _ in range(cfg.extra["mixtures"]):
        w = rng.uniform(0.1, 0.9)
        states.append([(w, codespace.random_bulk(system.K, rng)),
                       (1 - w, codespace.random_bulk(system.K, rng))])
    checker = rt.RTChecker(system, cfg.region())
    rows, worst = [], 0.0
    for i, state in enumerate(states):
        res = checker.verify(state)
        worst = max(worst, abs(res.residual_a), abs(res.residual_abar))
        rows.append([i, res.n_e, res.s_a, res.s_abar, res.alg_a, res.alg_abar,
                     res.residual_a, res.residual_abar])
    header = ["state", "n_e", "S_A", "S_Abar", "S_alg_A", "S_alg_Abar", "residual_A", "residual_Abar"]
    passed = worst <= cfg.tolerance
    if cfg.csv:
        _write_csv(cfg.csv, header, rows)
    _emit(cfg, {
        "level": cfg.level,
        "region": sorted(checker.report.inside),
        "area": checker.area.to_json(),
        "rows": [dict(zip(header, r)) for r in rows],
        "max_residual": worst,
        "tolerance": cfg.tolerance,
        "passed": passed,
    })
    return EXIT_OK if passed else EXIT_FAIL


def cmd_distance(cfg: RunConfig) -> int:
    system = psi_system(cfg.level)
    holes = parse_hole(cfg.extra["hole"], system.K)
    cache = probes.RegionCache(system)
    records = [probes.connected_distance(system, h, cache) for h in holes]
    if cfg.csv:
        prices = [probes.family_c_recovery(system, r.hole, cache) for r in records]
        rows = [[r.hole, r.scale, r.d, r.d_c, p.size if p else ""] for r, p in zip(records, prices)]
        _write_csv(cfg.csv, ["hole", "scale", "d", "d_c", "p"], rows)
    if cfg.out:
        _emit(cfg, {"level": cfg.level, "records": [r.to_json() for r in records]})
    for r in records:
        print(r.d_c if len(records) == 1 else f"{r.hole} {r.scale} {r.d} {r.d_c}")
    return EXIT_OK


def cmd_recover(cfg: RunConfig) -> int:
    system = psi_system(cfg.level)
    holes = parse_hole(cfg.extra["hole"], system.K)
    payload: dict = {"level": cfg.level, "recoveries": []}
    ok = True
    for h in holes:
        recs = probes.minimal_recoveries(system, h)
        ok = ok and all(r.is_minimal for r in recs)
        price, witness = probes.connected_price(system, h)
        payload["recoveries"].append({
            "hole": h,
            "minimal_recoveries": [r.to_json() for r in recs],
            "pairwise_intersect": probes.recoveries_intersect(recs),
            "connected_price": price,
            "connected_price_witness": list(witness),
        })
    if cfg.extra.get("fit"):
        levels = [int(x) for x in cfg.extra["fit"].split(",")]
        payload["fit"] = probes.uberholography_fit(levels).to_json()
    _emit(cfg, payload)
    if cfg.svg and payload["recoveries"]:
        first = payload["recoveries"][0]["minimal_recoveries"]
        region = first[0]["region"] if first else []
        cfg.svg.write_text(render.fractal_svg(system.lattice, region,
                                              {holes[0]: render.PALETTE["highlight"]}))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_circuit(cfg: RunConfig) -> int:
    system = psi_system(cfg.level)
    pattern = cfg.extra.get("pattern")
    if pattern is not None:
        if len(pattern) != system.K or any(ch not in "0123" for ch in pattern):
            raise UsageError(f"pattern must be {system.K} digits in 0..3")
        pattern = [int(ch) for ch in pattern]
    circ = circuit.emit_prep_circuit(cfg.level, pattern)
    text = circ.to_text() if cfg.extra["format"] == "text" else circ.dumps()
    if cfg.out:
        cfg.out.write_text(text)
    else:
        print(text, end="" if text.endswith("\n") else "\n")
    if cfg.extra.get("verify"):
        ok = circuit.verify_prep(cfg.level, pattern)
        print(f"verified: {ok}", file=sys.stderr)
        return EXIT_OK if ok else EXIT_FAIL
    return EXIT_OK


def cmd_render(cfg: RunConfig) -> int:
    lat = psi_system(cfg.level).lattice
    region = cfg.region() if (cfg.arc or cfg.qudits) else frozenset()
    if cfg.extra["view"] == "boundary":
        svg = render.boundary_svg(lat, region)
    else:
        svg = render.fractal_svg(lat, region)
    target = cfg.svg or cfg.out
    if target:
        target.write_text(svg)
    else:
        print(svg, end="")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    system = psi_system(cfg.level)
    lat = system.lattice
    n = lat.qudit_count
    rows = []
    for size in range(1, n):
        for start in range(n):
            region = lat.arc(start, size)
            report = duality.compute_wedges(system, region)
            area = rt.area_term(report)
            labels = sorted({report.splits[h][0].label for h in report.e})
            rows.append([start, size, len(report.w_a), len(report.w_abar), len(report.e),
                         area.n_e, ";".join(labels)])
    header = ["start", "size", "w_a", "w_abar", "e", "n_e", "split_labels"]
    text = _write_csv(cfg.csv, header, rows)
    if not cfg.csv:
        print(text, end="")
    return EXIT_OK


COMMANDS = {
    "build": cmd_build,
    "verify-code": cmd_verify_code,
    "wedges": cmd_wedges,
    "rt": cmd_rt,
    "distance": cmd_distance,
    "recover": cmd_recover,
    "circuit": cmd_circuit,
    "render": cmd_render,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sierpinski-hqec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p: argparse.ArgumentParser, region: bool = False) -> None:
        p.add_argument("--level", type=int, required=True, help="lattice level (1..8)")
        p.add_argument("--out", type=Path, help="write the JSON (or text) result here")
        if region:
            p.add_argument("--arc", help="ring positions a..b, inclusive, wrapping allowed")
            p.add_argument("--qudits", help="comma-separated qudit indices")
            p.add_argument("--geometry", choices=("fractal", "boundary"), default="fractal",
                           help="interpret --qudits as qudit ids or ring positions")

    common(sub.add_parser("build", help="lattice geometry as JSON"))
    common(sub.add_parser("verify-code", help="counting, isometry, recovery and center suites"))
    p = sub.add_parser("wedges", help="entanglement wedges of a bipartition")
    common(p, region=True)
    p.add_argument("--svg", type=Path)
    p = sub.add_parser("rt", help="entropy identity residuals")
    common(p, region=True)
    p.add_argument("--states", default="random:20")
    p.add_argument("--mixtures", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--csv", type=Path)
    p = sub.add_parser("distance", help="connected and unrestricted distances")
    common(p)
    p.add_argument("--hole", default="central")
    p.add_argument("--csv", type=Path)
    p = sub.add_parser("recover", help="minimal recoveries and scaling fit")
    common(p)
    p.add_argument("--hole", default="central")
    p.add_argument("--fit", help="comma-separated levels for the scaling fit")
    p.add_argument("--svg", type=Path)
    p = sub.add_parser("circuit", help="preparation circuit")
    common(p)
    p.add_argument("--pattern", help="one digit 0..3 per hole")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--verify", action="store_true")
    p = sub.add_parser("render", help="SVG drawing")
    common(p, region=True)
    p.add_argument("--view", choices=("fractal", "boundary"), default="fractal")
    p.add_argument("--svg", type=Path)
    p = sub.add_parser("sweep", help="wedge and area table over connected arcs")
    common(p)
    p.add_argument("--csv", type=Path)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    known = {"level", "command", "arc", "qudits", "geometry", "out", "csv", "svg", "seed", "tolerance"}
    values = vars(args)
    cfg = RunConfig(**{k: v for k, v in values.items() if k in known and v is not None})
    cfg.extra = {k: v for k, v in values.items() if k not in known}
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = config_from_args(args)
        if not 1 <= cfg.level <= 8:
            raise UsageError("level must lie in 1..8")
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
