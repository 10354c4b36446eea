"""Code distances, minimal recoveries and the scaling of recovery sizes.

Erasing a region ``B`` is correctable for a hole exactly when the hole's full
algebra is reconstructable on the complement of ``B``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from . import gf2
from .lattice import HAUSDORFF_DIM
from .patterns import PsiSystem, psi_system
from .reconstruction import RegionAnalysis

FAMILY_C = "c"
FAMILY_OTHER = "other"


class RegionCache:
    """Memoized region analyses keyed by the region's qudit set."""

    def __init__(self, system: PsiSystem) -> None:
        self.system = system
        self.n = system.lattice.qudit_count
        self._cache: dict[frozenset[int], RegionAnalysis] = {}

    def analysis(self, qudits: Iterable[int]) -> RegionAnalysis:
        key = frozenset(qudits)
        if key not in self._cache:
            self._cache[key] = RegionAnalysis(self.system, key)
        return self._cache[key]

    def reconstructs(self, qudits: Iterable[int], hole: int) -> bool:
        return self.analysis(qudits).is_full(hole)

    def erasure_correctable(self, erased: Iterable[int], hole: int) -> bool:
        return self.reconstructs(frozenset(range(self.n)) - frozenset(erased), hole)


@dataclass(frozen=True)
class DistanceRecord:
    hole: int
    scale: int
    d_c: int
    d: int
    connected_witness: tuple[int, ...]
    witness: tuple[int, ...]
    logical_weight: int
    logical_witness: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "hole": self.hole,
            "scale": self.scale,
            "d_c": self.d_c,
            "d": self.d,
            "connected_witness": list(self.connected_witness),
            "witness": list(self.witness),
            "logical_weight": self.logical_weight,
            "logical_witness": list(self.logical_witness),
        }


def connected_distances(system: PsiSystem, holes: Sequence[int] | None = None,
                        cache: RegionCache | None = None) -> dict[int, tuple[int, tuple[int, ...]]]:
    """Smallest erased arc that is not correctable, with a witness arc, for each hole."""
    lat = system.lattice
    n = lat.qudit_count
    cache = cache or RegionCache(system)
    pending = set(range(system.K) if holes is None else holes)
    out: dict[int, tuple[int, tuple[int, ...]]] = {}
    for size in range(1, n + 1):
        for start in range(n):
            erased = lat.arc(start, size)
            an = cache.analysis(frozenset(range(n)) - erased)
            for h in sorted(pending):
                if not an.is_full(h):
                    out[h] = (size, tuple(lat.ring_order[(start + i) % n] for i in range(size)))
                    pending.discard(h)
            if not pending:
                return out
            if size == n:
                break
    return out


def _gate_supported_logicals(system: PsiSystem, qudits: Sequence[int]) -> list[int]:
    """Logical actions of parity-space elements supported on the given qudits."""
    bits = [2 * q + b for q in qudits for b in (0, 1)]
    rows = []
    for r in system.constraint_rows:
        row = 0
        for j, bit in enumerate(bits):
            row |= ((r >> bit) & 1) << j
        rows.append(row)
    out = []
    for v in gf2.nullspace(rows, len(bits)):
        config = 0
        for j, bit in enumerate(bits):
            config |= ((v >> j) & 1) << bit
        out.append(system.logical_of_config(config))
    return out


def _acts_only_on(vectors: list[int], hole: int) -> bool:
    unit = [1 << (2 * hole), 2 << (2 * hole)]
    return bool(gf2.intersect(vectors, unit))


def logical_weight(system: PsiSystem, hole: int, max_size: int = 3) -> tuple[int, tuple[int, ...]]:
    """Smallest support of a gate product acting nontrivially on the hole and nowhere else."""
    n = system.lattice.qudit_count
    for size in range(1, max_size + 1):
        for region in combinations(range(n), size):
            if _acts_only_on(_gate_supported_logicals(system, region), hole):
                return size, region
    raise RuntimeError(f"no logical operator of support <= {max_size} on hole {hole}")


def unrestricted_distance(system: PsiSystem, hole: int) -> int:
    """Smallest support, over arbitrary regions, of a reconstructable operator acting only on the hole."""
    return logical_weight(system, hole)[0]


def erasure_distance(system: PsiSystem, hole: int, d_c: int, arc_witness: tuple[int, ...],
                     cache: RegionCache | None = None) -> tuple[int, tuple[int, ...]]:
    """Smallest erased region of any shape that is not correctable.

    Erasing the support of a gate product acting on the hole is never correctable,
    so the search over small regions only needs the full analysis for sizes below
    the first such support.
    """
    cache = cache or RegionCache(system)
    n = system.lattice.qudit_count
    for size in range(1, d_c):
        for region in combinations(range(n), size):
            if any((v >> (2 * hole)) & 3 for v in _gate_supported_logicals(system, region)):
                return size, region
            if not cache.erasure_correctable(region, hole):
                return size, region
    return d_c, arc_witness


def connected_distance(system: PsiSystem, hole: int, cache: RegionCache | None = None) -> DistanceRecord:
    cache = cache or RegionCache(system)
    d_c, arc_witness = connected_distances(system, [hole], cache)[hole]
    d, witness = erasure_distance(system, hole, d_c, arc_witness, cache)
    weight, weight_witness = logical_weight(system, hole)
    return DistanceRecord(
        hole=hole, scale=system.lattice.holes[hole].scale, d_c=d_c, d=d,
        connected_witness=arc_witness, witness=witness,
        logical_weight=weight, logical_witness=weight_witness,
    )


def distance_table(system: PsiSystem) -> list[DistanceRecord]:
    cache = RegionCache(system)
    dcs = connected_distances(system, None, cache)
    out = []
    for h in range(system.K):
        d_c, arc_witness = dcs[h]
        d, witness = erasure_distance(system, h, d_c, arc_witness, cache)
        weight, weight_witness = logical_weight(system, h)
        out.append(DistanceRecord(
            hole=h, scale=system.lattice.holes[h].scale, d_c=d_c, d=d,
            connected_witness=arc_witness, witness=witness,
            logical_weight=weight, logical_witness=weight_witness,
        ))
    return out


@dataclass(frozen=True)
class MinimalRecovery:
    hole: int
    region: tuple[int, ...]
    family: str
    drop_tests: tuple[tuple[int, bool], ...] = field(default=())

    @property
    def size(self) -> int:
        return len(self.region)

    @property
    def is_minimal(self) -> bool:
        return all(not still for _, still in self.drop_tests)

    def to_json(self) -> dict:
        return {
            "hole": self.hole,
            "family": self.family,
            "size": self.size,
            "region": list(self.region),
            "minimal": self.is_minimal,
            "drop_tests": [[q, still] for q, still in self.drop_tests],
        }


def drop_one_tests(system: PsiSystem, region: Iterable[int], hole: int,
                   cache: RegionCache | None = None) -> tuple[tuple[int, bool], ...]:
    """For each qudit in ring order: whether the region without it still reconstructs."""
    cache = cache or RegionCache(system)
    region = frozenset(region)
    ring = system.lattice.ring
    return tuple((q, cache.reconstructs(region - {q}, hole)) for q in sorted(region, key=ring.__getitem__))


def family_c_recovery(system: PsiSystem, hole: int, cache: RegionCache | None = None
                      ) -> MinimalRecovery | None:
    """Two laterals of the hole plus one qudit of the remaining sub-block."""
    cache = cache or RegionCache(system)
    lat = system.lattice
    h = lat.holes[hole]
    lateral_qudits = [frozenset(s.qudit for s in side) for side in h.laterals]
    for keep in ((0, 1), (1, 2), (0, 2)):
        (third,) = {0, 1, 2} - set(keep)
        base = lateral_qudits[keep[0]] | lateral_qudits[keep[1]]
        for q in sorted(lat.block_qudits(h.prefix + (third,)), key=lat.ring.__getitem__):
            region = base | {q}
            if cache.reconstructs(region, hole):
                ordered = tuple(sorted(region, key=lat.ring.__getitem__))
                return MinimalRecovery(hole, ordered, FAMILY_C, drop_one_tests(system, region, hole, cache))
    return None


def greedy_minimal_recovery(system: PsiSystem, hole: int, start: Iterable[int],
                            cache: RegionCache | None = None) -> MinimalRecovery:
    """Shrink a reconstructing region by dropping qudits in ring order while it still reconstructs."""
    cache = cache or RegionCache(system)
    ring = system.lattice.ring
    region = set(start)
    if not cache.reconstructs(region, hole):
        raise ValueError("starting region does not reconstruct the hole")
    for q in sorted(region, key=ring.__getitem__):
        if cache.reconstructs(region - {q}, hole):
            region.discard(q)
    ordered = tuple(sorted(region, key=ring.__getitem__))
    return MinimalRecovery(hole, ordered, FAMILY_OTHER, drop_one_tests(system, region, hole, cache))


def minimal_recoveries(system: PsiSystem, hole: int, extra_starts: int = 3) -> list[MinimalRecovery]:
    """The family-c candidate plus greedy shrinks of a few reconstructing arcs."""
    cache = RegionCache(system)
    lat = system.lattice
    n = lat.qudit_count
    out = []
    fam = family_c_recovery(system, hole, cache)
    if fam is not None:
        out.append(fam)
    found = 0
    for start in range(0, n, max(1, n // (extra_starts + 1))):
        if found >= extra_starts:
            break
        arc = lat.arc(start, n - 1)
        if cache.reconstructs(arc, hole):
            rec = greedy_minimal_recovery(system, hole, arc, cache)
            if all(set(rec.region) != set(r.region) for r in out):
                out.append(rec)
            found += 1
    return out


def recoveries_intersect(recoveries: Sequence[MinimalRecovery]) -> bool:
    return all(set(a.region) & set(b.region) for a, b in combinations(recoveries, 2))


def connected_price(system: PsiSystem, hole: int, cache: RegionCache | None = None
                    ) -> tuple[int, tuple[int, ...]]:
    """Smallest arc reconstructing the hole, with a witness."""
    cache = cache or RegionCache(system)
    lat = system.lattice
    n = lat.qudit_count
    for size in range(1, n + 1):
        for start in range(n):
            arc = lat.arc(start, size)
            if cache.reconstructs(arc, hole):
                return size, tuple(lat.ring_order[(start + i) % n] for i in range(size))
            if size == n:
                break
    raise RuntimeError("the whole boundary must reconstruct every hole")


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    max_deviation: float
    levels: tuple[int, ...]
    sizes: tuple[int, ...]

    @property
    def offset_slope(self) -> float:
        """Slope of log(size - 1) against log N, which removes the constant offset of N0 + 1."""
        x = np.log([3.0**lv for lv in self.levels])
        y = np.log(np.asarray(self.sizes, dtype=float) - 1)
        return float(np.polyfit(x, y, 1)[0])

    @property
    def expected_slope(self) -> float:
        return 1 / HAUSDORFF_DIM

    def to_json(self) -> dict:
        return {
            "levels": list(self.levels),
            "sizes": list(self.sizes),
            "slope": self.slope,
            "intercept": self.intercept,
            "max_deviation": self.max_deviation,
            "offset_slope": self.offset_slope,
            "expected_slope": self.expected_slope,
            "hausdorff_dim": HAUSDORFF_DIM,
        }


def fit_scaling(levels: Sequence[int], sizes: Sequence[int]) -> ScalingFit:
    """Least-squares line through (log N, log size)."""
    if len(levels) < 2:
        raise ValueError("a scaling fit needs at least two levels")
    x = np.log([3.0**lv for lv in levels])
    y = np.log(np.asarray(sizes, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    dev = float(np.max(np.abs(y - (slope * x + intercept))))
    return ScalingFit(float(slope), float(intercept), dev, tuple(levels), tuple(sizes))


def uberholography_fit(levels: Sequence[int]) -> ScalingFit:
    """Fit the central-hole family-c recovery size against the qudit count."""
    levels = list(levels)
    if len(levels) < 2:
        raise ValueError("a scaling fit needs at least two levels")
    if any(not 2 <= lv <= 5 for lv in levels):
        raise ValueError("levels must lie in 2..5")
    sizes = []
    for lv in levels:
        rec = family_c_recovery(psi_system(lv), 0)
        if rec is None or not rec.is_minimal:
            raise RuntimeError(f"no minimal family-c recovery at level {lv}")
        sizes.append(rec.size)
    return fit_scaling(levels, sizes)


def hausdorff_check(level: int) -> float:
    """Deviation of log N from h log N0."""
    return abs(math.log(3**level) - HAUSDORFF_DIM * math.log(2**level))
