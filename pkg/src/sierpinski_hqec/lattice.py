"""Sierpinski gasket geometry of ququarts, holes, gate edges and boundary ring.

A physical qudit is a smallest upward triangle, addressed by its block path
``(d_1, ..., d_level)`` with digits 0 (top), 1 (bottom right), 2 (bottom
left); the digits run clockwise. Qudit ids follow the raster order of the
fractal picture (rows top to bottom, left to right). Ring positions follow a
recursive block order: the whole lattice visits its top, bottom-right and
bottom-left blocks in turn; top and bottom-right children inherit their
parent's sub-block order and a bottom-left child swaps its last two. Every
block at every scale is therefore one arc.

Corner indicators are relative to the qudit's own position in its smallest
block: indicator 1 is the outward corner, 2 and 3 follow clockwise. Side
``tau`` is the side opposite corner indicator ``tau``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import product
from typing import Iterator

MAX_LEVEL = 8
HAUSDORFF_DIM = math.log(3) / math.log(2)
PAIRS = ((0, 1), (1, 2), (2, 0))


class EdgeKind(str, Enum):
    SAME_BLOCK = "same_block"
    CROSS_BLOCK = "cross_block"


@dataclass(frozen=True)
class SideRef:
    qudit: int
    tau: int


@dataclass(frozen=True)
class GateEdge:
    id: int
    endpoints: tuple[int, int]
    sigmas: tuple[int, int]
    kind: EdgeKind
    owner_hole: int
    corner_index: int


@dataclass(frozen=True)
class Hole:
    id: int
    prefix: tuple[int, ...]
    scale: int
    laterals: tuple[tuple[SideRef, ...], tuple[SideRef, ...], tuple[SideRef, ...]]
    corner_gates: tuple[int, int, int]
    lateral_labels: tuple[int, int, int] = (1, 2, 3)

    @property
    def loop_sides(self) -> tuple[SideRef, ...]:
        return self.laterals[0] + self.laterals[1] + self.laterals[2]

    @property
    def loop_qudits(self) -> frozenset[int]:
        return frozenset(s.qudit for s in self.loop_sides)


@dataclass(frozen=True)
class BoundaryRegion:
    """Set of ring positions stored as an integer bit mask."""

    membership: int
    size: int

    @classmethod
    def from_positions(cls, positions, size: int) -> "BoundaryRegion":
        m = 0
        for p in positions:
            if not 0 <= p < size:
                raise ValueError(f"ring position {p} out of range")
            m |= 1 << p
        return cls(m, size)

    def positions(self) -> list[int]:
        return [p for p in range(self.size) if (self.membership >> p) & 1]

    def complement(self) -> "BoundaryRegion":
        return BoundaryRegion(((1 << self.size) - 1) ^ self.membership, self.size)

    def is_connected(self) -> bool:
        """True when the positions form one arc on the ring (wrap allowed)."""
        m = self.membership
        if m == 0 or m == (1 << self.size) - 1:
            return True
        # count 0 -> 1 transitions around the ring
        rotated = ((m << 1) | (m >> (self.size - 1))) & ((1 << self.size) - 1)
        starts = m & ~rotated
        return starts.bit_count() == 1

    def __len__(self) -> int:
        return self.membership.bit_count()


def _offset(digit: int, u: int) -> tuple[int, int]:
    """Top-vertex offset of a sub-block of side ``u`` in (half-x, row) units."""
    if digit == 0:
        return 0, 0
    if digit == 1:
        return u, u
    return -u, u


@dataclass(frozen=True)
class Lattice:
    level: int
    paths: tuple[tuple[int, ...], ...]
    ring: tuple[int, ...]
    edges: tuple[GateEdge, ...]
    holes: tuple[Hole, ...]
    lattice_laterals: tuple[tuple[SideRef, ...], tuple[SideRef, ...], tuple[SideRef, ...]]
    _path_index: dict = field(repr=False, compare=False)

    @property
    def qudit_count(self) -> int:
        return 3**self.level

    @property
    def hole_count(self) -> int:
        return (3**self.level - 1) // 2

    @property
    def linear_size(self) -> int:
        return 2**self.level

    @property
    def hausdorff_dim(self) -> float:
        return HAUSDORFF_DIM

    @property
    def config_bits(self) -> int:
        return 2 * self.qudit_count

    @cached_property
    def ring_order(self) -> tuple[int, ...]:
        """Qudit at each ring position."""
        out = [0] * self.qudit_count
        for q, p in enumerate(self.ring):
            out[p] = q
        return tuple(out)

    def fractal_position(self, qudit: int) -> tuple[int, ...]:
        return self.paths[qudit]

    def qudit_at_path(self, path: tuple[int, ...]) -> int:
        return self._path_index[tuple(path)]

    def boundary_position(self, qudit: int) -> int:
        return self.ring[qudit]

    def coordinates(self, qudit: int) -> tuple[float, float]:
        """Top vertex of the qudit triangle; whole gasket top at the origin, y down."""
        x2, row = 0, 0
        for j, d in enumerate(self.paths[qudit]):
            dx, dr = _offset(d, 2 ** (self.level - j - 1))
            x2 += dx
            row += dr
        return x2 / 2, row * math.sqrt(3) / 2

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.qudit_count
        for e in self.edges:
            for q in e.endpoints:
                deg[q] += 1
        return tuple(deg)

    @cached_property
    def incident_edges(self) -> tuple[tuple[int, ...], ...]:
        inc: list[list[int]] = [[] for _ in range(self.qudit_count)]
        for e in self.edges:
            for q in e.endpoints:
                inc[q].append(e.id)
        return tuple(tuple(x) for x in inc)

    @cached_property
    def corner_qudits(self) -> tuple[int, int, int]:
        return tuple(self.qudit_at_path((c,) * self.level) for c in range(3))

    def hole_by_prefix(self, prefix: tuple[int, ...]) -> Hole:
        return self.holes[_hole_index(prefix)]

    def block_qudits(self, prefix: tuple[int, ...]) -> list[int]:
        """Qudits of the block with the given path prefix, in ring order."""
        rest = self.level - len(prefix)
        return [self.qudit_at_path(tuple(prefix) + tail) for tail in product(range(3), repeat=rest)]

    def qudits_of_region(self, region: BoundaryRegion) -> frozenset[int]:
        return frozenset(self.ring_order[p] for p in region.positions())

    def region_of_qudits(self, qudits) -> BoundaryRegion:
        return BoundaryRegion.from_positions((self.ring[q] for q in qudits), self.qudit_count)

    def arc(self, start: int, length: int) -> frozenset[int]:
        """Qudits at ring positions ``start .. start+length-1`` (mod N)."""
        n = self.qudit_count
        return frozenset(self.ring_order[(start + i) % n] for i in range(length))

    def connected_arcs(self, size: int) -> Iterator[BoundaryRegion]:
        n = self.qudit_count
        if not 1 <= size <= n:
            raise ValueError(f"arc size must be in 1..{n}, got {size}")
        if size == n:
            yield BoundaryRegion((1 << n) - 1, n)
            return
        for start in range(n):
            yield BoundaryRegion.from_positions(((start + i) % n for i in range(size)), n)

    def qudit_mask(self, qudits) -> int:
        """Configuration bit mask covering both bits of every listed qudit."""
        m = 0
        for q in qudits:
            m |= 3 << (2 * q)
        return m

    def side_mask(self, side: SideRef) -> int:
        """Configuration bits whose XOR is the dark bit of ``side``."""
        return {1: 2, 2: 1, 3: 3}[side.tau] << (2 * side.qudit)

    def parity_mask(self, sides) -> int:
        m = 0
        for s in sides:
            m ^= self.side_mask(s)
        return m

    @cached_property
    def hole_lateral_masks(self) -> tuple[tuple[int, int, int], ...]:
        return tuple(tuple(self.parity_mask(lat) for lat in h.laterals) for h in self.holes)

    @cached_property
    def outer_lateral_masks(self) -> tuple[int, int, int]:
        return tuple(self.parity_mask(lat) for lat in self.lattice_laterals)

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "qudit_count": self.qudit_count,
            "hole_count": self.hole_count,
            "linear_size": self.linear_size,
            "qudits": [
                {"id": q, "path": list(self.paths[q]), "ring": self.ring[q],
                 "xy": list(self.coordinates(q))}
                for q in range(self.qudit_count)
            ],
            "edges": [
                {"id": e.id, "endpoints": list(e.endpoints), "sigmas": list(e.sigmas),
                 "kind": e.kind.value, "owner_hole": e.owner_hole, "corner": e.corner_index}
                for e in self.edges
            ],
            "holes": [
                {"id": h.id, "prefix": list(h.prefix), "scale": h.scale,
                 "corner_gates": list(h.corner_gates),
                 "laterals": [[[s.qudit, s.tau] for s in lat] for lat in h.laterals]}
                for h in self.holes
            ],
            "lattice_laterals": [[[s.qudit, s.tau] for s in lat] for lat in self.lattice_laterals],
            "boundary_order": list(self.ring_order),
        }


def _hole_index(prefix: tuple[int, ...]) -> int:
    """Holes are ordered by prefix length, then lexicographically."""
    offset = (3 ** len(prefix) - 1) // 2
    return offset + sum(d * 3 ** (len(prefix) - 1 - j) for j, d in enumerate(prefix))


def _sigma(path: tuple[int, ...], toward: int) -> int:
    """Indicator of the qudit corner pointing in geometric direction ``toward``."""
    return (toward - path[-1]) % 3 + 1


def _side(path_index: dict, path: tuple[int, ...], opposite: int) -> SideRef:
    return SideRef(path_index[path], (opposite - path[-1]) % 3 + 1)


# child k of a block visits its sub-blocks in the order RING_RULE[k] of the parent's order
RING_RULE = ((0, 1, 2), (0, 1, 2), (0, 2, 1))


def ring_paths(level: int) -> list[tuple[int, ...]]:
    """Block paths in ring order; each block at every scale is a contiguous arc."""
    out: list[tuple[int, ...]] = []

    def visit(prefix: tuple[int, ...], order: tuple[int, int, int]) -> None:
        if len(prefix) == level:
            out.append(prefix)
            return
        for k in range(3):
            child_order = tuple(order[j] for j in RING_RULE[k])
            visit(prefix + (order[k],), child_order)

    visit((), (0, 1, 2))
    return out


def build_lattice(level: int) -> Lattice:
    if not isinstance(level, int) or not 1 <= level <= MAX_LEVEL:
        raise ValueError(f"level must be an integer in 1..{MAX_LEVEL}, got {level!r}")
    all_paths = list(product(range(3), repeat=level))

    def raster_key(p: tuple[int, ...]) -> tuple[int, int]:
        x2, row = 0, 0
        for j, d in enumerate(p):
            dx, dr = _offset(d, 2 ** (level - j - 1))
            x2 += dx
            row += dr
        return row, x2

    paths = tuple(sorted(all_paths, key=raster_key))
    path_index = {p: i for i, p in enumerate(paths)}
    ring_position = {p: i for i, p in enumerate(ring_paths(level))}
    ring = tuple(ring_position[p] for p in paths)

    prefixes = [p for length in range(level) for p in product(range(3), repeat=length)]
    edges: list[GateEdge] = []
    holes: list[Hole] = []
    for hid, q in enumerate(prefixes):
        assert _hole_index(q) == hid
        r = level - len(q) - 1
        gates = {}
        for a, b in PAIRS:
            pi = q + (a,) + (b,) * r
            pj = q + (b,) + (a,) * r
            k = 3 - a - b + 1
            eid = len(edges)
            edges.append(GateEdge(
                id=eid,
                endpoints=(path_index[pi], path_index[pj]),
                sigmas=(_sigma(pi, b), _sigma(pj, a)),
                kind=EdgeKind.SAME_BLOCK if r == 0 else EdgeKind.CROSS_BLOCK,
                owner_hole=hid,
                corner_index=k,
            ))
            gates[k] = eid
        laterals = []
        for c in range(3):
            tails = [t for t in product(range(3), repeat=r) if c not in t]
            tails.sort()
            laterals.append(tuple(_side(path_index, q + (c,) + t, c) for t in tails))
        holes.append(Hole(
            id=hid, prefix=q, scale=level - len(q), laterals=tuple(laterals),
            corner_gates=(gates[1], gates[2], gates[3]),
        ))

    outer = []
    for c in range(3):
        tails = sorted(t for t in all_paths if c not in t)
        outer.append(tuple(_side(path_index, t, c) for t in tails))

    return Lattice(
        level=level, paths=paths, ring=ring, edges=tuple(edges), holes=tuple(holes),
        lattice_laterals=tuple(outer), _path_index=path_index,
    )
