"""GF(2) configuration algebra: local states, gate translations, the even-parity
configuration space and the hole pattern functionals.

A configuration is an integer with two bits per qudit: bit ``2q`` and bit
``2q+1`` hold the binary digits of the local state ``alpha_q`` in {0,1,2,3}.
Single-qudit flips ``S^sigma`` act as ``alpha -> alpha XOR sigma`` and the dark
sides are linear in these bits: side 1 is bit 1, side 2 is bit 0 and side 3 is
their XOR. Every gate is therefore a translation of the configuration vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

import numpy as np

from . import gf2
from .lattice import GateEdge, Lattice, build_lattice

ENUMERATION_MAX_LEVEL = 2


class CapabilityError(RuntimeError):
    """Raised when an exact dense computation is requested beyond its scale."""


@lru_cache(maxsize=None)
def get_lattice(level: int) -> Lattice:
    return build_lattice(level)


def dark_bits(alpha: int) -> tuple[int, int, int]:
    """Dark flags of sides 1, 2, 3 for a local state."""
    return tuple(int(alpha != 0 and tau != alpha) for tau in (1, 2, 3))


def alpha_of(config: int, qudit: int) -> int:
    return (config >> (2 * qudit)) & 3


def alphas(config: int, n: int) -> list[int]:
    return [(config >> (2 * q)) & 3 for q in range(n)]


def config_from_alphas(values: Sequence[int]) -> int:
    c = 0
    for q, a in enumerate(values):
        if not 0 <= a <= 3:
            raise ValueError(f"local state must be in 0..3, got {a}")
        c |= a << (2 * q)
    return c


def alpha_string(config: int, n: int) -> str:
    return "".join(str(a) for a in alphas(config, n))


def config_from_string(text: str) -> int:
    return config_from_alphas([int(ch) for ch in text.strip()])


def dark_vector(config: int, n: int) -> int:
    """Dark-side bit vector with bit ``3q + tau - 1`` for side ``tau`` of qudit ``q``."""
    v = 0
    for q in range(n):
        for t, bit in enumerate(dark_bits(alpha_of(config, q))):
            v |= bit << (3 * q + t)
    return v


def dark_hex(config: int, n: int) -> str:
    return format(dark_vector(config, n), "x")


def dark_key(config: int, n: int) -> tuple[int, ...]:
    """Sort key reading dark bits in (qudit, side) order."""
    return tuple(b for q in range(n) for b in dark_bits(alpha_of(config, q)))


def apply_S(config: int, qudit: int, sigma: int) -> int:
    if sigma not in (1, 2, 3):
        raise ValueError(f"sigma must be 1, 2 or 3, got {sigma}")
    return config ^ (sigma << (2 * qudit))


def edge_vector(edge: GateEdge) -> int:
    (i, j), (si, sj) = edge.endpoints, edge.sigmas
    return (si << (2 * i)) ^ (sj << (2 * j))


@dataclass(frozen=True)
class PsiSystem:
    """Constraint system and generators of the even-parity configuration space."""

    lattice: Lattice

    @property
    def K(self) -> int:
        return self.lattice.hole_count

    @cached_property
    def constraint_rows(self) -> tuple[int, ...]:
        """Loop parities of every hole followed by the three outer-side parities."""
        loops = tuple(m[0] ^ m[1] ^ m[2] for m in self.lattice.hole_lateral_masks)
        return loops + tuple(self.lattice.outer_lateral_masks)

    @cached_property
    def constraint_rank(self) -> int:
        return gf2.rank(self.constraint_rows)

    @cached_property
    def gate_vectors(self) -> tuple[int, ...]:
        return tuple(edge_vector(e) for e in self.lattice.edges)

    @cached_property
    def kernel_basis(self) -> tuple[int, ...]:
        """Basis of the constraint kernel computed by elimination."""
        return tuple(gf2.nullspace(self.constraint_rows, self.lattice.config_bits))

    @cached_property
    def dimension(self) -> int:
        return self.lattice.config_bits - self.constraint_rank

    @cached_property
    def tx_vectors(self) -> tuple[int, ...]:
        """Configuration translation of each assembled hole gate T(x)."""
        out = []
        for h in self.lattice.holes:
            v = 0
            for e in h.corner_gates:
                v ^= self.gate_vectors[e]
            out.append(v)
        return tuple(out)

    @cached_property
    def beta_rows(self) -> tuple[int, ...]:
        """Two parity functionals per hole: row 2h is beta bit 0, row 2h+1 is bit 1."""
        rows = []
        for m in self.lattice.hole_lateral_masks:
            rows += [m[1], m[0]]
        return tuple(rows)

    @cached_property
    def edge_logical(self) -> tuple[int, ...]:
        return tuple(self.logical_of_config(v) for v in self.gate_vectors)

    def is_psi(self, config: int) -> bool:
        return all(not gf2.parity(r & config) for r in self.constraint_rows)

    def logical_of_config(self, config: int) -> int:
        """Pattern of a configuration packed as 2 bits per hole."""
        out = 0
        for i, r in enumerate(self.beta_rows):
            out |= gf2.parity(r & config) << i
        return out

    def beta(self, config: int, hole: int) -> int:
        m = self.lattice.hole_lateral_masks[hole]
        return gf2.parity(m[1] & config) | (gf2.parity(m[0] & config) << 1)

    def pattern(self, config: int) -> tuple[int, ...]:
        return tuple(self.beta(config, h) for h in range(self.K))

    def lateral_parities(self, config: int, hole: int) -> tuple[int, int, int]:
        return tuple(gf2.parity(m & config) for m in self.lattice.hole_lateral_masks[hole])

    def gates_config(self, selection: int) -> int:
        v = 0
        for e in gf2.bits_of(selection):
            v ^= self.gate_vectors[e]
        return v

    def logical_action(self, selection: int) -> int:
        v = 0
        for e in gf2.bits_of(selection):
            v ^= self.edge_logical[e]
        return v

    def tx_selection(self, hole: int) -> int:
        m = 0
        for e in self.lattice.holes[hole].corner_gates:
            m |= 1 << e
        return m

    @cached_property
    def coordinates_basis(self) -> gf2.EchelonBasis:
        return gf2.EchelonBasis(self.gate_vectors)

    def gate_coordinates(self, config: int) -> int | None:
        """Unique gate selection producing ``config`` from the all-zero state."""
        return self.coordinates_basis.solve(config)

    def enumerate_psi(self) -> Iterator[int]:
        """All configurations of the space in canonical dark-vector order."""
        if self.lattice.level > ENUMERATION_MAX_LEVEL:
            raise CapabilityError("enumeration of the configuration space is limited to level <= 2")
        yield from self.canonical_order

    @cached_property
    def canonical_order(self) -> tuple[int, ...]:
        if self.lattice.level > ENUMERATION_MAX_LEVEL:
            raise CapabilityError("enumeration of the configuration space is limited to level <= 2")
        n = self.lattice.qudit_count
        return tuple(sorted(gf2.span(self.gate_vectors), key=lambda c: dark_key(c, n)))

    def to_text(self) -> str:
        """Constraint matrix as rows of 0/1 characters over configuration bits."""
        width = self.lattice.config_bits
        return "\n".join(
            "".join(str((r >> j) & 1) for j in range(width)) for r in self.constraint_rows
        )


@lru_cache(maxsize=None)
def psi_system(level: int) -> PsiSystem:
    return PsiSystem(get_lattice(level))


def psi_kernel(lattice: Lattice) -> PsiSystem:
    return psi_system(lattice.level)


def apply_T(config: int, edge: GateEdge) -> int:
    return config ^ edge_vector(edge)


def apply_gates(system: PsiSystem, config: int, selection: int) -> int:
    return config ^ system.gates_config(selection)


def apply_Tx(system: PsiSystem, config: int, hole: int) -> int:
    return config ^ system.tx_vectors[hole]


def gate_logical_action(system: PsiSystem, edge: int) -> int:
    return system.edge_logical[edge]


def logical_to_pattern(logical: int, K: int) -> tuple[int, ...]:
    return tuple((logical >> (2 * h)) & 3 for h in range(K))


def pattern_to_logical(pattern: Sequence[int]) -> int:
    v = 0
    for h, b in enumerate(pattern):
        v |= b << (2 * h)
    return v


def pattern_index(pattern: Sequence[int]) -> int:
    """Bulk basis index with hole 0 as the most significant base-4 digit."""
    idx = 0
    for b in pattern:
        idx = 4 * idx + b
    return idx


def index_pattern(index: int, K: int) -> tuple[int, ...]:
    out = []
    for _ in range(K):
        out.append(index & 3)
        index >>= 2
    return tuple(reversed(out))


def brute_force_psi(lattice: Lattice) -> np.ndarray:
    """Every configuration passing all parity constraints, by full scan."""
    if lattice.level > ENUMERATION_MAX_LEVEL:
        raise CapabilityError("brute-force scan is limited to level <= 2")
    bits = lattice.config_bits
    configs = np.arange(1 << bits, dtype=np.int64)
    keep = np.ones(configs.shape, dtype=bool)
    for row in psi_kernel(lattice).constraint_rows:
        par = np.zeros(configs.shape, dtype=np.int64)
        for j in gf2.bits_of(row):
            par ^= (configs >> j) & 1
        keep &= par == 0
    return configs[keep]
