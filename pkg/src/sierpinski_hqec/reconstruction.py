"""Which logical operators can be reconstructed on a boundary region.

Logical operators split into two GF(2) families on the ``2K`` pattern bits:
flips (the action of a gate product, a Klein element per hole) and parity
projectors (characters of the pattern). A region ``A`` reconstructs

* the flips ``X_A``: logical images of gate products supported inside ``A``;
* the characters ``Z_A``: those annihilating ``X_Abar``, because a pattern
  parity is a function of the configuration on ``A`` exactly when it is
  blind to every gate product supported outside ``A``.

The per-hole local algebra is generated by the flips of ``X_A`` living on that
hole alone and the characters of ``Z_A`` living on that hole alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import gf2
from .patterns import (
    ENUMERATION_MAX_LEVEL,
    CapabilityError,
    PsiSystem,
    pattern_index,
    psi_system,
)

KLEIN = (0, 1, 2, 3)

FULL = "full"
TRIVIAL = "trivial"
TYPE1_A = "type-1 a-side"
TYPE1_ABAR = "type-1 a-bar-side"
TYPE2_A = "type-2 a-side"
TYPE2_ABAR = "type-2 a-bar-side"
TYPE3 = "type-3"
SELF_COMMUTANT = "abelian self-commutant"
JOINT = "joint split - unclassified"


def klein_dot(chi: int, sigma: int) -> int:
    """Pairing between a pattern character and a Klein flip."""
    return (chi & sigma).bit_count() & 1


def klein_span(elements: Iterable[int]) -> frozenset[int]:
    out = {0}
    for e in elements:
        out |= {x ^ e for x in out}
    return frozenset(out)


def klein_annihilator(group: Iterable[int]) -> frozenset[int]:
    group = list(group)
    return frozenset(c for c in KLEIN if all(not klein_dot(c, g) for g in group))


def _dim(group: frozenset[int]) -> int:
    return len(group).bit_length() - 1


def classify_split(flips: frozenset[int], chars: frozenset[int]) -> str:
    """Label of a one-hole algebra generated by the given flips and characters."""
    dx, dz = _dim(flips), _dim(chars)
    if (dx, dz) == (2, 2):
        return FULL
    if (dx, dz) == (0, 0):
        return TRIVIAL
    if (dx, dz) == (1, 0):
        return TYPE1_A
    if (dx, dz) == (2, 1):
        return TYPE1_ABAR
    if (dx, dz) == (0, 1):
        return TYPE2_A
    if (dx, dz) == (1, 2):
        return TYPE2_ABAR
    if (dx, dz) == (1, 1):
        sigma = max(flips)
        chi = max(chars)
        return TYPE3 if klein_dot(chi, sigma) else SELF_COMMUTANT
    return SELF_COMMUTANT


def support_system(system: PsiSystem, qudits: Iterable[int]) -> list[int]:
    """Equations over gate selections forcing zero net action outside the region.

    A degree-3 qudit outside the region must have all three incident gates
    selected or none, since only S1 S2 S3 cancels; a degree-2 qudit must have
    neither incident gate selected.
    """
    lat = system.lattice
    inside = set(qudits)
    rows = []
    for q in range(lat.qudit_count):
        if q in inside:
            continue
        inc = lat.incident_edges[q]
        if len(inc) == 3:
            rows.append((1 << inc[0]) | (1 << inc[1]))
            rows.append((1 << inc[1]) | (1 << inc[2]))
        else:
            rows.extend(1 << e for e in inc)
    return rows


def supported_selections(system: PsiSystem, qudits: Iterable[int]) -> list[int]:
    """Basis of gate selections whose product acts only inside the region."""
    return gf2.nullspace(support_system(system, qudits), len(system.lattice.edges))


def supported_selections_by_mask(system: PsiSystem, qudits: Iterable[int]) -> list[int]:
    """Same space computed from configuration supports instead of the equations."""
    outside = ((1 << system.lattice.config_bits) - 1) ^ system.lattice.qudit_mask(qudits)
    return gf2.kernel([v & outside for v in system.gate_vectors])


@dataclass(frozen=True)
class LocalAlgebraDescriptor:
    hole: int
    flips: frozenset[int]
    characters: frozenset[int]
    confusion: frozenset[int]
    label: str

    @property
    def reconstructable_flips(self) -> tuple[int, ...]:
        return tuple(sorted(self.flips - {0}))

    @property
    def projector_cosets(self) -> list[tuple[int, ...]]:
        """Pattern sets whose summed projector is reconstructable."""
        seen, out = set(), []
        for b in KLEIN:
            if b in seen:
                continue
            coset = tuple(sorted(b ^ c for c in self.confusion))
            seen |= set(coset)
            out.append(coset)
        return out

    @property
    def is_full(self) -> bool:
        return self.label == FULL

    def to_json(self) -> dict:
        return {
            "hole": self.hole,
            "label": self.label,
            "flips": sorted(self.flips),
            "characters": sorted(self.characters),
            "confusion": sorted(self.confusion),
            "projector_cosets": [list(c) for c in self.projector_cosets],
        }


class RegionAnalysis:
    """Reconstructable flips and characters for a region and its complement."""

    def __init__(self, system: PsiSystem, qudits: Iterable[int]) -> None:
        self.system = system
        n = system.lattice.qudit_count
        self.inside = frozenset(qudits)
        if any(not 0 <= q < n for q in self.inside):
            raise ValueError("qudit id out of range")
        self.outside = frozenset(range(n)) - self.inside

    @cached_property
    def sel_in(self) -> list[int]:
        return supported_selections(self.system, self.inside)

    @cached_property
    def sel_out(self) -> list[int]:
        return supported_selections(self.system, self.outside)

    def _flips(self, selections: list[int]) -> tuple[list[int], int]:
        images = [self.system.logical_action(s) for s in selections]
        kernel, image = gf2.kernel_and_image(images)
        return image, len(kernel)

    @cached_property
    def _in(self) -> tuple[list[int], int]:
        return self._flips(self.sel_in)

    @cached_property
    def _out(self) -> tuple[list[int], int]:
        return self._flips(self.sel_out)

    @property
    def x_in(self) -> list[int]:
        return self._in[0]

    @property
    def x_out(self) -> list[int]:
        return self._out[0]

    @property
    def tx_in_dim(self) -> int:
        """Dimension of assembled-gate products supported inside."""
        return self._in[1]

    @property
    def tx_out_dim(self) -> int:
        return self._out[1]

    @cached_property
    def z_in(self) -> list[int]:
        return gf2.annihilator(self.x_out, 2 * self.system.K)

    @cached_property
    def z_out(self) -> list[int]:
        return gf2.annihilator(self.x_in, 2 * self.system.K)

    @staticmethod
    def _proj(vectors: Sequence[int], hole: int) -> frozenset[int]:
        return klein_span((v >> (2 * hole)) & 3 for v in vectors)

    @staticmethod
    def _restrict(vectors: Sequence[int], hole: int) -> frozenset[int]:
        """Elements of the span living only on the given hole."""
        unit = [1 << (2 * hole), 2 << (2 * hole)]
        return klein_span(v >> (2 * hole) for v in gf2.intersect(list(vectors), unit))

    def confusion(self, hole: int, inside: bool = True) -> frozenset[int]:
        return self._proj(self.x_out if inside else self.x_in, hole)

    def local(self, hole: int, inside: bool = True) -> LocalAlgebraDescriptor:
        flips = self._restrict(self.x_in if inside else self.x_out, hole)
        conf = self.confusion(hole, inside)
        chars = klein_annihilator(conf)
        label = classify_split(flips, chars)
        if label not in (FULL, TRIVIAL) and self.is_joint(hole):
            label = JOINT
        return LocalAlgebraDescriptor(hole, flips, chars, conf, label)

    def is_full(self, hole: int, inside: bool = True) -> bool:
        conf = self.confusion(hole, inside)
        if conf != {0}:
            return False
        return len(self._restrict(self.x_in if inside else self.x_out, hole)) == 4

    def is_joint(self, hole: int) -> bool:
        """True when some reconstructable operator ties this hole to others."""
        for flips, chars in ((self.x_in, self.z_in), (self.x_out, self.z_out)):
            if self._restrict(flips, hole) != self._proj(flips, hole):
                return True
            if self._restrict(chars, hole) != self._proj(chars, hole):
                return True
        return False

    def center_flips(self) -> list[int]:
        return gf2.intersect(self.x_in, self.x_out)

    def center_characters(self) -> list[int]:
        return gf2.intersect(self.z_in, self.z_out)


def analyze(system: PsiSystem, qudits: Iterable[int]) -> RegionAnalysis:
    return RegionAnalysis(system, qudits)


def solve_gate_reconstruction(system: PsiSystem, qudits: Iterable[int], target: int) -> int | None:
    """Least gate selection supported in the region with the given logical action.

    Selections are compared with edge 0 as the most significant position.
    """
    basis = supported_selections(system, qudits)
    solver = gf2.EchelonBasis()
    for s in basis:
        solver.add(system.logical_action(s))
    combo = solver.solve(target)
    if combo is None:
        return None
    particular = 0
    for i in gf2.bits_of(combo):
        particular ^= basis[i]
    # selections with trivial logical action inside the region
    ambiguity = []
    for k in gf2.kernel([system.logical_action(s) for s in basis]):
        v = 0
        for i in gf2.bits_of(k):
            v ^= basis[i]
        ambiguity.append(v)
    return gf2.reduced_min(particular, ambiguity)


def confusion_subgroup(system: PsiSystem, qudits: Iterable[int], hole: int) -> frozenset[int]:
    return RegionAnalysis(system, qudits).confusion(hole)


def local_algebra(system: PsiSystem, qudits: Iterable[int], hole: int) -> LocalAlgebraDescriptor:
    return RegionAnalysis(system, qudits).local(hole)


def reconstructs_hole(system: PsiSystem, qudits: Iterable[int], hole: int) -> bool:
    return RegionAnalysis(system, qudits).is_full(hole)


@dataclass(frozen=True)
class QAHandle:
    """Diagonal operator counting assembled-gate images that match a sub-configuration."""

    system: PsiSystem
    region: frozenset[int]
    subconfig: int
    c_A: float
    matches_code: bool

    @cached_property
    def mask(self) -> int:
        return self.system.lattice.qudit_mask(self.region)

    @cached_property
    def _tx_restricted(self) -> gf2.EchelonBasis:
        return gf2.EchelonBasis(t & self.mask for t in self.system.tx_vectors)

    def value(self, config: int) -> float:
        """Diagonal entry via a GF(2) solve."""
        if not self.matches_code:
            return 0.0
        target = (config ^ self.subconfig) & self.mask
        return self.c_A if self._tx_restricted.contains(target) else 0.0

    def value_by_averaging(self, config: int) -> float:
        """Diagonal entry by averaging over every assembled-gate product."""
        K = self.system.K
        hits = sum(
            1 for g in gf2.span(self.system.tx_vectors)
            if ((config ^ g) & self.mask) == self.subconfig
        )
        return hits / 2**K


def build_QA(system: PsiSystem, qudits: Iterable[int], subconfig: int) -> QAHandle:
    region = frozenset(qudits)
    mask = system.lattice.qudit_mask(region)
    subconfig &= mask
    # the sub-configuration must be the restriction of some parity-space element
    restricted = gf2.EchelonBasis(v & mask for v in system.gate_vectors)
    matches = restricted.contains(subconfig)
    tx_vanishing = len(gf2.kernel([t & mask for t in system.tx_vectors]))
    c_A = 2.0 ** (tx_vanishing - system.K) if matches else 0.0
    return QAHandle(system, region, subconfig, c_A, matches)


class DenseOracle:
    """Exact reconstruction test by explicit enumeration of the parity space."""

    def __init__(self, level: int) -> None:
        if level > ENUMERATION_MAX_LEVEL:
            raise CapabilityError("the dense oracle is limited to level <= 2")
        from .codespace import code_space

        self.cs = code_space(level)
        self.system = self.cs.system
        self.K = self.system.K
        self.dim = 4**self.K
        self.psi = np.array(self.cs.psi_list, dtype=np.int64)
        self.pattern = self.cs.psi_pattern_index
        self.lattice = self.system.lattice

    def _mask(self, qudits: Iterable[int]) -> int:
        return self.lattice.qudit_mask(qudits)

    def count_matrix(self, qudits: Iterable[int]) -> np.ndarray:
        """Rows: sub-configurations on the region; columns: patterns; entries: fiber counts."""
        restr = self.psi & self._mask(qudits)
        _, ids = np.unique(restr, return_inverse=True)
        C = np.zeros((ids.max() + 1, self.dim), dtype=np.int64)
        np.add.at(C, (ids, self.pattern), 1)
        return C

    def flip_permutations(self, qudits: Iterable[int]) -> list[np.ndarray]:
        """Logical permutations induced by parity-space elements inside the region."""
        outside = self._mask(set(range(self.lattice.qudit_count)) - set(qudits))
        inside = self.psi[(self.psi & outside) == 0]
        index = self.cs.psi_index
        shifts = {int(self.pattern[index[v]]) for v in inside.tolist()}
        # a translation shifts the bulk index by XOR since digits occupy bit pairs
        gens = gf2.EchelonBasis(shifts).rows()
        return [np.arange(self.dim) ^ g for g in gens]

    def class_labels(self, qudits: Iterable[int]) -> np.ndarray:
        C = self.count_matrix(qudits)
        _, labels = np.unique(C.T, axis=0, return_inverse=True)
        return labels.ravel()

    def reconstructable(self, op: np.ndarray, qudits: Iterable[int]) -> bool:
        """Whether a logical operator commutes with the code projection of every
        operator on the complement, so that it is reconstructable on the region."""
        comp = set(range(self.lattice.qudit_count)) - set(qudits)
        for perm in self.flip_permutations(comp):
            if not np.allclose(op[np.ix_(perm, perm)], op, atol=1e-12):
                return False
        labels = self.class_labels(comp)
        off = labels[:, None] != labels[None, :]
        return bool(np.all(np.abs(op[off]) <= 1e-12))

    def hole_generators(self, hole: int) -> list[np.ndarray]:
        """Flips and single-pattern projectors acting on one hole."""
        idx = np.arange(self.dim)
        shift = 2 * (self.K - 1 - hole)
        digit = (idx >> shift) & 3
        ops = []
        for sigma in (1, 2):
            op = np.zeros((self.dim, self.dim))
            op[idx ^ (sigma << shift), idx] = 1.0
            ops.append(op)
        for b in KLEIN:
            ops.append(np.diag((digit == b).astype(float)))
        return ops

    def reconstructs_hole(self, qudits: Iterable[int], hole: int) -> bool:
        qudits = set(qudits)
        return all(self.reconstructable(op, qudits) for op in self.hole_generators(hole))


def exact_reconstructable(level: int, op: np.ndarray, qudits: Iterable[int]) -> bool:
    return DenseOracle(level).reconstructable(op, qudits)
