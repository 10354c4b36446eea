"""Subregion duality: entanglement wedges, splits, centers and complementary recovery."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

import numpy as np

from . import gf2
from .patterns import CapabilityError, PsiSystem, logical_to_pattern, pattern_index
from .reconstruction import (
    FULL,
    JOINT,
    KLEIN,
    SELF_COMMUTANT,
    TRIVIAL,
    DenseOracle,
    LocalAlgebraDescriptor,
    RegionAnalysis,
    klein_dot,
)

SCHEMA_VERSION = 1


@dataclass
class WedgeReport:
    inside: frozenset[int]
    outside: frozenset[int]
    w_a: tuple[int, ...]
    w_abar: tuple[int, ...]
    e: tuple[int, ...]
    splits: dict[int, tuple[LocalAlgebraDescriptor, LocalAlgebraDescriptor]]
    center_flips: list[int]
    center_characters: list[int]
    analysis: RegionAnalysis = field(repr=False)
    complementary_recovery: bool | None = None

    @property
    def geometric_complementarity(self) -> bool:
        return not self.e

    @property
    def joint_holes(self) -> tuple[int, ...]:
        return tuple(h for h in self.e if self.splits[h][0].label == JOINT)

    @property
    def K(self) -> int:
        return self.analysis.system.K

    def to_json(self) -> dict:
        lat = self.analysis.system.lattice
        return {
            "schema_version": SCHEMA_VERSION,
            "level": lat.level,
            "region": sorted(self.inside),
            "region_ring": sorted(lat.ring[q] for q in self.inside),
            "w_a": list(self.w_a),
            "w_abar": list(self.w_abar),
            "e": list(self.e),
            "splits": {
                str(h): {"a": a.to_json(), "abar": b.to_json()} for h, (a, b) in self.splits.items()
            },
            "center": describe_center(self),
            "geometric_complementarity": self.geometric_complementarity,
            "complementary_recovery": self.complementary_recovery,
        }


def compute_wedges(system: PsiSystem, qudits: Iterable[int]) -> WedgeReport:
    qudits = frozenset(qudits)
    n = system.lattice.qudit_count
    if not qudits or len(qudits) == n:
        raise ValueError("bipartition must have both sides nonempty")
    an = RegionAnalysis(system, qudits)
    w_a, w_abar, e, splits = [], [], [], {}
    for h in range(system.K):
        a = an.local(h, inside=True)
        if a.label == FULL:
            w_a.append(h)
            continue
        b = an.local(h, inside=False)
        if b.label == FULL:
            w_abar.append(h)
            continue
        e.append(h)
        splits[h] = (a, b)
    return WedgeReport(
        inside=qudits, outside=an.outside, w_a=tuple(w_a), w_abar=tuple(w_abar), e=tuple(e),
        splits=splits, center_flips=an.center_flips(), center_characters=an.center_characters(),
        analysis=an,
    )


def describe_center(report: WedgeReport) -> list[dict]:
    """Center generators: pattern-parity projectors and flips shared by both sides."""
    K = report.K
    out = []
    for chi in report.center_characters:
        per_hole = logical_to_pattern(chi, K)
        holes = [h for h in range(K) if per_hole[h]]
        entry = {"kind": "parity_projector", "holes": holes,
                 "characters": [per_hole[h] for h in holes]}
        if len(holes) == 1:
            c = per_hole[holes[0]]
            entry["patterns"] = [b for b in KLEIN if not klein_dot(c, b)]
        out.append(entry)
    for u in report.center_flips:
        per_hole = logical_to_pattern(u, K)
        holes = [h for h in range(K) if per_hole[h]]
        out.append({"kind": "flip", "holes": holes, "flips": [per_hole[h] for h in holes]})
    return out


def center_generators(system: PsiSystem, qudits: Iterable[int]) -> list[dict]:
    return describe_center(compute_wedges(system, qudits))


def verify_nontrivial_center(system: PsiSystem, qudits: Iterable[int]) -> bool:
    r = compute_wedges(system, qudits)
    return bool(r.center_characters or r.center_flips)


def algebra_basis(generators: list[np.ndarray]) -> np.ndarray:
    """Vectorized basis of the unital algebra generated by square matrices."""
    d = generators[0].shape[0]
    mats = [np.eye(d)]
    basis = [mats[0].ravel()]

    def add(m: np.ndarray) -> bool:
        if np.linalg.matrix_rank(np.array(basis + [m.ravel()]), tol=1e-9) > len(basis):
            basis.append(m.ravel())
            mats.append(m)
            return True
        return False

    for g in generators:
        add(g)
    grew = True
    while grew:
        grew = False
        for x in list(mats):
            for y in list(mats):
                grew |= add(x @ y)
    return np.array(basis)


def local_generators(desc: LocalAlgebraDescriptor) -> list[np.ndarray]:
    """4x4 matrices of the flips and parity projectors of a one-hole algebra."""
    gens = []
    for s in desc.reconstructable_flips:
        m = np.zeros((4, 4))
        for b in KLEIN:
            m[b ^ s, b] = 1
        gens.append(m)
    for c in sorted(desc.characters - {0}):
        gens.append(np.diag([1.0 if not klein_dot(c, b) else 0.0 for b in KLEIN]))
    return gens or [np.eye(4)]


def commutant_span(generators: list[np.ndarray]) -> np.ndarray:
    """Orthonormal basis (rows, vectorized) of the commutant inside 4x4 matrices."""
    d = generators[0].shape[0]
    eye = np.eye(d)
    rows = [np.kron(g, eye) - np.kron(eye, g.T) for g in generators]
    A = np.vstack(rows)
    _, s, vh = np.linalg.svd(A)
    rank = int(np.sum(s > 1e-9))
    return vh[rank:]


def span_equal(generators: list[np.ndarray], target: np.ndarray) -> bool:
    """Whether the algebra generated by ``generators`` spans exactly ``target``."""
    basis = algebra_basis(generators)
    if basis.shape[0] != target.shape[0]:
        return False
    return np.linalg.matrix_rank(np.vstack([basis, target]), tol=1e-9) == basis.shape[0]


def local_complementarity(report: WedgeReport) -> dict[int, bool]:
    """For every classified surface hole, whether the a-bar algebra is the commutant of the a algebra."""
    out = {}
    for h in report.e:
        a, b = report.splits[h]
        if a.label == JOINT:
            continue
        comm = commutant_span(local_generators(a))
        out[h] = span_equal(local_generators(b), comm)
    return out


def split_dimension(desc: LocalAlgebraDescriptor) -> int:
    return algebra_basis(local_generators(desc)).shape[0]


def structure_report(report: WedgeReport) -> dict:
    """Decomposition of the region's algebra into wedge and surface factors."""
    factors = []
    for h in report.w_a:
        factors.append({"hole": h, "algebra": FULL, "dimension": 16})
    for h in report.e:
        a, _ = report.splits[h]
        factors.append({
            "hole": h,
            "algebra": a.label,
            "flips": list(a.reconstructable_flips),
            "projector_cosets": [list(c) for c in a.projector_cosets],
            "dimension": len(a.flips) * len(a.characters),
        })
    an = report.analysis
    dim_log2 = len(an.x_in) + len(an.z_in)
    product_log2 = sum(f["dimension"].bit_length() - 1 for f in factors)
    return {
        "schema_version": SCHEMA_VERSION,
        "factors": factors,
        "algebra_dim_log2": dim_log2,
        "factor_product_log2": product_log2,
        "factorizes": dim_log2 == product_log2 and not report.joint_holes,
        "center": describe_center(report),
    }


def logical_index(v: int, K: int) -> int:
    """Bulk index of a packed logical vector."""
    return pattern_index(logical_to_pattern(v, K))


class DenseDuality:
    """Exact checks of complementary recovery by enumerating the parity space."""

    def __init__(self, level: int) -> None:
        self.oracle = DenseOracle(level)
        self.system = self.oracle.system
        self.K = self.system.K
        self.dim = self.oracle.dim
        self.n = self.system.lattice.qudit_count
        self.psi = self.oracle.psi
        self.psi_set = set(self.psi.tolist())
        self.tx = [int(t) for t in self.system.tx_vectors]
        self.group = gf2.span(self.tx)

    def _flip_set(self, qudits: frozenset[int]) -> set[int]:
        outside = self.system.lattice.qudit_mask(set(range(self.n)) - qudits)
        inside = self.psi[(self.psi & outside) == 0]
        idx = self.oracle.cs.psi_index
        return {int(self.oracle.pattern[idx[v]]) for v in inside.tolist()}

    def side_data(self, qudits: frozenset[int]) -> tuple[set[int], np.ndarray]:
        return self._flip_set(qudits), self.oracle.class_labels(qudits)

    def sweep(self, qudits: frozenset[int]) -> bool:
        """Basis sweep on a side: translations off the parity space project to zero, and
        every restriction projector matches its group-averaged counterpart."""
        lat = self.system.lattice
        mask = lat.qudit_mask(qudits)
        qs = sorted(qudits)
        # translations supported on the side
        for combo in range(4 ** len(qs)):
            v = 0
            for j, q in enumerate(qs):
                v |= ((combo >> (2 * j)) & 3) << (2 * q)
            lands = np.isin(self.psi ^ v, self.psi)
            if (v in self.psi_set) != bool(lands.all()) or (v not in self.psi_set and lands.any()):
                return False
        restr = self.psi & mask
        keys, ids = np.unique(restr, return_inverse=True)
        ids = ids.ravel()
        C = np.zeros((len(keys), self.dim), dtype=np.int64)
        np.add.at(C, (ids, self.oracle.pattern), 1)
        # group averaging: integer counts scaled by 2^K
        Q = np.zeros((len(self.psi), len(keys)), dtype=np.int64)
        rows = np.arange(len(self.psi))
        for g in self.group:
            gid = np.searchsorted(keys, (self.psi ^ g) & mask)
            np.add.at(Q, (rows, gid), 1)
        fiber_sum = np.zeros((self.dim, len(keys)), dtype=np.int64)
        np.add.at(fiber_sum, self.oracle.pattern, Q)
        if not np.array_equal(fiber_sum.T, (2**self.K) * C):
            return False
        # the averaged operator is invariant under every assembled gate
        index = self.oracle.cs.psi_index
        for t in self.tx:
            perm = np.array([index[int(c) ^ t] for c in self.psi.tolist()])
            if not np.array_equal(Q[perm], Q):
                return False
        return True

    @staticmethod
    def _invariant(labels: np.ndarray, shifts: Iterable[int]) -> bool:
        idx = np.arange(len(labels))
        for u in shifts:
            if not np.array_equal(labels[idx ^ u], labels):
                return False
        return True

    @staticmethod
    def _class_preserving(labels: np.ndarray, shifts: Iterable[int]) -> bool:
        idx = np.arange(len(labels))
        for u in shifts:
            moved = labels[idx ^ u]
            pairs = set(zip(labels.tolist(), moved.tolist()))
            if len(pairs) != len(set(labels.tolist())):
                return False
        return True

    def verify_complementary_recovery(self, qudits: Iterable[int]) -> bool:
        a = frozenset(qudits)
        b = frozenset(range(self.n)) - a
        small = a if len(a) <= len(b) else b
        if not self.sweep(small):
            return False
        ua, la = self.side_data(a)
        ub, lb = self.side_data(b)
        gens_a = gf2.EchelonBasis(ua).rows()
        gens_b = gf2.EchelonBasis(ub).rows()
        # the two algebras commute
        if not (self._invariant(lb, gens_a) and self._invariant(la, gens_b)):
            return False
        if not (self._class_preserving(la, gens_a) and self._class_preserving(lb, gens_b)):
            return False
        # commutant of the A algebra has the dimension of the A-bar algebra
        sizes_a = np.bincount(la)
        comm_dim = int((sizes_a.astype(np.int64) ** 2).sum()) // len(ua)
        dim_b = len(ub) * len(set(lb.tolist()))
        sizes_b = np.bincount(lb)
        comm_dim_b = int((sizes_b.astype(np.int64) ** 2).sum()) // len(ub)
        dim_a = len(ua) * len(set(la.tolist()))
        return comm_dim == dim_b and comm_dim_b == dim_a

    def nontrivial_center(self, qudits: Iterable[int]) -> bool:
        a = frozenset(qudits)
        b = frozenset(range(self.n)) - a
        ua, la = self.side_data(a)
        ub, lb = self.side_data(b)
        if len(ua & ub) > 1:
            return True
        # finest partition coarser than both class partitions
        parent = list(range(self.dim))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for labels in (la, lb):
            first: dict[int, int] = {}
            for n, lab in enumerate(labels.tolist()):
                if lab in first:
                    parent[find(n)] = find(first[lab])
                else:
                    first[lab] = n
        return len({find(n) for n in range(self.dim)}) > 1

    def center_commutes(self, report: WedgeReport) -> bool:
        """Engine center generators lie in both dense algebras."""
        ua, la = self.side_data(report.inside)
        ub, lb = self.side_data(report.outside)
        idx = np.arange(self.dim)
        for chi in report.center_characters:
            values = np.array([
                sum(klein_dot((chi >> (2 * h)) & 3, (n >> (2 * (self.K - 1 - h))) & 3)
                    for h in range(self.K)) & 1
                for n in idx
            ])
            for labels in (la, lb):
                for lab in np.unique(labels):
                    if len(set(values[labels == lab].tolist())) != 1:
                        return False
        for u in report.center_flips:
            if logical_index(u, self.K) not in ua or logical_index(u, self.K) not in ub:
                return False
        return True

    def algebra_dimension_log2(self, qudits: Iterable[int]) -> float:
        ua, la = self.side_data(frozenset(qudits))
        return float(np.log2(len(ua) * len(set(la.tolist()))))


@lru_cache(maxsize=None)
def dense_duality(level: int) -> DenseDuality:
    return DenseDuality(level)


def verify_complementary_recovery(level: int, qudits: Iterable[int]) -> bool:
    if level > 2:
        raise CapabilityError("the dense complementary-recovery sweep is limited to level <= 2")
    return dense_duality(level).verify_complementary_recovery(qudits)


def all_bipartitions(n: int) -> Iterable[frozenset[int]]:
    """Every nontrivial bipartition, as its side containing the region of a bit mask."""
    for m in range(1, (1 << n) - 1):
        yield frozenset(q for q in range(n) if (m >> q) & 1)
