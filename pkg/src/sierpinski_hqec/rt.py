"""Entanglement entropies of code states and the area-plus-bulk entropy identity.

Boundary entropies come from the singular values of the coefficient matrix of
a code state between the configurations restricted to ``A`` and to its
complement. Bulk-side algebraic entropies use a per-hole sector decomposition
of each hole's four-dimensional space into center sectors, each a tensor
product of an ``A`` factor and an ``Abar`` factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from . import duality
from .codespace import DENSE_BULK_MAX_LEVEL, CodeState, code_space
from .patterns import CapabilityError, PsiSystem
from .reconstruction import (
    FULL,
    KLEIN,
    SELF_COMMUTANT,
    TRIVIAL,
    TYPE1_A,
    TYPE1_ABAR,
    TYPE2_A,
    TYPE2_ABAR,
    TYPE3,
    LocalAlgebraDescriptor,
    klein_dot,
)

EIGEN_CUTOFF = 1e-14
LOG2 = math.log(2)

State = np.ndarray | CodeState | Sequence[tuple[float, np.ndarray]]


def _mixture(state: State) -> list[tuple[float, np.ndarray]]:
    """Normalize a pure bulk vector, a code state or a weighted list into a mixture."""
    if isinstance(state, CodeState):
        if state.bulk is None:
            raise ValueError("code state has no bulk vector")
        return [(1.0, np.asarray(state.bulk, dtype=complex))]
    if isinstance(state, np.ndarray):
        return [(1.0, state.astype(complex))]
    out = [(float(w), np.asarray(v, dtype=complex)) for w, v in state]
    total = sum(w for w, _ in out)
    if not math.isclose(total, 1.0, abs_tol=1e-12):
        raise ValueError(f"mixture weights must sum to 1, got {total}")
    return out


def entropy_of_spectrum(probabilities: Iterable[float]) -> float:
    p = np.asarray(list(probabilities), dtype=float)
    p = p[p > EIGEN_CUTOFF]
    return float(-(p * np.log(p)).sum())


def entropy_from_singular_values(s: np.ndarray) -> float:
    return entropy_of_spectrum(s**2)


def boundary_entropy(level: int, state: State, qudits: Iterable[int]) -> float:
    """Von Neumann entropy (nats) of the boundary reduced state on the given qudits."""
    if level > DENSE_BULK_MAX_LEVEL:
        raise CapabilityError("exact boundary entropies are limited to level <= 2")
    cs = code_space(level)
    qudits = frozenset(qudits)
    n = cs.system.lattice.qudit_count
    if not qudits or len(qudits) == n:
        return 0.0
    psi = np.array(cs.psi_list, dtype=np.int64)
    mask = cs.system.lattice.qudit_mask(qudits)
    _, rows = np.unique(psi & mask, return_inverse=True)
    _, cols = np.unique(psi & ~mask, return_inverse=True)
    rows, cols = rows.ravel(), cols.ravel()
    amp = 2.0 ** (-cs.K / 2)
    blocks = []
    for w, bulk in _mixture(state):
        M = np.zeros((rows.max() + 1, cols.max() + 1), dtype=complex)
        M[rows, cols] = amp * bulk[cs.psi_pattern_index]
        blocks.append(math.sqrt(w) * M)
    stacked = np.hstack(blocks)
    return entropy_from_singular_values(np.linalg.svd(stacked, compute_uv=False))


def _other_flip(chi: int) -> int:
    """The nonzero flip annihilated by a nonzero character."""
    return next(s for s in (1, 2, 3) if not klein_dot(chi, s))


def _other_char(sigma: int) -> int:
    """The nonzero character annihilating a nonzero flip."""
    return next(c for c in (1, 2, 3) if not klein_dot(c, sigma))


def _pair_sectors(sigma: int, inner_on_a: bool) -> list[np.ndarray]:
    """Two sectors split by the flip ``sigma`` eigenvalue; the coset index is the inner factor."""
    reps = [0, next(b for b in KLEIN if b not in (0, sigma))]
    out = []
    for sign in (1, -1):
        V = np.zeros((4, 2))
        for c, r in enumerate(reps):
            V[r, c] += 1 / math.sqrt(2)
            V[r ^ sigma, c] += sign / math.sqrt(2)
        out.append(V.reshape(4, 2, 1) if inner_on_a else V.reshape(4, 1, 2))
    return out


def _parity_sectors(chi: int, inner_on_a: bool) -> list[np.ndarray]:
    """Two sectors split by the character ``chi``; patterns of one parity span each sector."""
    out = []
    for s in (0, 1):
        betas = [b for b in KLEIN if klein_dot(chi, b) == s]
        V = np.zeros((4, 2))
        for c, b in enumerate(betas):
            V[b, c] = 1.0
        out.append(V.reshape(4, 2, 1) if inner_on_a else V.reshape(4, 1, 2))
    return out


def hole_sectors(desc: LocalAlgebraDescriptor) -> list[np.ndarray]:
    """Sector isometries of one hole: arrays of shape (4, dim_a, dim_abar)."""
    flips = sorted(desc.flips - {0})
    chars = sorted(desc.characters - {0})
    label = desc.label
    if label == FULL:
        return [np.eye(4).reshape(4, 4, 1)]
    if label == TRIVIAL:
        return [np.eye(4).reshape(4, 1, 4)]
    if label == TYPE1_A:
        return _pair_sectors(flips[0], inner_on_a=False)
    if label == TYPE1_ABAR:
        return _pair_sectors(_other_flip(chars[0]), inner_on_a=True)
    if label == TYPE2_A:
        return _parity_sectors(chars[0], inner_on_a=False)
    if label == TYPE2_ABAR:
        return _parity_sectors(_other_char(flips[0]), inner_on_a=True)
    if label == TYPE3:
        sigma, chi = flips[0], chars[0]
        partner = _other_flip(chi)
        V = np.zeros((4, 2, 2))
        for a, b in product((0, 1), repeat=2):
            V[(sigma * a) ^ (partner * b), a, b] = 1.0
        return [V]
    if label == SELF_COMMUTANT:
        # maximal abelian algebra: one-dimensional sectors on its joint eigenbasis
        if not flips:
            return [np.eye(4)[:, b].reshape(4, 1, 1) for b in KLEIN]
        if not chars:
            return [
                np.array([(-1) ** klein_dot(c, b) / 2 for b in KLEIN]).reshape(4, 1, 1)
                for c in KLEIN
            ]
        sigma, chi = flips[0], chars[0]
        reps = [0, next(b for b in KLEIN if klein_dot(chi, b))]
        out = []
        for r in reps:
            for sign in (1, -1):
                V = np.zeros((4, 1, 1))
                V[r, 0, 0] += 1 / math.sqrt(2)
                V[r ^ sigma, 0, 0] += sign / math.sqrt(2)
                out.append(V)
        return out
    raise CapabilityError(f"no sector data for split label {label!r}")


@dataclass
class BlockDecomposition:
    """Per-hole sector isometries and their product over all holes."""

    K: int
    hole_sector_maps: list[list[np.ndarray]]

    @property
    def sector_counts(self) -> list[int]:
        return [len(s) for s in self.hole_sector_maps]

    @property
    def sector_count(self) -> int:
        return math.prod(self.sector_counts)

    def sectors(self) -> Iterable[tuple[int, ...]]:
        return product(*(range(c) for c in self.sector_counts))

    def factor_dims(self, sector: Sequence[int]) -> tuple[int, int]:
        da = math.prod(self.hole_sector_maps[h][m].shape[1] for h, m in enumerate(sector))
        db = math.prod(self.hole_sector_maps[h][m].shape[2] for h, m in enumerate(sector))
        return da, db

    def sector_matrix(self, bulk: np.ndarray, sector: Sequence[int]) -> np.ndarray:
        """Component of a bulk vector in a sector as an (A factor) x (Abar factor) matrix."""
        T = bulk.reshape((4,) * self.K)
        for h, m in enumerate(sector):
            V = self.hole_sector_maps[h][m]
            # contract the leading physical axis; the new pair of axes goes to the back
            T = np.tensordot(T, V.conj(), axes=([0], [0]))
        a_axes = [2 * h for h in range(self.K)]
        b_axes = [2 * h + 1 for h in range(self.K)]
        T = T.transpose(a_axes + b_axes)
        da, db = self.factor_dims(sector)
        return T.reshape(da, db)

    def hole_unitary(self, hole: int) -> np.ndarray:
        """All sector isometries of one hole stacked into a 4x4 matrix."""
        return np.hstack([V.reshape(4, -1) for V in self.hole_sector_maps[hole]])

    def projector(self, sector: Sequence[int]) -> np.ndarray:
        """Dense bulk projector onto one global sector."""
        P = np.ones((1, 1))
        for h, m in enumerate(sector):
            V = self.hole_sector_maps[h][m].reshape(4, -1)
            P = np.kron(P, V @ V.conj().T)
        return P

    def check_hole(self, hole: int, a_side: LocalAlgebraDescriptor,
                   abar_side: LocalAlgebraDescriptor) -> bool:
        """In the sector basis every A generator acts on the A factor only and every
        Abar generator on the Abar factor only."""
        U = self.hole_unitary(hole)
        if not np.allclose(U.conj().T @ U, np.eye(4), atol=1e-12):
            return False
        maps = self.hole_sector_maps[hole]
        for desc, on_a in ((a_side, True), (abar_side, False)):
            for g in duality.local_generators(desc):
                for i, Vi in enumerate(maps):
                    for j, Vj in enumerate(maps):
                        block = np.einsum("pab,pq,qcd->abcd", Vi.conj(), g, Vj)
                        if i != j:
                            if not np.allclose(block, 0, atol=1e-12):
                                return False
                            continue
                        da, db = Vi.shape[1], Vi.shape[2]
                        if on_a:
                            inner = block[:, 0, :, 0]
                            expect = np.einsum("ac,bd->abcd", inner, np.eye(db))
                        else:
                            inner = block[0, :, 0, :]
                            expect = np.einsum("ac,bd->abcd", np.eye(da), inner)
                        if not np.allclose(block, expect, atol=1e-12):
                            return False
        return True

    def swapped(self) -> "BlockDecomposition":
        """The same decomposition with the roles of the two factors exchanged."""
        return BlockDecomposition(
            self.K, [[V.transpose(0, 2, 1) for V in maps] for maps in self.hole_sector_maps]
        )


def block_decomposition(report: duality.WedgeReport) -> BlockDecomposition:
    if report.joint_holes:
        raise CapabilityError("joint splits have no per-hole sector decomposition")
    maps = []
    for h in range(report.K):
        if h in report.w_a:
            maps.append(hole_sectors(LocalAlgebraDescriptor(h, frozenset(KLEIN), frozenset(KLEIN),
                                                            frozenset({0}), FULL)))
        elif h in report.w_abar:
            maps.append(hole_sectors(LocalAlgebraDescriptor(h, frozenset({0}), frozenset({0}),
                                                            frozenset(KLEIN), TRIVIAL)))
        else:
            maps.append(hole_sectors(report.splits[h][0]))
    return BlockDecomposition(report.K, maps)


def sector_distribution(decomp: BlockDecomposition, state: State
                        ) -> list[tuple[tuple[int, ...], float, np.ndarray]]:
    """Sector probabilities and normalized A-factor density matrices."""
    mixture = _mixture(state)
    out = []
    for sector in decomp.sectors():
        da, _ = decomp.factor_dims(sector)
        rho = np.zeros((da, da), dtype=complex)
        for w, bulk in mixture:
            M = decomp.sector_matrix(bulk, sector)
            rho += w * (M @ M.conj().T)
        p = float(np.real(np.trace(rho)))
        out.append((sector, p, rho / p if p > EIGEN_CUTOFF else rho))
    return out


def algebraic_entropy_from(decomp: BlockDecomposition, state: State) -> float:
    dist = sector_distribution(decomp, state)
    shannon = entropy_of_spectrum(p for _, p, _ in dist)
    inner = sum(
        p * entropy_of_spectrum(np.linalg.eigvalsh(rho).clip(min=0))
        for _, p, rho in dist if p > EIGEN_CUTOFF
    )
    return shannon + inner


def algebraic_entropy(report: duality.WedgeReport, state: State, side: str = "a") -> float:
    """Entropy (nats) of a bulk state on the reconstructable algebra of one side."""
    if side not in ("a", "abar"):
        raise ValueError("side must be 'a' or 'abar'")
    decomp = block_decomposition(report)
    if side == "abar":
        decomp = decomp.swapped()
    return algebraic_entropy_from(decomp, state)


@dataclass(frozen=True)
class AreaData:
    """Constant area contribution of a bipartition.

    The count is ``K - g_A - g_Abar - c`` where ``g`` is the number of independent
    assembled-gate products supported on a side and ``c`` the dimension of the
    flips reconstructable on both sides: the number of independent parities of
    the maximally correlated cut state.
    """

    n_e: int
    hole_count: int
    gates_in: int
    gates_out: int
    center_flips: int
    surface_size: int

    @property
    def area_term(self) -> float:
        return self.n_e * LOG2

    def to_json(self) -> dict:
        return {
            "n_e": self.n_e,
            "area_term_nats": self.area_term,
            "area_term_bits": float(self.n_e),
            "hole_count": self.hole_count,
            "gate_products_in": self.gates_in,
            "gate_products_out": self.gates_out,
            "center_flip_rank": self.center_flips,
            "surface_size": self.surface_size,
        }


def area_term(report: duality.WedgeReport) -> AreaData:
    an = report.analysis
    c = len(report.center_flips)
    n_e = report.K - an.tx_in_dim - an.tx_out_dim - c
    return AreaData(n_e, report.K, an.tx_in_dim, an.tx_out_dim, c, len(report.e))


@dataclass(frozen=True)
class RTResult:
    level: int
    region: tuple[int, ...]
    n_e: int
    s_a: float
    s_abar: float
    alg_a: float
    alg_abar: float

    @property
    def residual_a(self) -> float:
        return self.s_a - self.n_e * LOG2 - self.alg_a

    @property
    def residual_abar(self) -> float:
        return self.s_abar - self.n_e * LOG2 - self.alg_abar

    def passed(self, tol: float = 1e-9) -> bool:
        return abs(self.residual_a) <= tol and abs(self.residual_abar) <= tol

    def to_json(self) -> dict:
        return {
            "schema_version": duality.SCHEMA_VERSION,
            "level": self.level,
            "region": list(self.region),
            "n_e": self.n_e,
            "area_nats": self.n_e * LOG2,
            "S_A": self.s_a,
            "S_Abar": self.s_abar,
            "S_alg_A": self.alg_a,
            "S_alg_Abar": self.alg_abar,
            "S_A_bits": self.s_a / LOG2,
            "S_Abar_bits": self.s_abar / LOG2,
            "residual_A": self.residual_a,
            "residual_Abar": self.residual_abar,
        }


class RTChecker:
    """Reusable wedge data and decompositions for one bipartition."""

    def __init__(self, system: PsiSystem, qudits: Iterable[int]) -> None:
        self.system = system
        self.report = duality.compute_wedges(system, qudits)
        self.area = area_term(self.report)

    @cached_property
    def decomposition(self) -> BlockDecomposition:
        return block_decomposition(self.report)

    def verify(self, state: State) -> RTResult:
        level = self.system.lattice.level
        inside, outside = self.report.inside, self.report.outside
        return RTResult(
            level=level,
            region=tuple(sorted(inside)),
            n_e=self.area.n_e,
            s_a=boundary_entropy(level, state, inside),
            s_abar=boundary_entropy(level, state, outside),
            alg_a=algebraic_entropy_from(self.decomposition, state),
            alg_abar=algebraic_entropy_from(self.decomposition.swapped(), state),
        )


def verify_rt(system: PsiSystem, state: State, qudits: Iterable[int]) -> RTResult:
    return RTChecker(system, qudits).verify(state)


def pattern_state(K: int, index: int) -> np.ndarray:
    v = np.zeros(4**K, dtype=complex)
    v[index] = 1.0
    return v


def describe_sectors(decomp: BlockDecomposition) -> list[dict]:
    return [
        {"sector": list(s), "dim_a": decomp.factor_dims(s)[0], "dim_abar": decomp.factor_dims(s)[1]}
        for s in decomp.sectors()
    ]

