"""Encoding isometry, code basis states and the code-space projector.

The code basis state of a pattern is the equal-weight superposition of the
``2^K`` configurations in its fiber, i.e. a coset of the group generated by the
assembled hole gates. Boundary states are sparse maps from configurations to
amplitudes; bulk states are dense vectors of length ``4^K`` indexed with hole 0
as the most significant base-4 digit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Mapping, Sequence

import numpy as np

from . import gf2
from .patterns import (
    ENUMERATION_MAX_LEVEL,
    CapabilityError,
    PsiSystem,
    alpha_string,
    index_pattern,
    pattern_index,
    psi_system,
)

DENSE_BULK_MAX_LEVEL = 2
ATOL = 1e-12


@dataclass
class CodeState:
    """Boundary amplitudes over configurations and, when available, the bulk vector."""

    boundary: dict[int, complex]
    bulk: np.ndarray | None = None
    level: int = 0

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.boundary.values()))

    def records(self) -> list[tuple[str, float, float]]:
        n = 3**self.level
        return [
            (alpha_string(c, n), float(a.real), float(a.imag))
            for c, a in sorted(self.boundary.items())
            if a != 0
        ]

    def to_json(self) -> str:
        return json.dumps({"level": self.level, "amplitudes": self.records()})

    def to_csv(self) -> str:
        lines = ["alpha,re,im"] + [f"{s},{re!r},{im!r}" for s, re, im in self.records()]
        return "\n".join(lines) + "\n"


def states_close(a: Mapping[int, complex], b: Mapping[int, complex], atol: float = ATOL) -> bool:
    keys = set(a) | set(b)
    return all(abs(a.get(k, 0) - b.get(k, 0)) <= atol for k in keys)


@dataclass(frozen=True)
class CodeSpace:
    system: PsiSystem

    @property
    def level(self) -> int:
        return self.system.lattice.level

    @property
    def K(self) -> int:
        return self.system.K

    @property
    def bulk_dim(self) -> int:
        return 4**self.K

    @cached_property
    def tx_group(self) -> tuple[int, ...]:
        """All products of assembled hole gates as configuration translations."""
        return tuple(gf2.span(self.system.tx_vectors))

    def representative(self, pattern: Sequence[int]) -> int:
        """Configuration of the pattern's fiber reached by corner gates from zero."""
        c = 0
        for h, b in enumerate(pattern):
            if b:
                edge = self.system.lattice.holes[h].corner_gates[b - 1]
                c ^= self.system.gate_vectors[edge]
        return c

    def fiber(self, pattern: Sequence[int]) -> list[int]:
        rep = self.representative(pattern)
        return sorted(rep ^ g for g in self.tx_group)

    def basis_state(self, pattern: Sequence[int]) -> dict[int, complex]:
        amp = 2.0 ** (-self.K / 2)
        return {c: complex(amp) for c in self.fiber(pattern)}

    def _require_dense(self) -> None:
        if self.level > DENSE_BULK_MAX_LEVEL:
            raise CapabilityError("dense bulk vectors are limited to level <= 2")

    @cached_property
    def psi_list(self) -> tuple[int, ...]:
        return self.system.canonical_order

    @cached_property
    def psi_index(self) -> dict[int, int]:
        return {c: i for i, c in enumerate(self.psi_list)}

    @cached_property
    def psi_pattern_index(self) -> np.ndarray:
        """Bulk index of the pattern of every configuration in canonical order."""
        return np.array([pattern_index(self.system.pattern(c)) for c in self.psi_list])

    def encode(self, bulk: np.ndarray) -> CodeState:
        self._require_dense()
        bulk = np.asarray(bulk, dtype=complex)
        if bulk.shape != (self.bulk_dim,):
            raise ValueError(f"bulk vector must have shape ({self.bulk_dim},), got {bulk.shape}")
        amp = 2.0 ** (-self.K / 2)
        out: dict[int, complex] = {}
        for n in np.flatnonzero(bulk):
            for c in self.fiber(index_pattern(int(n), self.K)):
                out[c] = amp * bulk[n]
        return CodeState(out, bulk.copy(), self.level)

    def decode(self, state: CodeState | Mapping[int, complex]) -> np.ndarray:
        """Apply the adjoint of the encoding map."""
        self._require_dense()
        boundary = state.boundary if isinstance(state, CodeState) else state
        amp = 2.0 ** (-self.K / 2)
        out = np.zeros(self.bulk_dim, dtype=complex)
        for c, a in boundary.items():
            if self.system.is_psi(c):
                out[pattern_index(self.system.pattern(c))] += amp * a
        return out

    def apply_pcode(self, boundary: Mapping[int, complex]) -> dict[int, complex]:
        """Code projector applied literally: filter to the parity space, then each (1+T(x))/2."""
        state = {c: a for c, a in boundary.items() if self.system.is_psi(c)}
        for t in self.system.tx_vectors:
            nxt: dict[int, complex] = {}
            for c, a in state.items():
                nxt[c] = nxt.get(c, 0) + a / 2
                nxt[c ^ t] = nxt.get(c ^ t, 0) + a / 2
            state = {c: a for c, a in nxt.items() if a != 0}
        return state

    @cached_property
    def fiber_matrix(self) -> np.ndarray:
        """0/1 matrix with a row per pattern marking its fiber in canonical order."""
        self._require_dense()
        F = np.zeros((self.bulk_dim, len(self.psi_list)), dtype=np.int64)
        F[self.psi_pattern_index, np.arange(len(self.psi_list))] = 1
        return F

    def scaled_pcode_matrix(self) -> np.ndarray:
        """``2^K P_code`` on the parity space as the literal product of (1 + T(x))."""
        self._require_dense()
        size = len(self.psi_list)
        M = np.eye(size)
        for t in self.system.tx_vectors:
            perm = np.array([self.psi_index[c ^ t] for c in self.psi_list])
            M = M + M[perm]
        return M

    def verify_isometry(self) -> dict:
        """Exact Gram, idempotence and projector-equality checks in integer arithmetic."""
        # integer-valued doubles keep BLAS speed and stay exact at this size
        F = self.fiber_matrix.astype(float)
        scale = 2**self.K
        gram = F @ F.T
        gram_ok = bool(np.array_equal(gram, scale * np.eye(self.bulk_dim)))
        M = self.scaled_pcode_matrix()
        idem_ok = bool(np.array_equal(M @ M, scale * M))
        rr_ok = bool(np.array_equal(M, F.T @ F))
        support_ok = bool(np.all(F.sum(axis=1) == scale))
        return {
            "level": self.level,
            "bulk_dim": self.bulk_dim,
            "gram_identity": gram_ok,
            "pcode_idempotent": idem_ok,
            "pcode_equals_RRdag": rr_ok,
            "equal_support": support_ok,
            "passed": gram_ok and idem_ok and rr_ok and support_ok,
        }


@lru_cache(maxsize=None)
def code_space(level: int) -> CodeSpace:
    return CodeSpace(psi_system(level))


def encode(level: int, bulk: np.ndarray) -> CodeState:
    return code_space(level).encode(bulk)


def decode(level: int, state: CodeState) -> np.ndarray:
    return code_space(level).decode(state)


def apply_pcode(level: int, boundary: Mapping[int, complex]) -> dict[int, complex]:
    return code_space(level).apply_pcode(boundary)


def verify_isometry(level: int) -> dict:
    if level > ENUMERATION_MAX_LEVEL:
        raise CapabilityError("the dense Gram check is limited to level <= 2")
    return code_space(level).verify_isometry()


def random_bulk(K: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=4**K) + 1j * rng.normal(size=4**K)
    return v / np.linalg.norm(v)
