"""Layered preparation circuits for code basis states.

The all-zero pattern state is the product over holes of ``(1 + T(x))/sqrt(2)``
applied to the all-zero configuration. Each factor is realized by putting one
still-untouched qudit of the hole's gate support into ``(|0> + |alpha>)/sqrt(2)``
and then applying controlled flips, triggered by ``alpha`` on that qudit, to the
rest of the support. Every non-corner qudit lies in exactly two hole supports, so
processing a spanning tree of the hole adjacency graph children first, with
each hole controlled from the qudit it shares with its parent, keeps every
control untouched until its own hole is prepared. A final layer of
single-qudit flips moves the state to the fiber of the requested pattern.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .codespace import CodeSpace, code_space, states_close
from .patterns import CapabilityError, PsiSystem, psi_system

SIMULATION_MAX_LEVEL = 3
ATOL = 1e-12


@dataclass(frozen=True)
class SingleQuditGate:
    """``|0> -> (|0>+|alpha>)/sqrt2``, ``|alpha> -> (|0>-|alpha>)/sqrt2``, other states fixed."""

    qudit: int
    alpha: int

    @property
    def qudits(self) -> tuple[int, ...]:
        return (self.qudit,)

    def text(self) -> str:
        return f"SQ {self.qudit} {self.alpha}"


@dataclass(frozen=True)
class ControlledS:
    """Flip ``S^sigma`` on the target when the control is in state ``trigger``."""

    control: int
    trigger: int
    target: int
    sigma: int

    @property
    def qudits(self) -> tuple[int, ...]:
        return (self.control, self.target)

    def text(self) -> str:
        return f"CS {self.control} {self.trigger} {self.target} {self.sigma}"


@dataclass(frozen=True)
class FlipGate:
    """Unconditional ``S^sigma`` on one qudit."""

    qudit: int
    sigma: int

    @property
    def qudits(self) -> tuple[int, ...]:
        return (self.qudit,)

    def text(self) -> str:
        return f"S {self.qudit} {self.sigma}"


Gate = SingleQuditGate | ControlledS | FlipGate


@dataclass
class PrepCircuit:
    level: int
    layers: list[list[Gate]] = field(default_factory=list)
    pattern: tuple[int, ...] = ()

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def gates(self) -> list[Gate]:
        return [g for layer in self.layers for g in layer]

    @property
    def gate_count(self) -> int:
        return sum(len(layer) for layer in self.layers)

    def layers_legal(self) -> bool:
        for layer in self.layers:
            used = [q for g in layer for q in g.qudits]
            if len(used) != len(set(used)):
                return False
        return True

    def to_text(self) -> str:
        return "\n---\n".join("\n".join(g.text() for g in layer) for layer in self.layers) + "\n"

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "pattern": list(self.pattern),
            "depth": self.depth,
            "gate_count": self.gate_count,
            "linear_size": 2**self.level,
            "depth_per_linear_size": self.depth / 2**self.level,
            "layers": [[g.text() for g in layer] for layer in self.layers],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def parse_circuit(text: str, level: int) -> PrepCircuit:
    layers: list[list[Gate]] = []
    for block in text.strip().split("---"):
        layer: list[Gate] = []
        for line in block.strip().splitlines():
            parts = line.split()
            if not parts:
                continue
            kind, args = parts[0], [int(a) for a in parts[1:]]
            if kind == "SQ" and len(args) == 2:
                layer.append(SingleQuditGate(*args))
            elif kind == "CS" and len(args) == 4:
                layer.append(ControlledS(*args))
            elif kind == "S" and len(args) == 2:
                layer.append(FlipGate(*args))
            else:
                raise ValueError(f"malformed gate line: {line!r}")
        if layer:
            layers.append(layer)
    return PrepCircuit(level, layers)


def hole_supports(system: PsiSystem) -> list[dict[int, int]]:
    """Qudit -> flip of every assembled hole gate."""
    n = system.lattice.qudit_count
    out = []
    for t in system.tx_vectors:
        out.append({q: (t >> (2 * q)) & 3 for q in range(n) if (t >> (2 * q)) & 3})
    return out


def spanning_tree(system: PsiSystem) -> tuple[list[int], dict[int, int]]:
    """Breadth-first tree of the hole graph rooted at the hole holding the top corner.

    Returns the holes in processing order (children before parents) and the
    control qudit of every hole.
    """
    supports = hole_supports(system)
    owners: dict[int, list[int]] = {}
    for h, sup in enumerate(supports):
        for q in sup:
            owners.setdefault(q, []).append(h)
    corner = system.lattice.corner_qudits[0]
    (root,) = owners[corner]
    control = {root: corner}
    parent = {root: -1}
    order = [root]
    queue = deque([root])
    while queue:
        h = queue.popleft()
        for q in sorted(supports[h]):
            for other in owners[q]:
                if other not in parent:
                    parent[other] = h
                    control[other] = q
                    order.append(other)
                    queue.append(other)
    if len(order) != system.K:
        raise RuntimeError("hole graph is not connected")
    # reverse breadth-first order puts every child before its parent
    return order[::-1], control


def _schedule(gates: Sequence[Gate]) -> list[list[Gate]]:
    """As-soon-as-possible layering that keeps the program order on every qudit."""
    ready: dict[int, int] = {}
    layers: list[list[Gate]] = []
    for g in gates:
        slot = max((ready.get(q, 0) for q in g.qudits), default=0)
        while len(layers) <= slot:
            layers.append([])
        layers[slot].append(g)
        for q in g.qudits:
            ready[q] = slot + 1
    return layers


def emit_prep_circuit(level: int, pattern: Sequence[int] | None = None) -> PrepCircuit:
    system = psi_system(level)
    K = system.K
    pattern = tuple(pattern) if pattern is not None else (0,) * K
    if len(pattern) != K or any(not 0 <= b <= 3 for b in pattern):
        raise ValueError(f"pattern must have {K} entries in 0..3")
    supports = hole_supports(system)
    order, control = spanning_tree(system)
    program: list[Gate] = []
    for h in order:
        c = control[h]
        alpha = supports[h][c]
        program.append(SingleQuditGate(c, alpha))
        for q in sorted(supports[h]):
            if q != c:
                program.append(ControlledS(c, alpha, q, supports[h][q]))
    layers = _schedule(program)
    rep = code_space(level).representative(pattern)
    flips = [FlipGate(q, (rep >> (2 * q)) & 3) for q in range(system.lattice.qudit_count)
             if (rep >> (2 * q)) & 3]
    if flips:
        layers.append(flips)
    return PrepCircuit(level, layers, pattern)


def simulate(circuit: PrepCircuit, initial: Mapping[int, complex] | None = None) -> dict[int, complex]:
    """Apply the circuit to a sparse configuration state (default all-zero)."""
    if circuit.level > SIMULATION_MAX_LEVEL:
        raise CapabilityError(f"circuit simulation is limited to level <= {SIMULATION_MAX_LEVEL}")
    state: dict[int, complex] = dict(initial) if initial is not None else {0: 1.0 + 0j}
    r = 1 / math.sqrt(2)
    for layer in circuit.layers:
        for g in layer:
            nxt: dict[int, complex] = {}
            for c, a in state.items():
                if isinstance(g, SingleQuditGate):
                    shift = 2 * g.qudit
                    v = (c >> shift) & 3
                    base = c & ~(3 << shift)
                    if v == 0:
                        terms = ((base, r * a), (base | (g.alpha << shift), r * a))
                    elif v == g.alpha:
                        terms = ((base, r * a), (c, -r * a))
                    else:
                        terms = ((c, a),)
                elif isinstance(g, ControlledS):
                    hit = ((c >> (2 * g.control)) & 3) == g.trigger
                    terms = ((c ^ (g.sigma << (2 * g.target)) if hit else c, a),)
                else:
                    terms = ((c ^ (g.sigma << (2 * g.qudit)), a),)
                for k, amp in terms:
                    nxt[k] = nxt.get(k, 0) + amp
            state = {k: v for k, v in nxt.items() if abs(v) > ATOL}
    return state


def verify_prep(level: int, pattern: Sequence[int] | None = None) -> bool:
    """Whether the simulated circuit output equals the code basis state of the pattern."""
    circuit = emit_prep_circuit(level, pattern)
    cs: CodeSpace = code_space(level)
    target = cs.basis_state(circuit.pattern)
    return states_close(simulate(circuit), target, ATOL)


def support_profile(circuit: PrepCircuit) -> list[tuple[int, float]]:
    """Support size and smallest amplitude magnitude after every layer."""
    if circuit.level > SIMULATION_MAX_LEVEL:
        raise CapabilityError(f"circuit simulation is limited to level <= {SIMULATION_MAX_LEVEL}")
    out = []
    state: dict[int, complex] = {0: 1.0 + 0j}
    for i in range(circuit.depth):
        state = simulate(PrepCircuit(circuit.level, [circuit.layers[i]]), state)
        out.append((len(state), min(abs(a) for a in state.values())))
    return out


def depth_ratios(levels: Iterable[int]) -> dict[int, float]:
    return {lv: emit_prep_circuit(lv).depth / 2**lv for lv in levels}
