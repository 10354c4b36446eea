import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sierpinski_hqec.circuit import (
    ControlledS,
    FlipGate,
    PrepCircuit,
    SingleQuditGate,
    depth_ratios,
    emit_prep_circuit,
    hole_supports,
    parse_circuit,
    simulate,
    spanning_tree,
    support_profile,
    verify_prep,
)
from sierpinski_hqec.codespace import code_space, states_close
from sierpinski_hqec.patterns import CapabilityError, psi_system


def test_empty_circuit_is_identity():
    assert simulate(PrepCircuit(1, [])) == {0: 1.0}


def test_single_qudit_gate_action():
    circ = PrepCircuit(1, [[SingleQuditGate(0, 2)]])
    out = simulate(circ)
    r = 1 / math.sqrt(2)
    assert out[0] == pytest.approx(r) and out[2] == pytest.approx(r)
    back = simulate(circ, out)
    assert states_close(back, {0: 1.0})


def test_controlled_flip_fires_only_on_trigger():
    circ = PrepCircuit(1, [[ControlledS(0, 1, 1, 3)]])
    assert simulate(circ, {1: 1.0}) == {1 | (3 << 2): 1.0}
    assert simulate(circ, {2: 1.0}) == {2: 1.0}


def test_level1_two_term_state():
    circ = emit_prep_circuit(1)
    out = simulate(circ)
    assert len(out) == 2
    assert all(abs(a) == pytest.approx(1 / math.sqrt(2)) for a in out.values())
    assert circ.depth <= 3
    assert circ.gate_count <= 1 + 2 * 1 * 3


@pytest.mark.parametrize("pattern", list(itertools.product(range(4), repeat=1)))
def test_level1_every_pattern(pattern):
    assert verify_prep(1, pattern)


def test_level2_all_zero_has_sixteen_terms():
    out = simulate(emit_prep_circuit(2))
    assert len(out) == 16
    assert states_close(out, code_space(2).basis_state((0, 0, 0, 0)), 1e-12)


@given(st.tuples(*[st.integers(0, 3)] * 4))
def test_level2_random_patterns(pattern):
    assert verify_prep(2, pattern)


def test_level3_all_zero_pattern():
    assert verify_prep(3)


@pytest.mark.parametrize("level", [1, 2, 3, 4, 5])
def test_layers_legal(level):
    assert emit_prep_circuit(level).layers_legal()


@pytest.mark.parametrize("level", [2, 3, 4])
def test_hole_step_uses_at_most_five_controlled_gates(level):
    system = psi_system(level)
    for support in hole_supports(system):
        assert len(support) - 1 <= 5


def test_spanning_tree_controls_lie_in_parent_support():
    system = psi_system(3)
    supports = hole_supports(system)
    order, control = spanning_tree(system)
    assert sorted(order) == list(range(system.K))
    position = {h: i for i, h in enumerate(order)}
    for h in order:
        c = control[h]
        assert c in supports[h]
        others = [g for g in range(system.K) if g != h and c in supports[g]]
        # the control is shared only with a hole prepared later
        assert all(position[g] > position[h] for g in others)


def test_depth_ratio_bounded():
    ratios = depth_ratios(range(1, 6))
    assert max(ratios.values()) <= 3.5
    assert ratios[2] * 4 < 9 * 2


def test_support_profile_equal_weights():
    circ = emit_prep_circuit(2)
    for size, smallest in support_profile(circ):
        k = round(math.log2(size))
        assert 2**k == size
        assert smallest == pytest.approx(2 ** (-k / 2))


def test_text_round_trip():
    circ = emit_prep_circuit(2, (1, 2, 3, 0))
    again = parse_circuit(circ.to_text(), 2)
    assert again.layers == circ.layers
    assert any(isinstance(g, FlipGate) for g in circ.gates)


def test_malformed_circuit_text():
    with pytest.raises(ValueError):
        parse_circuit("SQ 1", 1)


def test_bad_pattern_rejected():
    with pytest.raises(ValueError):
        emit_prep_circuit(2, (0, 1))


def test_simulation_capability_limit():
    with pytest.raises(CapabilityError):
        simulate(emit_prep_circuit(4))


def test_json_fields():
    data = emit_prep_circuit(2).to_json()
    assert data["depth"] == len(data["layers"])
    assert data["linear_size"] == 4
