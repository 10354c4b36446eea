import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sierpinski_hqec import gf2
from sierpinski_hqec.patterns import psi_system
from sierpinski_hqec.reconstruction import (
    FULL,
    KLEIN,
    TRIVIAL,
    TYPE2_A,
    DenseOracle,
    RegionAnalysis,
    build_QA,
    classify_split,
    klein_annihilator,
    klein_dot,
    klein_span,
    reconstructs_hole,
    solve_gate_reconstruction,
    supported_selections,
    supported_selections_by_mask,
)

regions9 = st.sets(st.integers(0, 8), min_size=1, max_size=8)


@pytest.fixture(scope="module")
def oracle():
    return DenseOracle(2)


def hole_operators(K: int, hole: int) -> dict[str, np.ndarray]:
    """Flips and parity observables of one hole as dense bulk matrices."""
    dim = 4**K
    idx = np.arange(dim)
    shift = 2 * (K - 1 - hole)
    digit = (idx >> shift) & 3
    ops = {}
    for sigma in (1, 2, 3):
        m = np.zeros((dim, dim))
        m[idx ^ (sigma << shift), idx] = 1
        ops[("flip", sigma)] = m
    for chi in (1, 2, 3):
        ops[("char", chi)] = np.diag([(-1.0) ** klein_dot(chi, int(b)) for b in digit])
    return ops


def test_klein_helpers():
    assert klein_span([1]) == {0, 1}
    assert klein_span([1, 2]) == set(KLEIN)
    assert klein_annihilator([1]) == {0, 2}
    assert klein_annihilator(KLEIN) == {0}


def test_classify_labels():
    assert classify_split(frozenset(KLEIN), frozenset(KLEIN)) == FULL
    assert classify_split(frozenset({0}), frozenset({0})) == TRIVIAL
    assert classify_split(frozenset({0}), frozenset({0, 1})) == TYPE2_A


@given(regions9)
def test_support_equations_match_support_masks(region):
    system = psi_system(2)
    a = supported_selections(system, region)
    b = supported_selections_by_mask(system, region)
    assert gf2.rank(a) == gf2.rank(b) == gf2.rank(a + b)


@given(regions9)
def test_engine_local_algebra_matches_dense_oracle(region):
    """Every single-hole flip and parity observable is reconstructable exactly when the engine says so."""
    system = psi_system(2)
    oracle = DenseOracle(2)
    an = RegionAnalysis(system, region)
    for hole in range(system.K):
        desc = an.local(hole)
        for (kind, g), op in hole_operators(system.K, hole).items():
            engine = g in (desc.flips if kind == "flip" else desc.characters)
            assert oracle.reconstructable(op, region) == engine


@given(regions9, st.integers(0, 3))
def test_full_reconstruction_agrees_with_oracle(region, hole):
    assert reconstructs_hole(psi_system(2), region, hole) == DenseOracle(2).reconstructs_hole(region, hole)


@given(regions9, st.sampled_from([0, 1, 2, 3, 4, 5, 6, 7, 8]))
def test_monotonicity(region, extra):
    system = psi_system(2)
    small = RegionAnalysis(system, region)
    big = RegionAnalysis(system, set(region) | {extra})
    for hole in range(system.K):
        if small.is_full(hole):
            assert big.is_full(hole)
        assert big.confusion(hole) <= small.confusion(hole)


@given(regions9)
def test_gate_solution_is_supported_and_correct(region):
    system = psi_system(2)
    an = RegionAnalysis(system, region)
    outside = system.lattice.qudit_mask(set(range(9)) - region)
    for target in an.x_in:
        selection = solve_gate_reconstruction(system, region, target)
        assert selection is not None
        assert system.gates_config(selection) & outside == 0
        assert system.logical_action(selection) == target


def test_unreachable_target_has_no_solution():
    system = psi_system(2)
    # a single qudit supports no gate product
    assert solve_gate_reconstruction(system, {4}, 1) is None


@given(regions9, st.integers(0, 2**30))
def test_diagonal_operator_solver_matches_group_average(region, seed):
    system = psi_system(2)
    psi = system.canonical_order
    sub = psi[seed % len(psi)]
    handle = build_QA(system, region, sub)
    for config in psi[:: 97]:
        assert handle.value(config) == pytest.approx(handle.value_by_averaging(config), abs=1e-15)


def test_central_hole_needs_more_than_one_block():
    system = psi_system(2)
    lat = system.lattice
    block = lat.block_qudits((0,))
    assert not reconstructs_hole(system, block, 0)
    assert reconstructs_hole(system, block, 1)
    assert reconstructs_hole(system, set(range(9)) - set(lat.block_qudits((2,))[:1]), 0)


def test_whole_boundary_reconstructs_everything():
    system = psi_system(3)
    an = RegionAnalysis(system, range(27))
    assert all(an.is_full(h) for h in range(system.K))


def test_center_of_single_block_arc(oracle):
    system = psi_system(2)
    an = RegionAnalysis(system, system.lattice.block_qudits((0,)))
    assert an.center_characters()
    assert oracle.reconstructs_hole(system.lattice.block_qudits((0,)), 1)
