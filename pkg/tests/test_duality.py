import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sierpinski_hqec.duality import (
    DenseDuality,
    all_bipartitions,
    compute_wedges,
    dense_duality,
    describe_center,
    local_complementarity,
    logical_index,
    structure_report,
    verify_complementary_recovery,
    verify_nontrivial_center,
)
from sierpinski_hqec.patterns import CapabilityError, psi_system
from sierpinski_hqec.reconstruction import JOINT, SELF_COMMUTANT, TYPE2_A, TYPE3

GOLDEN = Path(__file__).parent / "golden" / "wedges_level3.json"
bipartitions9 = st.sets(st.integers(0, 8), min_size=1, max_size=8)


def wedge_summary(report) -> dict:
    return {
        "w_a": list(report.w_a),
        "w_abar": list(report.w_abar),
        "e": list(report.e),
        "labels": {str(h): [a.label, b.label] for h, (a, b) in report.splits.items()},
    }


def test_all_bipartitions_enumerates_proper_subsets():
    subsets = list(all_bipartitions(3))
    assert len(subsets) == 6
    assert frozenset() not in subsets and frozenset({0, 1, 2}) not in subsets


def test_trivial_bipartition_rejected():
    with pytest.raises(ValueError):
        compute_wedges(psi_system(1), [])
    with pytest.raises(ValueError):
        compute_wedges(psi_system(1), [0, 1, 2])


@pytest.mark.parametrize("region", list(all_bipartitions(3)))
def test_level1_complementary_recovery(region):
    assert verify_complementary_recovery(1, region)


def test_dense_recovery_capability_limit():
    with pytest.raises(CapabilityError):
        verify_complementary_recovery(3, [0])


@settings(max_examples=25)
@given(bipartitions9)
def test_wedges_partition_holes(region):
    report = compute_wedges(psi_system(2), region)
    holes = set(report.w_a) | set(report.w_abar) | set(report.e)
    assert holes == set(range(4))
    assert len(report.w_a) + len(report.w_abar) + len(report.e) == 4
    assert set(report.splits) == set(report.e)
    assert report.geometric_complementarity == (not report.e)


@settings(max_examples=25)
@given(bipartitions9)
def test_wedges_swap_under_complement(region):
    system = psi_system(2)
    a = compute_wedges(system, region)
    b = compute_wedges(system, set(range(9)) - region)
    assert a.w_a == b.w_abar and a.w_abar == b.w_a and a.e == b.e
    for h in a.e:
        assert a.splits[h][0].label == b.splits[h][1].label


@settings(max_examples=15)
@given(bipartitions9)
def test_dense_complementary_recovery_and_center(region):
    dense = dense_duality(2)
    report = compute_wedges(psi_system(2), region)
    assert dense.verify_complementary_recovery(region)
    assert dense.nontrivial_center(region) == bool(report.center_flips or report.center_characters)
    assert dense.center_commutes(report)
    assert dense.algebra_dimension_log2(region) == pytest.approx(
        structure_report(report)["algebra_dim_log2"])


@settings(max_examples=25)
@given(bipartitions9)
def test_local_complementarity_and_factorization(region):
    report = compute_wedges(psi_system(2), region)
    assert all(local_complementarity(report).values())
    assert not report.joint_holes
    assert structure_report(report)["factorizes"]


def test_one_block_arc_splits_the_central_hole():
    system = psi_system(2)
    block = system.lattice.block_qudits((0,))
    report = compute_wedges(system, block)
    assert report.w_a == (1,)
    assert 0 in report.e
    assert report.splits[0][0].label == TYPE2_A
    assert verify_nontrivial_center(system, block)
    center = describe_center(report)
    assert any(c["kind"] == "parity_projector" and c["holes"] == [0] for c in center)


def test_no_surface_made_only_of_type3_splits():
    system = psi_system(2)
    for region in all_bipartitions(9):
        report = compute_wedges(system, region)
        labels = {a.label for a, _ in report.splits.values()}
        assert labels != {TYPE3}


def test_report_json_round_trip():
    report = compute_wedges(psi_system(2), [0, 1, 2])
    data = json.loads(json.dumps(report.to_json()))
    assert data["schema_version"] == 1
    assert data["region"] == [0, 1, 2]
    assert set(data) >= {"w_a", "w_abar", "e", "splits", "center"}


def test_logical_index_orders_hole_zero_first():
    assert logical_index(1, 2) == 4
    assert logical_index(1 << 2, 2) == 1


def test_level3_connected_arc_wedges_match_golden():
    golden = json.loads(GOLDEN.read_text())
    system = psi_system(3)
    for key, expected in golden.items():
        start, size = map(int, key.split(":"))
        report = compute_wedges(system, system.lattice.arc(start, size))
        assert wedge_summary(report) == expected, key
        assert JOINT not in {a.label for a, _ in report.splits.values()}


def test_level3_full_wedge_grows_with_arc():
    system = psi_system(3)
    prev: set[int] = set()
    for size in range(1, 27):
        report = compute_wedges(system, system.lattice.arc(0, size))
        assert prev <= set(report.w_a)
        prev = set(report.w_a)
    assert prev == set(range(system.K)) - set(report.e) - set(report.w_abar)


def test_connected_abelian_self_commutant_split():
    """A connected pair of regions whose central-hole algebras coincide and are maximal abelian."""
    system = psi_system(2)
    region = frozenset({0, 2, 5, 6})
    assert sorted(system.lattice.ring[q] for q in region) == [0, 1, 7, 8]
    report = compute_wedges(system, region)
    a, b = report.splits[0]
    assert a.label == b.label == SELF_COMMUTANT
    assert a.flips == b.flips and a.characters == b.characters
    assert len(a.flips) * len(a.characters) == 4
    assert dense_duality(2).verify_complementary_recovery(region)
