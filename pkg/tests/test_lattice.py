import math
from collections import Counter
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sierpinski_hqec.lattice import (
    HAUSDORFF_DIM,
    BoundaryRegion,
    EdgeKind,
    build_lattice,
    ring_paths,
)
from sierpinski_hqec.patterns import get_lattice

LEVELS = [1, 2, 3, 4]


@pytest.mark.parametrize("level", LEVELS)
def test_counts(level):
    lat = get_lattice(level)
    assert lat.qudit_count == 3**level
    assert lat.hole_count == (3**level - 1) // 2
    assert lat.linear_size == 2**level
    assert len(lat.holes) == lat.hole_count
    assert math.isclose(math.log(lat.qudit_count), lat.hausdorff_dim * math.log(lat.linear_size),
                        abs_tol=1e-12)


def test_hausdorff_dimension_value():
    assert math.isclose(HAUSDORFF_DIM, math.log(3) / math.log(2))
    assert round(HAUSDORFF_DIM, 3) == 1.585


@pytest.mark.parametrize("level", LEVELS)
def test_edges_and_degrees(level):
    lat = get_lattice(level)
    assert len(lat.edges) == (3 * lat.qudit_count - 3) // 2 == 3 * lat.hole_count
    degrees = Counter(lat.degrees)
    assert degrees == Counter({2: 3, 3: lat.qudit_count - 3})
    assert sorted(lat.degrees[q] for q in lat.corner_qudits) == [2, 2, 2]


@pytest.mark.parametrize("level", LEVELS)
def test_every_edge_has_one_owner_corner(level):
    lat = get_lattice(level)
    owned = Counter()
    for h in lat.holes:
        for k, e in enumerate(h.corner_gates, start=1):
            assert lat.edges[e].owner_hole == h.id
            assert lat.edges[e].corner_index == k
            owned[e] += 1
    assert all(owned[e.id] == 1 for e in lat.edges)


@pytest.mark.parametrize("level", LEVELS)
def test_edge_kind_matches_smallest_block(level):
    lat = get_lattice(level)
    for e in lat.edges:
        pi, pj = (lat.paths[q] for q in e.endpoints)
        same = pi[:-1] == pj[:-1]
        assert (e.kind is EdgeKind.SAME_BLOCK) == same
        if same:
            assert sorted(e.sigmas) == [2, 3]
        else:
            assert e.sigmas == (1, 1)


@pytest.mark.parametrize("level", LEVELS)
def test_sides_covered_exactly_once(level):
    lat = get_lattice(level)
    sides = [s for h in lat.holes for s in h.loop_sides]
    sides += [s for lat_side in lat.lattice_laterals for s in lat_side]
    keys = [(s.qudit, s.tau) for s in sides]
    assert len(keys) == len(set(keys)) == 3 * lat.qudit_count


@pytest.mark.parametrize("level", LEVELS)
def test_loop_length(level):
    lat = get_lattice(level)
    for h in lat.holes:
        assert len(h.loop_sides) == 3 * 2 ** (h.scale - 1)
        assert all(len(lat_side) == 2 ** (h.scale - 1) for lat_side in h.laterals)


@pytest.mark.parametrize("level", LEVELS)
def test_ring_is_bijection(level):
    lat = get_lattice(level)
    assert sorted(lat.ring) == list(range(lat.qudit_count))
    assert all(lat.ring_order[lat.ring[q]] == q for q in range(lat.qudit_count))


@pytest.mark.parametrize("level", LEVELS)
def test_blocks_are_contiguous_arcs(level):
    lat = get_lattice(level)
    for length in range(level + 1):
        for prefix in product(range(3), repeat=length):
            positions = sorted(lat.ring[q] for q in lat.block_qudits(prefix))
            assert positions == list(range(positions[0], positions[0] + len(positions)))


def test_ring_starts_with_top_block_in_clockwise_order():
    paths = ring_paths(2)
    assert [p[0] for p in paths] == [0, 0, 0, 1, 1, 1, 2, 2, 2]
    assert paths[:3] == [(0, 0), (0, 1), (0, 2)]


def test_raster_ids_run_top_to_bottom():
    lat = get_lattice(2)
    rows = [lat.coordinates(q)[1] for q in range(lat.qudit_count)]
    assert rows == sorted(rows)
    assert lat.paths[0] == (0, 0)


def test_level_validation():
    with pytest.raises(ValueError):
        build_lattice(0)
    with pytest.raises(ValueError):
        build_lattice(9)


@given(st.integers(min_value=1, max_value=(1 << 9) - 1))
def test_region_complement_round_trip(mask):
    region = BoundaryRegion(mask, 9)
    comp = region.complement()
    assert comp.complement() == region
    assert len(region) + len(comp) == 9
    assert set(region.positions()).isdisjoint(comp.positions())


@given(st.integers(min_value=0, max_value=8), st.integers(min_value=1, max_value=8))
def test_arcs_are_connected_with_wrap(start, length):
    region = BoundaryRegion.from_positions(((start + i) % 9 for i in range(length)), 9)
    assert region.is_connected()
    assert region.complement().is_connected()


def test_disconnected_region():
    assert not BoundaryRegion.from_positions([0, 2], 9).is_connected()


@pytest.mark.parametrize("level", [1, 2, 3])
def test_connected_arcs_enumeration(level):
    lat = get_lattice(level)
    n = lat.qudit_count
    arcs = list(lat.connected_arcs(2))
    assert len(arcs) == n
    assert all(a.is_connected() and len(a) == 2 for a in arcs)


def test_json_export_shape():
    data = get_lattice(2).to_json()
    assert data["qudit_count"] == 9 and len(data["edges"]) == 12 and len(data["holes"]) == 4
    assert sorted(data["boundary_order"]) == list(range(9))
