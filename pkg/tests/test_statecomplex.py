"""Complex construction, canonical cube identity, stars, links."""

import pytest

import cubeplan.lattice as lat
from cubeplan.errors import BuildTruncatedError, CubeplanError
from cubeplan.model import System, Workspace, apply_action
from cubeplan.statecomplex import (
    boundary,
    build_complex,
    check_link_condition,
    cube_key,
    link,
    star,
    state_key,
)
from cubeplan.systems import (
    HEX_TRAP_MOVERS,
    HEX_TRAP_STATE,
    agv_grid_fixture,
    complete_graph,
    graph_agv_system,
    hex_connectivity_trap,
    path_graph,
    token_generator,
)
from cubeplan.topology import f_vector


def build_fixture(sf, cap=1_000_000):
    return build_complex(sf.system, sf.seeds, max_vertices=cap)


def test_single_token_on_a_path_gives_the_path():
    sf = graph_agv_system(path_graph(3), 1)
    cx = build_fixture(sf)
    assert f_vector(cx) == (3, 2)
    states = {cx.vertex_state(v) for v in range(cx.n_vertices)}
    assert states == {frozenset((0,)), frozenset((1,)), frozenset((2,))}


def test_zero_tokens_is_a_single_vertex():
    sf = graph_agv_system(path_graph(4), 0)
    cx = build_fixture(sf)
    assert f_vector(cx) == (1,)


def test_grid_fixture_counts():
    """Two independent tokens span an exact m-by-n grid of squares."""
    for m, n in ((2, 2), (3, 4)):
        cx = build_fixture(agv_grid_fixture(m, n))
        assert f_vector(cx) == (
            (m + 1) * (n + 1),
            m * (n + 1) + n * (m + 1),
            m * n,
        )


def test_k5_complex_counts():
    cx = build_fixture(graph_agv_system(complete_graph(5), 2))
    assert f_vector(cx) == (10, 30, 15)


def test_cube_key_is_corner_independent():
    cx = build_fixture(agv_grid_fixture(2, 2))
    for rec in cx.cells(2):
        base = rec.base
        a0, a1 = rec.actions
        far = apply_action(apply_action(base, a0), a1)
        key_from_far = cube_key((a0.reverse(), a1.reverse()), far)
        assert key_from_far == rec.key


def test_records_are_structurally_consistent():
    cx = build_fixture(agv_grid_fixture(3, 4))
    for k in range(1, cx.max_dim + 1):
        for rec in cx.cells(k):
            assert len(rec.corners) == 1 << k
            assert len(rec.facets) == 2 * k
            assert rec.corners[0] == cx.vertex_vid(rec.base)
            # every facet is stored, with the right dimension
            for fk in rec.facets:
                assert cx.has_cell(k - 1, fk)
            # corner bitmask order: bit i applies action i
            for i, act in enumerate(rec.actions):
                expect = cx.vertex_vid(apply_action(rec.base, act))
                assert rec.corners[1 << i] == expect


def test_base_corner_is_least_state_key():
    cx = build_fixture(agv_grid_fixture(2, 3))
    for rec in cx.cells(2):
        corner_states = [
            cx.vertex_state(v) for v in rec.corners
        ]
        assert state_key(rec.base) == min(state_key(s) for s in corner_states)


def test_square_boundary_is_a_closed_cycle():
    cx = build_fixture(agv_grid_fixture(2, 2))
    for key in cx.cell_keys(2):
        cycle = cx.square_boundary(key)
        assert len(cycle) == 4
        # walk the directed edges; each step must start where the last ended
        walk = []
        for ekey, sign in cycle:
            v0, v1 = cx.edge_endpoints(ekey)
            walk.append((v0, v1) if sign > 0 else (v1, v0))
        for (_, head), (tail, _) in zip(walk, walk[1:] + walk[:1]):
            assert head == tail


def test_edges_connect_adjacent_states():
    cx = build_fixture(agv_grid_fixture(2, 2))
    for rec in cx.cells(1):
        (act,) = rec.actions
        assert cx.vertex_state(rec.corners[1]) == apply_action(rec.base, act)


def test_star_of_vertex_and_edge():
    cx = build_fixture(agv_grid_fixture(2, 2))
    center = frozenset(("p0.1", "p1.1"))
    vrec = cx.record(0, ((), state_key(center)))
    st_ = star(cx, vrec)
    dims = sorted(r.dim for r in st_)
    assert dims == [0, 1, 1, 1, 1, 2, 2, 2, 2]
    # an interior edge lies in exactly two squares
    erec = next(
        r for r in cx.cells(1) if cx.vertex_vid(center) in r.corners
    )
    st2 = star(cx, erec)
    assert sorted(r.dim for r in st2) == [1, 2, 2]
    with pytest.raises(CubeplanError):
        star(cx, vrec.__class__(0, ((), ("zz",)), frozenset(), (), (0,), ()))


def test_boundary_lists_facet_records():
    cx = build_fixture(agv_grid_fixture(2, 2))
    sq = cx.cells(2)[0]
    facets = boundary(cx, sq)
    assert len(facets) == 4
    assert all(f.dim == 1 for f in facets)
    assert boundary(cx, cx.cells(0)[0]) == []


def test_link_of_interior_vertex_is_a_cycle():
    cx = build_fixture(agv_grid_fixture(2, 2))
    lnk = link(cx, frozenset(("p0.1", "p1.1")))
    assert len(lnk.vertices) == 4
    assert len(lnk.skeleton_edges()) == 4
    assert all(count == 1 for count in lnk.simplices.values())
    corner = link(cx, frozenset(("p0.0", "p1.0")))
    assert len(corner.vertices) == 2
    assert len(corner.skeleton_edges()) == 1


def test_link_condition_passes_on_local_fixtures():
    for sf in (
        agv_grid_fixture(2, 3),
        graph_agv_system(complete_graph(5), 2),
        hex_connectivity_trap(constrained=False),
    ):
        report = check_link_condition(build_fixture(sf))
        assert report.ok, report.violations[:1]


def test_connectivity_trap_violates_link_condition():
    cx = build_fixture(hex_connectivity_trap(constrained=True))
    report = check_link_condition(cx)
    assert not report.ok
    hits = [
        (state, acts, count)
        for state, acts, count in report.violations
        if state == HEX_TRAP_STATE
    ]
    assert hits, "expected a violation at the frozen trap state"
    state, acts, count = hits[0]
    assert count == 0
    assert len(acts) == 3
    vacated = frozenset()
    for a in acts:
        vacated |= a.src_occ - a.dst_occ
    assert vacated == HEX_TRAP_MOVERS


def test_non_local_cubes_require_all_corners():
    """Stored cubes of a constrained system never have a bad corner."""
    cx = build_fixture(hex_connectivity_trap(constrained=True))
    system = cx.system
    for k in range(1, cx.max_dim + 1):
        for rec in cx.cells(k):
            for vid in rec.corners:
                assert system.constraint_holds(cx.vertex_state(vid))


def test_trap_frozen_f_vectors():
    constrained = build_fixture(hex_connectivity_trap(constrained=True))
    free = build_fixture(hex_connectivity_trap(constrained=False))
    assert f_vector(constrained) == (48, 192, 234, 74)
    assert f_vector(free) == (64, 288, 432, 216)


def test_truncated_build_is_marked_and_refuses_invariants():
    sf = agv_grid_fixture(3, 4)
    cx = build_complex(sf.system, sf.seeds, max_vertices=5)
    assert cx.truncated
    assert cx.n_vertices == 5
    with pytest.raises(BuildTruncatedError):
        f_vector(cx)
    with pytest.raises(BuildTruncatedError):
        check_link_condition(cx)
    # stored cells still closed under facets
    for k in range(1, cx.max_dim + 1):
        for rec in cx.cells(k):
            for fk in rec.facets:
                assert cx.has_cell(k - 1, fk)


def test_build_is_deterministic():
    sf = agv_grid_fixture(2, 3)
    a = build_fixture(sf)
    b = build_fixture(sf)
    for k in range(a.max_dim + 1):
        assert a.cell_keys(k) == b.cell_keys(k)


def test_seed_must_satisfy_constraint():
    graph = path_graph(3)
    ws = Workspace(graph, frozenset(graph.nodes))
    system = System(ws, (token_generator(),), "connected")
    from cubeplan.errors import StateError

    with pytest.raises(StateError, match="constraint"):
        build_complex(system, [frozenset((0, 2))])
