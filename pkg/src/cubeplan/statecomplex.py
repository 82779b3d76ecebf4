"""Cube complexes over reachable states.

The builder closes a set of seed states under admissible actions, then
enumerates one k-cube for every set of k pairwise-commuting actions
admissible at a reached state.  A cube is identified by a canonical key
(its placement set plus the state restricted off the union of supports),
so the same cube found from different corners is stored once.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import (
    BuildTruncatedError,
    CubeplanError,
    ModelError,
    StateError,
)
from .model import (
    Action,
    System,
    admissible_actions,
    apply_action,
    commute_pair,
)


def state_key(occupied) -> tuple:
    return tuple(sorted(occupied))


def cube_key(actions, corner_state: frozenset) -> tuple:
    """Canonical identity of the cube spanned by actions at a corner.

    Two corners of one cube give equal keys: the placement list ignores
    direction, and the corners agree off the union of supports.
    """
    placements = tuple(sorted(a.placement_key for a in actions))
    union_sup = frozenset()
    for a in actions:
        union_sup |= a.support
    return (placements, tuple(sorted(corner_state - union_sup)))


@dataclass(frozen=True)
class CellRecord:
    """One cell of a cube complex.

    ``actions`` are expressed from the canonical base corner (the corner
    with the least state key) and sorted; ``corners`` lists vertex ids in
    bitmask order, bit i meaning action i has been applied; ``facets``
    holds 2*dim facet keys as (near_i, far_i) pairs, flattened.
    """

    dim: int
    key: tuple
    base: frozenset
    actions: tuple
    corners: tuple
    facets: tuple


class CubeComplex:
    """Container of cells per dimension with deterministic iteration."""

    def __init__(self):
        self._dims: list[dict] = [{}]
        self._vid_of: dict = {}
        self._states: list = []
        self.truncated: bool = False
        self.cap: int | None = None

    # -- construction -------------------------------------------------

    def add_vertex(self, state: frozenset) -> int:
        skey = state_key(state)
        vid = self._vid_of.get(skey)
        if vid is None:
            vid = len(self._states)
            self._vid_of[skey] = vid
            self._states.append(state)
            key = ((), skey)
            self._dims[0][key] = CellRecord(0, key, state, (), (vid,), ())
        return vid

    def add_cell(self, rec: CellRecord) -> None:
        while len(self._dims) <= rec.dim:
            self._dims.append({})
        self._dims[rec.dim][rec.key] = rec

    # -- keying hooks (overridden by quotient complexes) ----------------

    def cell_key(self, actions, corner_state) -> tuple:
        return cube_key(actions, corner_state)

    def corner_vid_of(self, state) -> int:
        return self._vid_of[state_key(state)]

    # -- cell access ---------------------------------------------------

    @property
    def max_dim(self) -> int:
        return len(self._dims) - 1

    def n_cells(self, k: int) -> int:
        return len(self._dims[k]) if 0 <= k <= self.max_dim else 0

    def cell_keys(self, k: int) -> list:
        if 0 <= k <= self.max_dim:
            return list(self._dims[k].keys())
        return []

    def cells(self, k: int) -> list:
        if 0 <= k <= self.max_dim:
            return list(self._dims[k].values())
        return []

    def record(self, k: int, key: tuple) -> CellRecord:
        try:
            return self._dims[k][key]
        except (IndexError, KeyError):
            raise CubeplanError(f"no {k}-cell with key {key!r}") from None

    def has_cell(self, k: int, key: tuple) -> bool:
        return 0 <= k <= self.max_dim and key in self._dims[k]

    def facet_keys(self, k: int, key: tuple) -> tuple:
        return self.record(k, key).facets

    def corner_vids(self, k: int, key: tuple) -> tuple:
        return self.record(k, key).corners

    # -- vertices ------------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self._states)

    def vertex_vid(self, state) -> int:
        skey = state_key(state)
        vid = self._vid_of.get(skey)
        if vid is None:
            raise CubeplanError(f"state {skey!r} is not a vertex of the complex")
        return vid

    def has_state(self, state) -> bool:
        return state_key(state) in self._vid_of

    def vertex_state(self, vid: int) -> frozenset:
        return self._states[vid]

    # -- derived views -------------------------------------------------

    def edge_endpoints(self, key: tuple) -> tuple:
        """(base vid, far vid) of an edge, base first."""
        rec = self.record(1, key)
        return rec.corners

    def square_boundary(self, key: tuple) -> list:
        """The four directed edges around a square, as (edge key, sign).

        The traversal runs base -> a0 -> a0+a1 -> a1 -> base; the sign is
        +1 when the step runs from the edge's own base corner.
        """
        rec = self.record(2, key)
        a0, a1 = rec.actions
        s0 = rec.base
        s1 = apply_action(s0, a0)
        s3 = apply_action(s1, a1)
        s2 = apply_action(s0, a1)
        walk = (
            (a0, s0, s1),
            (a1, s1, s3),
            (a0, s2, s3),  # traversed far->near: s3 -> s2
            (a1, s0, s2),  # traversed far->near: s2 -> s0
        )
        forward = (True, True, False, False)
        out = []
        for (act, near, far), fwd in zip(walk, forward):
            ekey = self.cell_key((act,), near)
            base_vid = self.record(1, ekey).corners[0]
            from_vid = self.corner_vid_of(near if fwd else far)
            out.append((ekey, 1 if from_vid == base_vid else -1))
        return out

    def incident_cells(self, vid: int) -> list:
        """All (dim, key) pairs of cells having the vertex as a corner."""
        cache = getattr(self, "_incidence", None)
        if cache is None:
            cache = {v: [] for v in range(len(self._states))}
            for k in range(1, self.max_dim + 1):
                for key, rec in self._dims[k].items():
                    for v in set(rec.corners):
                        cache[v].append((k, key))
            self._incidence = cache
        return cache[vid]


class StateComplex(CubeComplex):
    """Cube complex of a specific system, built from seed states."""

    def __init__(self, system: System):
        super().__init__()
        self.system = system


def _enumerate_cliques(n: int, adjacency: list):
    """Yield every clique (as a tuple of indices) of the graph, size >= 1.

    ``adjacency`` is a list of bitmasks.  Cliques come out in
    lexicographic order of their index tuples.
    """
    out = []

    def extend(clique, candidates):
        c = candidates
        while c:
            low = c & (-c)
            i = low.bit_length() - 1
            c ^= low
            new = clique + (i,)
            out.append(new)
            extend(new, c & adjacency[i])

    extend((), (1 << n) - 1)
    return out


def _corner_states(base: frozenset, actions) -> list:
    """States of all 2^k corners, indexed by action bitmask."""
    k = len(actions)
    states = [None] * (1 << k)
    states[0] = base
    for mask in range(1, 1 << k):
        low = mask & (-mask)
        i = low.bit_length() - 1
        states[mask] = apply_action(states[mask ^ low], actions[i])
    return states


def _build_record(
    complex_: CubeComplex, key: tuple, actions: list, corner_states: list
) -> CellRecord | None:
    """Make the canonical record for a new cube; None if a corner is absent."""
    k = len(actions)
    corner_keys = [state_key(s) for s in corner_states]
    for ck in corner_keys:
        if ck not in complex_._vid_of:
            return None
    base_mask = min(range(1 << k), key=lambda m: corner_keys[m])
    base = corner_states[base_mask]
    from_base = []
    for i, act in enumerate(actions):
        from_base.append(act.reverse() if (base_mask >> i) & 1 else act)
    order = sorted(range(k), key=lambda i: from_base[i].sort_key)
    acts = tuple(from_base[i] for i in order)
    corners = []
    for mask in range(1 << k):
        orig = base_mask
        for j in range(k):
            if (mask >> j) & 1:
                orig ^= 1 << order[j]
        corners.append(complex_._vid_of[corner_keys[orig]])
    facets = []
    for i in range(k):
        sub = acts[:i] + acts[i + 1 :]
        near = complex_._states[corners[0]]
        far = apply_action(near, acts[i])
        facets.append(cube_key(sub, near))
        facets.append(cube_key(sub, far))
    return CellRecord(k, key, base, acts, tuple(corners), tuple(facets))


def build_complex(system: System, seeds, max_vertices: int = 1_000_000) -> StateComplex:
    """Breadth-first closure of the seeds, then cube enumeration.

    Stops discovering new states at ``max_vertices`` and marks the result
    truncated; cubes are then restricted to fully-visited corner sets so
    the stored complex is still closed under facets.
    """
    if not system.workspace.is_finite:
        raise ModelError("WorkspaceNotFinite: complex building needs a finite workspace")
    cx = StateComplex(system)
    cx.cap = max_vertices
    seed_states = []
    for s in seeds:
        occ = system.workspace.check_state(s)
        if not system.constraint_holds(occ):
            raise StateError("seed state violates the system's global constraint")
        seed_states.append(occ)

    acts_of: list = []
    queue = deque()
    for occ in seed_states:
        if not cx.has_state(occ):
            if len(cx._states) >= max_vertices:
                cx.truncated = True
                break
            vid = cx.add_vertex(occ)
            acts_of.append(None)
            queue.append(vid)
    while queue:
        vid = queue.popleft()
        state = cx.vertex_state(vid)
        acts = admissible_actions(state, system)
        acts_of[vid] = acts
        for act in acts:
            nxt = apply_action(state, act)
            if not cx.has_state(nxt):
                if len(cx._states) >= max_vertices:
                    cx.truncated = True
                    continue
                nvid = cx.add_vertex(nxt)
                acts_of.append(None)
                queue.append(nvid)

    check_corners = not system.is_local
    for vid in range(len(cx._states)):
        state = cx.vertex_state(vid)
        acts = acts_of[vid]
        if acts is None:  # frontier vertex never expanded (truncated build)
            acts = admissible_actions(state, system)
        n = len(acts)
        adjacency = [0] * n
        for i in range(n):
            for j in range(i + 1, n):
                if commute_pair(acts[i], acts[j]):
                    adjacency[i] |= 1 << j
                    adjacency[j] |= 1 << i
        for clique in _enumerate_cliques(n, adjacency):
            chosen = [acts[i] for i in clique]
            key = cube_key(chosen, state)
            k = len(clique)
            if cx.has_cell(k, key):
                continue
            corner_states = _corner_states(state, chosen)
            if check_corners and any(
                not system.constraint_holds(c) for c in corner_states
            ):
                continue
            rec = _build_record(cx, key, chosen, corner_states)
            if rec is None:
                continue
            cx.add_cell(rec)

    for k in range(1, cx.max_dim + 1):
        for rec in cx._dims[k].values():
            for fk in rec.facets:
                if not cx.has_cell(k - 1, fk):
                    raise CubeplanError(
                        f"facet {fk!r} of a stored {k}-cell is missing"
                    )
    return cx


def boundary(complex_: CubeComplex, rec: CellRecord) -> list:
    """The 2*dim facet records of a cell; empty for a vertex."""
    return [complex_.record(rec.dim - 1, fk) for fk in rec.facets]


def star(complex_: CubeComplex, rec: CellRecord) -> set:
    """All cells having the given cell as a (possibly improper) face.

    Walks facet links upward: a cube contains a lower face exactly when
    one of its facets does, so each dimension is reached from the one
    below it.
    """
    if not complex_.has_cell(rec.dim, rec.key):
        raise CubeplanError(f"cell {rec.key!r} not in complex")
    out = {rec}
    level = {rec.key}
    for k in range(rec.dim + 1, complex_.max_dim + 1):
        nxt = set()
        for other in complex_._dims[k].values():
            if any(fk in level for fk in other.facets):
                nxt.add(other.key)
                out.add(other)
        level = nxt
        if not level:
            break
    return out


@dataclass(frozen=True)
class LinkComplex:
    """The simplicial link of a vertex.

    Vertices are the keys of the edges at the state; each incident
    (k+1)-cube contributes the k-simplex of its edges at the state.
    ``action_of`` maps an edge key to the action leaving the vertex.
    """

    state: frozenset
    vertices: tuple
    simplices: dict
    action_of: dict

    def skeleton_edges(self) -> list:
        return sorted(
            tuple(sorted(s)) for s in self.simplices if len(s) == 2
        )


def link(complex_: CubeComplex, vertex_state) -> LinkComplex:
    """Link of a vertex: one simplex per incident cube of dimension >= 1."""
    state = frozenset(vertex_state)
    vid = complex_.vertex_vid(state)
    simplices: dict = {}
    action_of: dict = {}
    for k, key in complex_.incident_cells(vid):
        rec = complex_.record(k, key)
        frames = _corner_states(rec.base, rec.actions)
        edge_keys = []
        for pos, corner in enumerate(rec.corners):
            if corner != vid:
                continue
            edge_keys_here = []
            for i in range(k):
                act = rec.actions[i]
                if (pos >> i) & 1:
                    act = act.reverse()
                ekey = complex_.cell_key((act,), frames[pos])
                edge_keys_here.append(ekey)
                if k == 1:
                    action_of[ekey] = act
            edge_keys.append(frozenset(edge_keys_here))
        for simplex in edge_keys:
            simplices[simplex] = simplices.get(simplex, 0) + 1
    vertices = sorted(k for s in simplices for k in s)
    return LinkComplex(state, tuple(sorted(set(vertices))), simplices, action_of)


@dataclass(frozen=True)
class LinkConditionReport:
    ok: bool
    violations: tuple  # (vertex state, actions tuple, count found)


def check_link_condition(complex_: CubeComplex) -> LinkConditionReport:
    """Check that every clique of every vertex link spans exactly one simplex.

    A missing spanning simplex is a set of pairwise-compatible actions
    that cannot run simultaneously; a duplicate would be two distinct
    cubes on the same actions.  Either is reported as a violation.
    """
    if complex_.truncated:
        raise BuildTruncatedError(
            "link condition needs the full complex; build hit its vertex cap"
        )
    violations = []
    for vid in range(complex_.n_vertices):
        state = complex_.vertex_state(vid)
        lnk = link(complex_, state)
        verts = list(lnk.vertices)
        index = {v: i for i, v in enumerate(verts)}
        n = len(verts)
        adjacency = [0] * n
        for a, b in lnk.skeleton_edges():
            i, j = index[a], index[b]
            adjacency[i] |= 1 << j
            adjacency[j] |= 1 << i
        for clique in _enumerate_cliques(n, adjacency):
            if len(clique) < 2:
                continue
            simplex = frozenset(verts[i] for i in clique)
            count = lnk.simplices.get(simplex, 0)
            if count != 1:
                actions = tuple(
                    sorted(
                        (lnk.action_of[e] for e in simplex),
                        key=lambda a: a.sort_key,
                    )
                )
                violations.append((state, actions, count))
    return LinkConditionReport(not violations, tuple(violations))
