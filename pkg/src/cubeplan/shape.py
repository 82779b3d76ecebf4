"""Shape complexes: state complexes up to translation, and path lifting.

The quotient forgets where an aggregate sits in the lattice: a shape is
the canonical translate of a state putting its least occupied cell at
the origin.  Shape complexes are built over an idealized unbounded
workspace with no obstacles, so the quotient is by honest lattice
translations.  A path of shape moves can then be lifted back into a
concrete bounded workspace at a chosen base translation, checking
containment and obstacle rules step by step.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from . import lattice as lat
from .errors import ModelError, StateError
from .model import (
    Action,
    FORWARD,
    BACKWARD,
    Placement,
    System,
    apply_action,
    commute,
    commute_pair,
    make_action,
    pattern_matches,
)
from .statecomplex import (
    CellRecord,
    CubeComplex,
    _corner_states,
    _enumerate_cliques,
    state_key,
)

REASON_START = "start-invalid"
REASON_WORKSPACE = "out-of-workspace"
REASON_OBSTACLE = "obstacle-trace"
REASON_PATTERN = "pattern-mismatch"
REASON_CONSTRAINT = "constraint"
REASON_STEP = "step-malformed"


def canonicalize(state, lattice: lat.Lattice) -> tuple:
    """Translate a state so its least occupied cell sits at the origin.

    Returns (canonical state, shift applied).  Idempotent; the identity
    on finite-graph lattices, which have no translations.
    """
    occ = frozenset(state)
    if not occ:
        raise StateError("cannot canonicalize an empty state")
    if lattice.kind == lat.GRAPH:
        return occ, ()
    least = min(occ)
    shift = (-least[0], -least[1])
    return frozenset(lattice.translate(c, shift) for c in occ), shift


def _shift_offset(offset: tuple, shift: tuple) -> tuple:
    return (offset[0] + shift[0], offset[1] + shift[1])


def shape_cube_key(actions, corner_state: frozenset, lattice: lat.Lattice) -> tuple:
    """Translation-invariant identity of the cube at a corner.

    Takes the least representation over all corners of the cube, each
    re-expressed with that corner canonicalized.
    """
    actions = list(actions)
    if not actions:
        return ((), state_key(canonicalize(corner_state, lattice)[0]))
    corners = _corner_states(corner_state, actions)
    union_sup = frozenset()
    for a in actions:
        union_sup |= a.support
    best = None
    for corner in corners:
        _, shift = canonicalize(corner, lattice)
        placements = tuple(
            sorted((a.gid, _shift_offset(a.offset, shift)) for a in actions)
        )
        off = tuple(
            sorted(lattice.translate(c, shift) for c in corner - union_sup)
        )
        rep = (placements, off)
        if best is None or rep < best:
            best = rep
    return best


class ShapeComplex(CubeComplex):
    """Cube complex over canonical shapes of one system."""

    def __init__(self, system: System):
        super().__init__()
        self.system = system

    def cell_key(self, actions, corner_state):
        return shape_cube_key(actions, corner_state, self.system.workspace.lattice)

    def corner_vid_of(self, state):
        canon, _ = canonicalize(state, self.system.workspace.lattice)
        return self._vid_of[state_key(canon)]


def _require_homogeneous(system: System) -> None:
    ws = system.workspace
    if ws.is_finite or ws.obstacles or ws.excluded:
        raise ModelError(
            "ShapeRequiresHomogeneousWorkspace: shape complexes need an "
            "unbounded workspace with no obstacles or holes"
        )
    if ws.lattice.kind == lat.GRAPH:
        raise ModelError("shape complexes need a translation-symmetric lattice")
    for gen in system.catalogue:
        if not gen.occ0 or not gen.occ1:
            raise ModelError(
                f"generator {gen.gid}: an all-empty pattern admits no "
                "shape-local placement enumeration"
            )


def shape_actions(system: System, shape: frozenset) -> list:
    """Admissible actions at a canonical shape, in the shape's own frame.

    Placements are found by aligning each occupied cell of a pattern
    with each occupied cell of the shape, which is exhaustive because
    patterns with no occupied cells are rejected up front.
    """
    lattice = system.workspace.lattice
    out = []
    seen = set()
    for gen in system.catalogue:
        for direction, src in ((FORWARD, gen.occ0), (BACKWARD, gen.occ1)):
            for local in src:
                for w in shape:
                    off = lattice.offset_between(local, w)
                    if off is None or (gen.gid, off, direction) in seen:
                        continue
                    seen.add((gen.gid, off, direction))
                    act = make_action(Placement(gen, off), direction, lattice)
                    if not pattern_matches(shape, act):
                        continue
                    if not system.constraint_holds(apply_action(shape, act)):
                        continue
                    out.append(act)
    out.sort()
    return out


def _shape_record(
    cx: ShapeComplex, key: tuple, actions: list, corner_states: list
) -> CellRecord | None:
    """Record for a new shape cube, expressed in the frame of its key."""
    lattice = cx.system.workspace.lattice
    k = len(actions)
    base_mask = None
    base_shift = None
    for mask, corner in enumerate(corner_states):
        _, shift = canonicalize(corner, lattice)
        placements = tuple(
            sorted((a.gid, _shift_offset(a.offset, shift)) for a in actions)
        )
        union_sup = frozenset()
        for a in actions:
            union_sup |= a.support
        off = tuple(sorted(lattice.translate(c, shift) for c in corner - union_sup))
        if (placements, off) == key:
            base_mask = mask
            base_shift = shift
            break
    if base_mask is None:
        return None
    base = frozenset(
        lattice.translate(c, base_shift) for c in corner_states[base_mask]
    )
    from_base = []
    for i, act in enumerate(actions):
        a = act.reverse() if (base_mask >> i) & 1 else act
        placement = Placement(a.placement.generator, _shift_offset(a.offset, base_shift))
        from_base.append(make_action(placement, a.direction, lattice))
    order = sorted(range(k), key=lambda i: from_base[i].sort_key)
    acts = tuple(from_base[i] for i in order)
    shifted_corners = _corner_states(base, acts)
    corners = []
    for state in shifted_corners:
        canon, _ = canonicalize(state, lattice)
        ckey = state_key(canon)
        if ckey not in cx._vid_of:
            return None
        corners.append(cx._vid_of[ckey])
    facets = []
    for i in range(k):
        sub = acts[:i] + acts[i + 1 :]
        far = apply_action(base, acts[i])
        facets.append(shape_cube_key(sub, base, lattice))
        facets.append(shape_cube_key(sub, far, lattice))
    return CellRecord(k, key, base, acts, tuple(corners), tuple(facets))


def build_shape_complex(system: System, seed_shapes, cap: int = 1_000_000) -> ShapeComplex:
    """Close seed shapes under moves-up-to-translation, then add cubes."""
    _require_homogeneous(system)
    lattice = system.workspace.lattice
    cx = ShapeComplex(system)
    cx.cap = cap
    queue = deque()
    for s in seed_shapes:
        canon, _ = canonicalize(frozenset(s), lattice)
        if not system.constraint_holds(canon):
            raise StateError("seed shape violates the system's global constraint")
        if not cx.has_state(canon):
            if cx.n_vertices >= cap:
                cx.truncated = True
                break
            queue.append(cx.add_vertex(canon))
    acts_of: dict = {}
    while queue:
        vid = queue.popleft()
        shape = cx.vertex_state(vid)
        acts = shape_actions(system, shape)
        acts_of[vid] = acts
        for act in acts:
            canon, _ = canonicalize(apply_action(shape, act), lattice)
            if not cx.has_state(canon):
                if cx.n_vertices >= cap:
                    cx.truncated = True
                    continue
                queue.append(cx.add_vertex(canon))

    check_corners = not system.is_local
    for vid in range(cx.n_vertices):
        shape = cx.vertex_state(vid)
        acts = acts_of.get(vid)
        if acts is None:
            acts = shape_actions(system, shape)
        n = len(acts)
        adjacency = [0] * n
        for i in range(n):
            for j in range(i + 1, n):
                if commute_pair(acts[i], acts[j]):
                    adjacency[i] |= 1 << j
                    adjacency[j] |= 1 << i
        for clique in _enumerate_cliques(n, adjacency):
            chosen = [acts[i] for i in clique]
            key = shape_cube_key(chosen, shape, lattice)
            k = len(clique)
            if cx.has_cell(k, key):
                continue
            corner_states = _corner_states(shape, chosen)
            if check_corners and any(
                not system.constraint_holds(c) for c in corner_states
            ):
                continue
            rec = _shape_record(cx, key, chosen, corner_states)
            if rec is None:
                continue
            cx.add_cell(rec)
    return cx


def random_shape_path(system: System, shape, length: int, rng):
    """A reproducible random walk over canonical shapes.

    Each step holds one action expressed in the frame of the canonical
    shape it acts on, which is the convention ``lift_path`` expects.
    The returned path carries no system: its raw vertices are not
    meaningful, only the per-step frames are.
    """
    from .cubepaths import CubePath

    _require_homogeneous(system)
    lattice = system.workspace.lattice
    cur, _ = canonicalize(frozenset(shape), lattice)
    start = cur
    steps = []
    for _ in range(length):
        acts = shape_actions(system, cur)
        if not acts:
            break
        act = rng.choice(acts)
        steps.append(frozenset((act,)))
        cur, _ = canonicalize(apply_action(cur, act), lattice)
    return CubePath(start, tuple(steps), None)


@dataclass(frozen=True)
class LiftResult:
    """Outcome of placing a shape path into a concrete workspace.

    ``fail_step`` is the 0-based index of the failing step, or -1 when
    the start state itself cannot be placed.
    """

    ok: bool
    path: object = None
    fail_step: int | None = None
    reason: str | None = None


def lift_path(shape_path, base_offset: tuple, system: System) -> LiftResult:
    """Re-place a shape path into the system's workspace.

    The path's start shape goes in at ``base_offset``; each step is then
    translated along, checking workspace containment, obstacle traces,
    pattern match against the real state (occupied obstacles included),
    and the global constraint, in that order.
    """
    from .cubepaths import CubePath

    ws = system.workspace
    lattice = ws.lattice
    shape_state = frozenset(shape_path.start)
    t = tuple(base_offset)
    modules = frozenset(lattice.translate(c, t) for c in shape_state)
    if any(not ws.contains(c) for c in modules):
        return LiftResult(False, None, -1, REASON_WORKSPACE)
    if modules & ws.obstacle_cells:
        return LiftResult(False, None, -1, REASON_START)
    occupied_obstacles = frozenset(c for c, bit in ws.obstacles if bit)
    state = modules | occupied_obstacles
    if not system.constraint_holds(state):
        return LiftResult(False, None, -1, REASON_CONSTRAINT)
    start = state
    steps = []
    for i, step in enumerate(shape_path.steps):
        placed = []
        for act in sorted(step):
            placement = Placement(
                act.placement.generator, _shift_offset(act.offset, t)
            )
            cact = make_action(placement, act.direction, lattice)
            if not all(ws.contains(c) for c in cact.support):
                return LiftResult(False, None, i, REASON_WORKSPACE)
            if cact.trace & ws.obstacle_cells:
                return LiftResult(False, None, i, REASON_OBSTACLE)
            if not pattern_matches(state, cact):
                return LiftResult(False, None, i, REASON_PATTERN)
            placed.append(cact)
        if not placed or not commute(placed):
            return LiftResult(False, None, i, REASON_STEP)
        for cact in placed:
            state = apply_action(state, cact)
        if not system.constraint_holds(state):
            return LiftResult(False, None, i, REASON_CONSTRAINT)
        steps.append(frozenset(placed))
        # advance the shape frame alongside the concrete one
        raw = shape_state
        for act in sorted(step):
            raw = apply_action(raw, act)
        shape_state, shift = canonicalize(raw, lattice)
        t = (t[0] - shift[0], t[1] - shift[1])
    return LiftResult(True, CubePath(start, tuple(steps), system), None, None)
