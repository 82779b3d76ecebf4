"""Cube paths and the optimization that makes them time-optimal.

A cube path is a start state plus an ordered list of action sets; each
set runs simultaneously (its actions pairwise commute) and one set takes
one time unit, so the path's length is its elapsed time.  The optimizer
repeatedly pulls actions of the next step into the current one when
their supports and traces permit, cancels move/undo pairs meeting at a
junction, and drops emptied steps.  Its fixed points are exactly the
normal cube paths, which are the unique time-optimal representatives of
their homotopy class in a nonpositively curved complex.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import PathError
from .model import (
    Action,
    System,
    admissible_actions,
    apply_action,
    commute,
    is_admissible,
    pattern_matches,
)

STOP_ON_LENGTH = "stopOnLength"
NORMALIZE = "normalize"
MODES = (STOP_ON_LENGTH, NORMALIZE)


@dataclass(frozen=True)
class CubePath:
    """Start state plus steps; each step is a frozenset of actions."""

    start: frozenset
    steps: tuple
    system: System | None = None

    def __post_init__(self):
        object.__setattr__(self, "start", frozenset(self.start))
        object.__setattr__(
            self, "steps", tuple(frozenset(s) for s in self.steps)
        )

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def potential(self) -> int:
        """Sum of position times step dimension; decreases on every change
        the optimizer makes, which is what bounds its running time."""
        return sum((i + 1) * len(s) for i, s in enumerate(self.steps))

    def vertices(self) -> list:
        """The length+1 states the path passes through."""
        out = [self.start]
        cur = self.start
        for step in self.steps:
            for act in sorted(step):
                cur = apply_action(cur, act)
            out.append(cur)
        return out

    @property
    def end(self) -> frozenset:
        return self.vertices()[-1]


@dataclass
class ShrinkStats:
    """Counters for the optimizer's work, for complexity assertions."""

    iterations: int = 0
    shrink_calls: int = 0


def from_edge_path(start, moves, system: System | None = None) -> CubePath:
    """Wrap a sequence of single moves as a cube path of singleton steps."""
    cur = frozenset(start)
    steps = []
    for i, act in enumerate(moves):
        ok = (
            is_admissible(cur, act, system)
            if system is not None
            else pattern_matches(cur, act)
        )
        if not ok:
            err = PathError(f"move {i} ({act.gid} at {act.offset}) not admissible")
            err.index = i
            raise err
        cur = apply_action(cur, act)
        steps.append(frozenset((act,)))
    return CubePath(frozenset(start), tuple(steps), system)


def commute_sub(step, next_step) -> set:
    """Actions of the next step that can run a step earlier.

    An action qualifies when its trace misses every support of the
    current step and its support misses every trace.  These are exactly
    the next step's edges lying in the closed star of the current cube.
    """
    sup = frozenset()
    tr = frozenset()
    for a in step:
        sup |= a.support
        tr |= a.trace
    return {
        a for a in next_step if not (a.trace & sup) and not (a.support & tr)
    }


def common_edge(prev_step, cur_step) -> tuple:
    """Drop placements present in both steps.

    A placement occurring in consecutive steps is necessarily a move
    followed by its undo (admissibility forces opposite directions), so
    deleting both keeps the endpoints and shortens the path.
    """
    prev_keys = {a.placement_key for a in prev_step}
    cur_keys = {a.placement_key for a in cur_step}
    shared = prev_keys & cur_keys
    if not shared:
        return set(prev_step), set(cur_step)
    return (
        {a for a in prev_step if a.placement_key not in shared},
        {a for a in cur_step if a.placement_key not in shared},
    )


def _require_optimizable(path: CubePath) -> None:
    if path.system is not None and not path.system.is_local:
        raise PathError(
            "optimizer requires a local system; global constraints can "
            "invalidate rescheduled intermediate states"
        )


def shrink_cube_path(path: CubePath, stats: ShrinkStats | None = None) -> CubePath:
    """One optimization sweep along the path.

    At each position, pull forward whatever commutes out of the next
    step, drop the next step if that empties it, then cancel common
    placements with the previous step, stepping the cursor back after an
    excision so the changed junction is re-examined.  The cursor only
    advances when nothing commuted forward.  The result has the same
    endpoints; its potential is strictly smaller unless nothing changed,
    and the sweep changes nothing exactly when the path is normal.
    """
    _require_optimizable(path)
    if stats is not None:
        stats.shrink_calls += 1
    steps = [set(s) for s in path.steps]
    i = 0
    while i < len(steps):
        if stats is not None:
            stats.iterations += 1
        if i + 1 < len(steps):
            moved = commute_sub(steps[i], steps[i + 1])
            if moved:
                steps[i] |= moved
                steps[i + 1] -= moved
                if not steps[i + 1]:
                    del steps[i + 1]
        else:
            moved = set()
        if i >= 1:
            kept_prev, kept_cur = common_edge(steps[i - 1], steps[i])
            steps[i - 1] = kept_prev
            steps[i] = kept_cur
            empty_cur = not kept_cur
            empty_prev = not kept_prev
            if empty_cur:
                del steps[i]
            if empty_prev:
                del steps[i - 1]
            if empty_cur or empty_prev:
                i = max(0, i - (2 if empty_prev else 1))
                continue
        if not moved:
            i += 1
    return CubePath(path.start, tuple(frozenset(s) for s in steps), path.system)


def time_geodesic(
    path: CubePath, mode: str = STOP_ON_LENGTH, stats: ShrinkStats | None = None
) -> CubePath:
    """Optimize a path to minimum elapsed time.

    ``stopOnLength`` repeats the sweep until the length stops dropping:
    the result has the least length in the path's homotopy class.
    ``normalize`` repeats until nothing changes at all: the result is the
    unique normal cube path of the class.  Endpoints never change.
    """
    if mode not in MODES:
        raise PathError(f"unknown mode {mode!r}")
    _require_optimizable(path)
    cur = path
    if mode == STOP_ON_LENGTH:
        while True:
            before = cur.length
            cur = shrink_cube_path(cur, stats)
            if cur.length >= before:
                return cur
    while True:
        nxt = shrink_cube_path(cur, stats)
        if nxt == cur:
            return cur
        cur = nxt


def is_normal(path: CubePath) -> bool:
    """No action of any step can run earlier and no junction cancels."""
    for i in range(len(path.steps) - 1):
        if commute_sub(path.steps[i], path.steps[i + 1]):
            return False
        prev_keys = {a.placement_key for a in path.steps[i]}
        if any(a.placement_key in prev_keys for a in path.steps[i + 1]):
            return False
    return True


@dataclass(frozen=True)
class PathReport:
    ok: bool
    index: int | None = None
    reason: str | None = None


def validate(path: CubePath) -> PathReport:
    """Check the structural invariants of a cube path.

    Every step must be a nonempty, pairwise-commuting set of actions,
    each admissible at the state the step starts from (including the
    global constraint when the path carries a non-local system).
    """
    cur = path.start
    system = path.system
    for i, step in enumerate(path.steps):
        if not step:
            return PathReport(False, i, "empty step")
        if not commute(step):
            return PathReport(False, i, "step actions do not commute")
        for act in sorted(step):
            ok = (
                is_admissible(cur, act, system)
                if system is not None
                else pattern_matches(cur, act)
            )
            if not ok:
                return PathReport(
                    False, i, f"action {act.gid} at {act.offset} not admissible"
                )
        for act in sorted(step):
            cur = apply_action(cur, act)
        if system is not None and not system.constraint_holds(cur):
            return PathReport(False, i, "state violates the global constraint")
    return PathReport(True, None, None)


def oracle_shortest(complex_, u, v) -> int:
    """Fewest cubes between two vertices, by search over cube moves.

    One move jumps from any vertex of a cube to the antipodal vertex.
    Independent of the optimizer: used to cross-check its output on
    complexes small enough to build.
    """
    from collections import deque

    adj = getattr(complex_, "_cube_move_adjacency", None)
    if adj is None:
        adj = [set() for _ in range(complex_.n_vertices)]
        for k in range(1, complex_.max_dim + 1):
            for rec in complex_.cells(k):
                corners = rec.corners
                full = len(corners) - 1
                for m, vid in enumerate(corners):
                    adj[vid].add(corners[full ^ m])
        complex_._cube_move_adjacency = adj
    src = complex_.vertex_vid(u)
    dst = complex_.vertex_vid(v)
    if src == dst:
        return 0
    dist = {src: 0}
    queue = deque((src,))
    while queue:
        cur = queue.popleft()
        d = dist[cur] + 1
        for nb in adj[cur]:
            if nb not in dist:
                if nb == dst:
                    return d
                dist[nb] = d
                queue.append(nb)
    raise PathError("states are not connected in the complex")


def random_edge_path(system: System, start, length: int, rng) -> list:
    """A reproducible random admissible move sequence from a state.

    Stops early only if a state has no admissible actions at all.
    """
    cur = frozenset(start)
    moves = []
    for _ in range(length):
        acts = admissible_actions(cur, system)
        if not acts:
            break
        act = rng.choice(acts)
        moves.append(act)
        cur = apply_action(cur, act)
    return moves
