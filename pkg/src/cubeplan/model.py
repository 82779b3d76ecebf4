"""Core model: workspaces, states, generators, placed actions.

A state is a frozenset of occupied cells.  A generator is a local rewrite
rule given in generator-local coordinates: a support (the cells the rule
inspects), a trace (the subset allowed to change), and an unordered pair
of local occupancy patterns that agree off the trace.  An action is a
generator placed into the workspace by a rigid translation (or, on a
finite graph, by an embedding of its local support) together with an
explicit direction saying which pattern is the source.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from . import lattice as lat
from .errors import ModelError, NotAdmissibleError, StateError

FORWARD = 0
BACKWARD = 1


@dataclass(frozen=True)
class Generator:
    """A local rewrite rule in generator-local coordinates.

    ``occ0`` and ``occ1`` are the occupied cells of the two local
    patterns.  They must differ, and may differ only inside ``trace``.
    ``local_edges`` gives the adjacency the support must embed along and
    is required exactly when the system lives on a finite graph.
    """

    gid: str
    support: tuple
    trace: frozenset
    occ0: frozenset
    occ1: frozenset
    local_edges: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(sorted(set(self.support))))
        object.__setattr__(self, "trace", frozenset(self.trace))
        object.__setattr__(self, "occ0", frozenset(self.occ0))
        object.__setattr__(self, "occ1", frozenset(self.occ1))
        sup = set(self.support)
        if not sup:
            raise ModelError(f"generator {self.gid}: empty support")
        if not self.trace <= sup:
            raise ModelError(f"generator {self.gid}: trace not within support")
        if not (self.occ0 <= sup and self.occ1 <= sup):
            raise ModelError(f"generator {self.gid}: pattern leaves support")
        if self.occ0 == self.occ1:
            raise ModelError(f"generator {self.gid}: degenerate (patterns equal)")
        if (self.occ0 ^ self.occ1) - self.trace:
            raise ModelError(
                f"generator {self.gid}: local states must agree off trace"
            )
        if self.local_edges is not None:
            norm = []
            for e in self.local_edges:
                if len(e) != 2 or e[0] == e[1]:
                    raise ModelError(f"generator {self.gid}: bad local edge {e!r}")
                a, b = e
                if a not in sup or b not in sup:
                    raise ModelError(
                        f"generator {self.gid}: local edge {e!r} leaves support"
                    )
                norm.append((a, b) if a <= b else (b, a))
            object.__setattr__(self, "local_edges", tuple(sorted(set(norm))))


@dataclass(frozen=True)
class Placement:
    """A generator rigidly placed into a workspace.

    ``offset`` is a translation vector for lattice kinds.  On a finite
    graph it is the tuple of host nodes the local support maps to, in
    local support order.
    """

    generator: Generator
    offset: tuple

    @property
    def gid(self) -> str:
        return self.generator.gid

    @property
    def key(self):
        return (self.generator.gid, self.offset)

    def _map_cell(self, cell, lattice: lat.Lattice):
        if lattice.kind == lat.GRAPH:
            return self.offset[self.generator.support.index(cell)]
        return lattice.translate(cell, self.offset)

    def place(self, lattice: lat.Lattice):
        """Compute the placed cell sets once; cached on the instance."""
        cached = self.__dict__.get("_placed")
        if cached is None:
            gen = self.generator
            if lattice.kind == lat.GRAPH:
                mapping = dict(zip(gen.support, self.offset))
            else:
                mapping = {c: lattice.translate(c, self.offset) for c in gen.support}
            cached = (
                frozenset(mapping.values()),
                frozenset(mapping[c] for c in gen.trace),
                frozenset(mapping[c] for c in gen.occ0),
                frozenset(mapping[c] for c in gen.occ1),
            )
            self.__dict__["_placed"] = cached
        return cached


@dataclass(frozen=True)
class Action:
    """A placed generator plus the direction it is traversed in."""

    placement: Placement
    direction: int  # FORWARD: occ0 -> occ1, BACKWARD: occ1 -> occ0
    support: frozenset = field(compare=False, repr=False)
    trace: frozenset = field(compare=False, repr=False)
    src_occ: frozenset = field(compare=False, repr=False)
    dst_occ: frozenset = field(compare=False, repr=False)

    @property
    def gid(self) -> str:
        return self.placement.gid

    @property
    def offset(self) -> tuple:
        return self.placement.offset

    @property
    def placement_key(self):
        return self.placement.key

    @property
    def sort_key(self):
        return (self.placement.gid, self.placement.offset, self.direction)

    def reverse(self) -> "Action":
        return Action(
            self.placement,
            BACKWARD if self.direction == FORWARD else FORWARD,
            self.support,
            self.trace,
            self.dst_occ,
            self.src_occ,
        )

    def __lt__(self, other):
        return self.sort_key < other.sort_key


def make_action(placement: Placement, direction: int, lattice: lat.Lattice) -> Action:
    support, trace, occ0, occ1 = placement.place(lattice)
    if direction == FORWARD:
        return Action(placement, direction, support, trace, occ0, occ1)
    return Action(placement, direction, support, trace, occ1, occ0)


@dataclass(frozen=True)
class Workspace:
    """The region cells may occupy, plus pinned obstacle bits.

    ``cells`` is a frozenset for a finite workspace or None for the whole
    lattice minus ``excluded`` (a cofinite workspace).  Each obstacle is a
    (cell, occupied) pair; every state must carry exactly that bit there,
    and no action trace may touch an obstacle cell.
    """

    lattice: lat.Lattice
    cells: frozenset | None
    obstacles: tuple = ()
    excluded: frozenset = frozenset()

    def __post_init__(self):
        if self.cells is not None:
            object.__setattr__(self, "cells", frozenset(self.cells))
            for c in self.cells:
                if not self.lattice.is_cell(c):
                    raise ModelError(f"workspace cell {c!r} invalid for lattice")
            if self.excluded:
                raise ModelError("excluded cells apply only to cofinite workspaces")
        else:
            object.__setattr__(self, "excluded", frozenset(self.excluded))
            for c in self.excluded:
                if not self.lattice.is_cell(c):
                    raise ModelError(f"excluded cell {c!r} invalid for lattice")
        seen = set()
        norm = []
        for cell, bit in self.obstacles:
            if cell in seen:
                raise ModelError(f"duplicate obstacle cell {cell!r}")
            seen.add(cell)
            if not self.contains(cell):
                raise ModelError(f"obstacle cell {cell!r} outside workspace")
            norm.append((cell, bool(bit)))
        object.__setattr__(self, "obstacles", tuple(sorted(norm)))

    @property
    def is_finite(self) -> bool:
        return self.cells is not None

    def contains(self, cell) -> bool:
        if self.cells is not None:
            return cell in self.cells
        return self.lattice.is_cell(cell) and cell not in self.excluded

    @cached_property
    def obstacle_cells(self) -> frozenset:
        return frozenset(cell for cell, _ in self.obstacles)

    @cached_property
    def pinned_bits(self) -> dict:
        return {cell: bit for cell, bit in self.obstacles}

    def check_state(self, occupied) -> frozenset:
        """Validate a state against the workspace; returns it frozen."""
        occ = frozenset(occupied)
        for c in occ:
            if not self.contains(c):
                raise StateError(f"occupied cell {c!r} outside workspace")
        for cell, bit in self.obstacles:
            if (cell in occ) != bit:
                raise StateError(
                    f"state disagrees with obstacle bit at {cell!r}"
                )
        return occ


# Named global constraints, kept as a registry so systems stay
# serializable and comparable by name.
def _connected_constraint(occupied, workspace: Workspace) -> bool:
    return lat.is_connected(occupied, workspace.lattice)


CONSTRAINTS = {"connected": _connected_constraint}


@dataclass(frozen=True)
class System:
    """A workspace, a generator catalogue, and an optional global rule.

    Systems with ``constraint_name`` None are local: every move's legality
    is decided by its own support pattern.  A named constraint makes the
    system non-local; it must hold at every state of the system, so a move
    is admissible only if its result still satisfies it.
    """

    workspace: Workspace
    catalogue: tuple
    constraint_name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "catalogue", tuple(self.catalogue))
        gids = [g.gid for g in self.catalogue]
        if len(set(gids)) != len(gids):
            raise ModelError("duplicate generator ids in catalogue")
        is_graph = self.workspace.lattice.kind == lat.GRAPH
        for g in self.catalogue:
            if is_graph and g.local_edges is None:
                raise ModelError(
                    f"generator {g.gid}: finite-graph systems need local edges"
                )
            if not is_graph:
                if g.local_edges is not None:
                    raise ModelError(
                        f"generator {g.gid}: local edges only apply to graphs"
                    )
                for c in g.support:
                    if not self.workspace.lattice.is_cell(c):
                        raise ModelError(
                            f"generator {g.gid}: support cell {c!r} invalid"
                        )
        if self.constraint_name is not None and self.constraint_name not in CONSTRAINTS:
            raise ModelError(f"unknown constraint {self.constraint_name!r}")

    @property
    def is_local(self) -> bool:
        return self.constraint_name is None

    def constraint_holds(self, occupied) -> bool:
        if self.constraint_name is None:
            return True
        return CONSTRAINTS[self.constraint_name](occupied, self.workspace)

    @cached_property
    def all_actions(self) -> tuple:
        out = []
        for gen in self.catalogue:
            out.extend(placements(gen, self.workspace))
        out.sort()
        return tuple(out)

    @cached_property
    def actions_by_key(self) -> dict:
        return {(a.gid, a.offset, a.direction): a for a in self.all_actions}


@dataclass(frozen=True)
class SystemFile:
    """A system bundled with its seed states, as stored in a system file."""

    system: System
    seeds: tuple = ()

    def __post_init__(self):
        seeds = tuple(
            self.system.workspace.check_state(s) for s in self.seeds
        )
        object.__setattr__(self, "seeds", seeds)


def _graph_embeddings(gen: Generator, workspace: Workspace):
    """Injective maps of the local support into the host graph.

    Every local edge must land on a host edge.  Embeddings that place the
    same support, trace, and pattern pair are duplicates of one placement;
    the lexicographically least node tuple represents it.
    """
    graph = workspace.lattice
    sup = gen.support
    adj = {c: set() for c in sup}
    for a, b in gen.local_edges or ():
        adj[a].add(b)
        adj[b].add(a)
    hosts = [n for n in graph.nodes if workspace.contains(n)]
    found = {}

    def extend(i, assign):
        if i == len(sup):
            offset = tuple(assign[c] for c in sup)
            mapping = dict(assign)
            support = frozenset(mapping.values())
            trace = frozenset(mapping[c] for c in gen.trace)
            occ0 = frozenset(mapping[c] for c in gen.occ0)
            occ1 = frozenset(mapping[c] for c in gen.occ1)
            sig = (support, trace, frozenset((occ0, occ1)))
            prev = found.get(sig)
            if prev is None or offset < prev:
                found[sig] = offset
            return
        cell = sup[i]
        used = set(assign.values())
        for h in hosts:
            if h in used:
                continue
            ok = True
            for nb in adj[cell]:
                if nb in assign and not graph.has_edge(h, assign[nb]):
                    ok = False
                    break
            if ok:
                assign[cell] = h
                extend(i + 1, assign)
                del assign[cell]

    extend(0, {})
    return sorted(found.values())


def placements(generator: Generator, workspace: Workspace) -> list:
    """Every placement of the generator that fits the workspace.

    Each placement is returned in both directions.  The placed support
    must lie inside the workspace and the placed trace must avoid all
    obstacle cells.  Output is sorted by (generator id, offset, direction).
    """
    if not workspace.is_finite:
        raise ModelError("WorkspaceNotFinite: placements need a finite workspace")
    lattice = workspace.lattice
    out = []
    if lattice.kind == lat.GRAPH:
        offsets = _graph_embeddings(generator, workspace)
    else:
        anchor = generator.support[0]
        offsets = set()
        for w in workspace.cells:
            off = lattice.offset_between(anchor, w)
            if off is not None:
                offsets.add(off)
        offsets = sorted(offsets)
    obstacles = workspace.obstacle_cells
    for off in offsets:
        placement = Placement(generator, off)
        support, trace, _, _ = placement.place(lattice)
        if not all(workspace.contains(c) for c in support):
            continue
        if trace & obstacles:
            continue
        out.append(make_action(placement, FORWARD, lattice))
        out.append(make_action(placement, BACKWARD, lattice))
    out.sort()
    return out


def pattern_matches(state: frozenset, action: Action) -> bool:
    """True if the action's source pattern matches the state."""
    return state & action.support == action.src_occ


def apply_action(state: frozenset, action: Action) -> frozenset:
    """Rewrite the state by one action.

    The state is unchanged off the placed support and carries the target
    pattern on it.  Applying an action and then its reverse is a no-op.
    """
    if not pattern_matches(state, action):
        raise NotAdmissibleError(
            f"NotAdmissible: {action.gid} at {action.offset} does not match"
        )
    return (state - action.support) | action.dst_occ


def is_admissible(state: frozenset, action: Action, system: System) -> bool:
    """Pattern match plus, for non-local systems, the global rule.

    The global rule is evaluated on the action's result: a move that
    would leave the system in a forbidden state is not admissible.
    """
    if not pattern_matches(state, action):
        return False
    if system.constraint_name is None:
        return True
    return system.constraint_holds((state - action.support) | action.dst_occ)


def admissible_actions(state: frozenset, system: System) -> list:
    """All admissible actions at a state, sorted and duplicate-free."""
    return [a for a in system.all_actions if is_admissible(state, a, system)]


def commute_pair(a: Action, b: Action) -> bool:
    """Neither action's trace meets the other's support."""
    return not (a.trace & b.support) and not (b.trace & a.support)


def commute(actions) -> bool:
    """True if the actions pairwise commute.

    Accepts any iterable; a single action commutes with itself vacuously,
    but two copies of one placement (or one placement in both directions)
    do not commute, since a trace always meets its own support.
    """
    acts = list(actions)
    for i in range(len(acts)):
        for j in range(i + 1, len(acts)):
            if not commute_pair(acts[i], acts[j]):
                return False
    return True
