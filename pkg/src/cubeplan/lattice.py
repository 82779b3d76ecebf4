"""Lattice geometries that rewrite systems live on.

Four kinds are supported: the square grid, the hexagonal grid in axial
coordinates, the grid of unit edges of the square lattice (cells are the
edges, not the squares), and an explicit finite graph.  The first three
are translation-symmetric with rank 2; a finite graph has no translations.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import ModelError

SQUARE = "square2d"
HEX = "hexAxial2d"
SQUARE_EDGE = "squareEdge2d"
GRAPH = "finiteGraph"

KINDS = (SQUARE, HEX, SQUARE_EDGE, GRAPH)

# orientation component of a squareEdge cell (x, y, o)
HORIZONTAL = 0
VERTICAL = 1

# axial-coordinate displacements of the six hex neighbours
HEX_DIRS = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))

SQUARE_DIRS = ((1, 0), (0, 1), (-1, 0), (0, -1))


def rot60(cell):
    """Rotate an axial hex coordinate 60 degrees counterclockwise."""
    q, r = cell
    return (-r, q + r)


def rot120(cell):
    q, r = cell
    return (-q - r, q)


def rot90(cell):
    """Rotate a square-grid coordinate 90 degrees counterclockwise."""
    x, y = cell
    return (-y, x)


def rot90_edge(cell):
    """Rotate a squareEdge cell 90 degrees counterclockwise.

    A horizontal edge from (x,y) to (x+1,y) maps to the vertical edge
    from (-y,x) to (-y,x+1); a vertical edge maps to the horizontal edge
    based at (-y-1,x).
    """
    x, y, o = cell
    if o == HORIZONTAL:
        return (-y, x, VERTICAL)
    return (-y - 1, x, HORIZONTAL)


def _is_int_pair(cell):
    return (
        isinstance(cell, tuple)
        and len(cell) == 2
        and all(isinstance(c, int) and not isinstance(c, bool) for c in cell)
    )


@dataclass(frozen=True)
class Lattice:
    """Adjacency structure for cells.

    For ``finiteGraph`` kind, ``nodes`` and ``edges`` describe the graph;
    node labels must be hashable and mutually orderable.  The other kinds
    ignore both fields.
    """

    kind: str
    nodes: tuple = ()
    edges: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ModelError(f"unknown lattice kind {self.kind!r}")
        if self.kind == GRAPH:
            if not self.nodes:
                raise ModelError("finiteGraph lattice needs at least one node")
            node_set = set(self.nodes)
            if len(node_set) != len(self.nodes):
                raise ModelError("duplicate graph nodes")
            norm = []
            for e in self.edges:
                if len(e) != 2 or e[0] == e[1]:
                    raise ModelError(f"bad graph edge {e!r}")
                a, b = e
                if a not in node_set or b not in node_set:
                    raise ModelError(f"graph edge {e!r} uses unknown node")
                norm.append((a, b) if a <= b else (b, a))
            if len(set(norm)) != len(norm):
                raise ModelError("duplicate graph edges")
            object.__setattr__(self, "nodes", tuple(sorted(self.nodes)))
            object.__setattr__(self, "edges", tuple(sorted(norm)))
        elif self.nodes or self.edges:
            raise ModelError(f"{self.kind} lattice takes no nodes/edges")

    @property
    def translation_rank(self) -> int:
        return 0 if self.kind == GRAPH else 2

    def is_cell(self, cell) -> bool:
        """Structural validity of a cell for this lattice."""
        if self.kind == SQUARE or self.kind == HEX:
            return _is_int_pair(cell)
        if self.kind == SQUARE_EDGE:
            return (
                isinstance(cell, tuple)
                and len(cell) == 3
                and _is_int_pair(cell[:2])
                and cell[2] in (HORIZONTAL, VERTICAL)
            )
        return cell in self._node_set

    @property
    def _node_set(self):
        cached = self.__dict__.get("_node_set_cache")
        if cached is None:
            cached = frozenset(self.nodes)
            self.__dict__["_node_set_cache"] = cached
        return cached

    @property
    def _graph_adj(self):
        cached = self.__dict__.get("_graph_adj_cache")
        if cached is None:
            adj = {n: set() for n in self.nodes}
            for a, b in self.edges:
                adj[a].add(b)
                adj[b].add(a)
            cached = {n: tuple(sorted(s)) for n, s in adj.items()}
            self.__dict__["_graph_adj_cache"] = cached
        return cached

    def neighbors(self, cell) -> tuple:
        if self.kind == SQUARE:
            x, y = cell
            return tuple((x + dx, y + dy) for dx, dy in SQUARE_DIRS)
        if self.kind == HEX:
            q, r = cell
            return tuple((q + dq, r + dr) for dq, dr in HEX_DIRS)
        if self.kind == SQUARE_EDGE:
            return _square_edge_neighbors(cell)
        return self._graph_adj[cell]

    def endpoints(self, cell):
        """The two lattice points of a squareEdge cell."""
        x, y, o = cell
        if o == HORIZONTAL:
            return ((x, y), (x + 1, y))
        return ((x, y), (x, y + 1))

    def has_edge(self, a, b) -> bool:
        key = (a, b) if a <= b else (b, a)
        return key in self._edge_set

    @property
    def _edge_set(self):
        cached = self.__dict__.get("_edge_set_cache")
        if cached is None:
            cached = frozenset(self.edges)
            self.__dict__["_edge_set_cache"] = cached
        return cached

    def translate(self, cell, offset):
        """Shift a cell by an integer vector (identity on finite graphs)."""
        if self.kind == GRAPH:
            if offset != ():
                raise ModelError("finiteGraph lattice has no translations")
            return cell
        dx, dy = offset
        if self.kind == SQUARE_EDGE:
            x, y, o = cell
            return (x + dx, y + dy, o)
        x, y = cell
        return (x + dx, y + dy)

    def zero_offset(self):
        return () if self.kind == GRAPH else (0, 0)

    def offset_between(self, src, dst):
        """The translation carrying cell ``src`` to cell ``dst``, or None."""
        if self.kind == GRAPH:
            return () if src == dst else None
        if self.kind == SQUARE_EDGE:
            if src[2] != dst[2]:
                return None
            return (dst[0] - src[0], dst[1] - src[1])
        return (dst[0] - src[0], dst[1] - src[1])


def _square_edge_neighbors(cell):
    x, y, o = cell
    if o == HORIZONTAL:
        pts = ((x, y), (x + 1, y))
    else:
        pts = ((x, y), (x, y + 1))
    out = set()
    for px, py in pts:
        out.update(
            (
                (px, py, HORIZONTAL),
                (px - 1, py, HORIZONTAL),
                (px, py, VERTICAL),
                (px, py - 1, VERTICAL),
            )
        )
    out.discard(cell)
    return tuple(sorted(out))


def is_connected(cells, lattice: Lattice) -> bool:
    """True if the cells form one component under lattice adjacency.

    Empty and singleton sets count as connected.
    """
    cells = set(cells)
    if len(cells) <= 1:
        return True
    start = next(iter(cells))
    seen = {start}
    queue = deque((start,))
    while queue:
        cur = queue.popleft()
        for nb in lattice.neighbors(cur):
            if nb in cells and nb not in seen:
                seen.add(nb)
                queue.append(nb)
    return len(seen) == len(cells)


def square_lattice() -> Lattice:
    return Lattice(SQUARE)


def hex_lattice() -> Lattice:
    return Lattice(HEX)


def square_edge_lattice() -> Lattice:
    return Lattice(SQUARE_EDGE)


def graph_lattice(nodes, edges) -> Lattice:
    return Lattice(GRAPH, tuple(nodes), tuple(tuple(e) for e in edges))
