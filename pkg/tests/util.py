"""Shared fixtures: synthetic quotient surfaces and randomized systems.

The surfaces implement the small view protocol the topology functions
consume, with hand-wired identifications, so orientability is exercised
against known answers without trusting the complex builder.
"""

from __future__ import annotations

import random

import cubeplan.lattice as lat
from cubeplan.model import Generator, System, SystemFile, Workspace


class SyntheticSurface:
    """A pure 2-complex given by explicit edges and square boundary cycles.

    ``edges`` maps an edge key to its (v0, v1) endpoint vids; ``squares``
    maps a square key to its boundary cycle, a list of (edge key, sign)
    in traversal order, sign +1 when the step runs v0 -> v1.
    """

    truncated = False

    def __init__(self, n_vertices, edges, squares):
        self.n_vertices = n_vertices
        self._edges = dict(edges)
        self._squares = dict(squares)
        self.max_dim = 2

    def n_cells(self, k):
        return (self.n_vertices, len(self._edges), len(self._squares))[k]

    def cell_keys(self, k):
        if k == 0:
            return list(range(self.n_vertices))
        if k == 1:
            return sorted(self._edges)
        return sorted(self._squares)

    def facet_keys(self, k, key):
        if k == 1:
            return self._edges[key]
        return tuple(e for e, _ in self._squares[key])

    def edge_endpoints(self, key):
        return self._edges[key]

    def square_boundary(self, key):
        return list(self._squares[key])


def torus_view(n: int = 3) -> SyntheticSurface:
    """An n-by-n grid of squares with both directions wrapped around."""

    def vid(i, j):
        return (i % n) * n + (j % n)

    edges = {}
    for i in range(n):
        for j in range(n):
            edges[("h", i, j)] = (vid(i, j), vid(i + 1, j))
            edges[("v", i, j)] = (vid(i, j), vid(i, j + 1))
    squares = {}
    for i in range(n):
        for j in range(n):
            squares[("s", i, j)] = [
                (("h", i, j), 1),
                (("v", (i + 1) % n, j), 1),
                (("h", i, (j + 1) % n), -1),
                (("v", i, j), -1),
            ]
    return SyntheticSurface(n * n, edges, squares)


def klein_view(n: int = 3) -> SyntheticSurface:
    """Like the torus but the horizontal wrap reverses the vertical axis."""

    def vert(i, j):
        if i >= n:
            i, j = i - n, -j
        return (i % n) * n + (j % n)

    edges = {}
    for i in range(n):
        for j in range(n):
            edges[("h", i, j)] = (vert(i, j), vert(i + 1, j))
            edges[("v", i, j)] = (vert(i, j), vert(i, j + 1))
    squares = {}
    for i in range(n):
        for j in range(n):
            if i < n - 1:
                squares[("s", i, j)] = [
                    (("h", i, j), 1),
                    (("v", i + 1, j), 1),
                    (("h", i, (j + 1) % n), -1),
                    (("v", i, j), -1),
                ]
            else:
                # the wrapped column glues to a v-edge running the other way
                squares[("s", i, j)] = [
                    (("h", i, j), 1),
                    (("v", 0, (-j - 1) % n), -1),
                    (("h", i, (j + 1) % n), -1),
                    (("v", i, j), -1),
                ]
    return SyntheticSurface(n * n, edges, squares)


# -- randomized systems for serialization round trips -----------------------

_LOCAL_LABELS = ("a", "b", "c", "d", "e")


def _random_patch_cell(rng, kind):
    x = rng.randrange(-2, 3)
    y = rng.randrange(-2, 3)
    if kind == lat.SQUARE_EDGE:
        return (x, y, rng.choice((lat.HORIZONTAL, lat.VERTICAL)))
    return (x, y)


def _random_generator(rng, gid, kind):
    cells = set()
    while len(cells) < rng.randrange(2, 6):
        cells.add(_random_patch_cell(rng, kind))
    support = tuple(sorted(cells))
    trace = frozenset(rng.sample(support, rng.randrange(1, len(support) + 1)))
    delta = frozenset(rng.sample(sorted(trace), rng.randrange(1, len(trace) + 1)))
    occ0 = frozenset(c for c in support if rng.random() < 0.5)
    return Generator(gid, support, trace, occ0, occ0 ^ delta)


def _random_graph_generator(rng, gid):
    k = rng.randrange(2, 5)
    support = _LOCAL_LABELS[:k]
    pairs = [
        (a, b) for i, a in enumerate(support) for b in support[i + 1 :]
    ]
    local_edges = tuple(p for p in pairs if rng.random() < 0.6)
    trace = frozenset(rng.sample(support, rng.randrange(1, k + 1)))
    delta = frozenset(rng.sample(sorted(trace), rng.randrange(1, len(trace) + 1)))
    occ0 = frozenset(c for c in support if rng.random() < 0.5)
    return Generator(gid, support, trace, occ0, occ0 ^ delta, local_edges)


def _random_seed(rng, workspace):
    if workspace.cells is not None:
        pool = sorted(workspace.cells - workspace.obstacle_cells)
    else:
        kind = workspace.lattice.kind
        pool = sorted(
            {
                _random_patch_cell(rng, kind)
                for _ in range(8)
            }
            - workspace.excluded
            - workspace.obstacle_cells
        )
    chosen = {c for c in pool if rng.random() < 0.4}
    chosen |= {c for c, bit in workspace.obstacles if bit}
    return frozenset(chosen)


def random_system(rng: random.Random) -> SystemFile:
    """A structurally valid random system; content need not be useful."""
    kind = rng.choice((lat.SQUARE, lat.HEX, lat.SQUARE_EDGE, lat.GRAPH))
    if kind == lat.GRAPH:
        n = rng.randrange(3, 8)
        if rng.random() < 0.5:
            nodes = tuple(range(n))
        else:
            nodes = tuple(f"n{i}" for i in range(n))
        pairs = [
            (a, b) for i, a in enumerate(nodes) for b in nodes[i + 1 :]
        ]
        edges = tuple(p for p in pairs if rng.random() < 0.4)
        lattice = lat.graph_lattice(nodes, edges)
        cells = frozenset(
            n for n in nodes if rng.random() < 0.8
        ) or frozenset(nodes[:1])
        obstacles = tuple(
            (c, rng.random() < 0.5)
            for c in sorted(cells)
            if rng.random() < 0.15
        )
        workspace = Workspace(lattice, cells, obstacles)
        gens = tuple(
            _random_graph_generator(rng, f"g{i}")
            for i in range(rng.randrange(1, 4))
        )
    else:
        lattice = lat.Lattice(kind)
        if rng.random() < 0.6:
            cells = {
                _random_patch_cell(rng, kind)
                for _ in range(rng.randrange(6, 20))
            }
            excluded = frozenset()
            ws_cells = frozenset(cells)
        else:
            ws_cells = None
            excluded = frozenset(
                _random_patch_cell(rng, kind)
                for _ in range(rng.randrange(0, 4))
            )
        pool = (
            sorted(ws_cells)
            if ws_cells is not None
            else sorted(
                {_random_patch_cell(rng, kind) for _ in range(6)} - excluded
            )
        )
        obstacles = tuple(
            (c, rng.random() < 0.5) for c in pool if rng.random() < 0.15
        )
        workspace = Workspace(lattice, ws_cells, obstacles, excluded)
        gens = tuple(
            _random_generator(rng, f"g{i}", kind)
            for i in range(rng.randrange(1, 4))
        )
    constraint = "connected" if rng.random() < 0.25 else None
    system = System(workspace, gens, constraint)
    seeds = tuple(_random_seed(rng, workspace) for _ in range(rng.randrange(0, 3)))
    return SystemFile(system, seeds)
