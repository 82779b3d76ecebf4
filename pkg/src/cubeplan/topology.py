"""Topological invariants of cube complexes.

Functions here take any complex exposing the small view protocol used by
``CubeComplex``: ``max_dim``, ``n_cells(k)``, ``cell_keys(k)`` and
``facet_keys(k, key)`` (facet lists may repeat a key; incidence is
counted with multiplicity).  The surface checks additionally need
``n_vertices``, ``edge_endpoints(key)`` and ``square_boundary(key)``.
Ranks are computed over the two-element field with bitset elimination,
which is enough to decide every invariant used here; orientability is
decided combinatorially instead of via integral homology.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BuildTruncatedError, CubeplanError, TooLargeError

MAX_CELLS = 20_000


def _require_full(view):
    if getattr(view, "truncated", False):
        raise BuildTruncatedError(
            "invariants need the full complex; build hit its vertex cap"
        )


def f_vector(view) -> tuple:
    """Cell counts per dimension."""
    _require_full(view)
    return tuple(view.n_cells(k) for k in range(view.max_dim + 1))


def euler_characteristic(view) -> int:
    """Alternating sum of the f-vector."""
    fv = f_vector(view)
    return sum(c if k % 2 == 0 else -c for k, c in enumerate(fv))


def _gf2_rank(columns) -> int:
    pivots: dict = {}
    rank = 0
    for v in columns:
        while v:
            top = v.bit_length() - 1
            p = pivots.get(top)
            if p is None:
                pivots[top] = v
                rank += 1
                break
            v ^= p
    return rank


def boundary_matrix(view, k: int) -> list:
    """Columns of the mod-2 boundary map from k-cells to (k-1)-cells.

    Each column is an int bitset over the (k-1)-cells in ``cell_keys``
    order; a facet listed an even number of times cancels out.
    """
    index = {key: i for i, key in enumerate(view.cell_keys(k - 1))}
    cols = []
    for key in view.cell_keys(k):
        col = 0
        for fk in view.facet_keys(k, key):
            col ^= 1 << index[fk]
        cols.append(col)
    return cols


def betti_mod2(view) -> tuple:
    """Mod-2 Betti numbers, one entry per dimension of the complex."""
    _require_full(view)
    top = view.max_dim
    total = sum(view.n_cells(k) for k in range(top + 1))
    if total > MAX_CELLS:
        raise TooLargeError(
            f"complex has {total} cells; rank computation capped at {MAX_CELLS}"
        )
    ranks = [0] * (top + 2)
    for k in range(1, top + 1):
        ranks[k] = _gf2_rank(boundary_matrix(view, k))
    out = []
    for k in range(top + 1):
        out.append(view.n_cells(k) - ranks[k] - ranks[k + 1])
    return tuple(out)


@dataclass(frozen=True)
class SurfaceReport:
    ok: bool
    reason: str | None = None


def surface_report(view) -> SurfaceReport:
    """Decide whether the complex is a closed 2-dimensional surface.

    Requires a pure 2-complex where every edge lies in exactly two
    squares (counted with multiplicity) and the edge-ends around every
    vertex close up into a single cycle.
    """
    _require_full(view)
    if view.max_dim != 2 or view.n_cells(2) == 0:
        return SurfaceReport(False, "complex is not 2-dimensional")
    usage: dict = {key: 0 for key in view.cell_keys(1)}
    corner_pairs: dict = {}
    for skey in view.cell_keys(2):
        cycle = view.square_boundary(skey)
        for i, (ekey, sign) in enumerate(cycle):
            usage[ekey] += 1
            nkey, nsign = cycle[(i + 1) % len(cycle)]
            head_vid = view.edge_endpoints(ekey)[1 if sign > 0 else 0]
            head_end = (ekey, 1 if sign > 0 else 0)
            tail_end = (nkey, 0 if nsign > 0 else 1)
            corner_pairs.setdefault(head_vid, []).append((head_end, tail_end))
    for ekey, count in usage.items():
        if count != 2:
            return SurfaceReport(False, f"an edge lies in {count} squares")
    ends_at: dict = {v: set() for v in range(view.n_vertices)}
    for ekey in view.cell_keys(1):
        v0, v1 = view.edge_endpoints(ekey)
        ends_at[v0].add((ekey, 0))
        ends_at[v1].add((ekey, 1))
    for vid in range(view.n_vertices):
        ends = ends_at[vid]
        if not ends:
            return SurfaceReport(False, "isolated vertex")
        degree = {e: 0 for e in ends}
        adj = {e: [] for e in ends}
        for a, b in corner_pairs.get(vid, ()):
            degree[a] += 1
            degree[b] += 1
            adj[a].append(b)
            adj[b].append(a)
        if any(d != 2 for d in degree.values()):
            return SurfaceReport(False, "vertex link is not a cycle")
        start = next(iter(ends))
        seen = {start}
        stack = [start]
        while stack:
            cur = stack.pop()
            for nb in adj[cur]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        if len(seen) != len(ends):
            return SurfaceReport(False, "vertex link has several cycles")
    return SurfaceReport(True, None)


def is_closed_surface(view) -> bool:
    return surface_report(view).ok


def is_orientable_surface(view) -> bool:
    """Try to orient all squares consistently across shared edges.

    Works by 2-coloring with a parity union-find: two squares inducing
    the same direction on a shared edge must take opposite orientations.
    A square meeting an edge twice in the same direction is its own
    contradiction.
    """
    report = surface_report(view)
    if not report.ok:
        raise CubeplanError(f"not a closed surface: {report.reason}")
    usages: dict = {}
    for skey in view.cell_keys(2):
        for ekey, sign in view.square_boundary(skey):
            usages.setdefault(ekey, []).append((skey, sign))

    parent: dict = {}
    parity: dict = {}

    def find(x):
        if parent.setdefault(x, x) == x:
            parity.setdefault(x, 0)
            return x, 0
        root, p = find(parent[x])
        parent[x] = root
        parity[x] ^= p
        return root, parity[x]

    def union(x, y, rel) -> bool:
        rx, px = find(x)
        ry, py = find(y)
        if rx == ry:
            return (px ^ py) == rel
        parent[ry] = rx
        parity[ry] = px ^ py ^ rel
        return True

    for ekey, pair in usages.items():
        (s1, d1), (s2, d2) = pair
        same_direction = d1 == d2
        if s1 == s2:
            if same_direction:
                return False
            continue
        # same induced direction forces opposite orientations
        if not union(s1, s2, 1 if same_direction else 0):
            return False
    return True


class FilteredView:
    """A sub-collection of a complex's cells, closed under facets."""

    truncated = False

    def __init__(self, base, alive):
        self._base = base
        self._alive = [sorted(a) for a in alive]

    @property
    def max_dim(self) -> int:
        top = 0
        for k, cells in enumerate(self._alive):
            if cells:
                top = k
        return top

    def n_cells(self, k: int) -> int:
        return len(self._alive[k]) if 0 <= k < len(self._alive) else 0

    def cell_keys(self, k: int) -> list:
        return list(self._alive[k]) if 0 <= k < len(self._alive) else []

    def facet_keys(self, k: int, key):
        return self._base.facet_keys(k, key)


def collapse_subcomplex(view) -> FilteredView:
    """Greedily remove free faces with their cofaces.

    A face is free when it appears exactly once in the facet lists of
    exactly one remaining cell.  Pairs are removed highest dimension
    first, least key first, so runs are deterministic.
    """
    _require_full(view)
    top = view.max_dim
    alive = [set(view.cell_keys(k)) for k in range(top + 1)]
    facets_of = {}
    cofaces: dict = {}
    counts: dict = {}
    for k in range(top + 1):
        for key in alive[k]:
            counts.setdefault((k, key), 0)
    for k in range(1, top + 1):
        for key in alive[k]:
            fl = list(view.facet_keys(k, key))
            facets_of[(k, key)] = fl
            for fk in fl:
                counts[(k - 1, fk)] += 1
                cofaces.setdefault((k - 1, fk), {}).setdefault(key, 0)
                cofaces[(k - 1, fk)][key] += 1

    def drop(cell):
        k, key = cell
        alive[k].discard(key)
        for fk in facets_of.get(cell, ()):
            counts[(k - 1, fk)] -= 1

    while True:
        free = None
        for d in range(top - 1, -1, -1):
            candidates = [key for key in alive[d] if counts[(d, key)] == 1]
            if candidates:
                free = (d, min(candidates))
                break
        if free is None:
            break
        d, key = free
        coface = None
        for ck, mult in cofaces.get((d, key), {}).items():
            if ck in alive[d + 1] and mult > 0:
                coface = ck
        drop((d + 1, coface))
        drop(free)
    return FilteredView(view, alive)


def greedy_collapse(view) -> tuple:
    """f-vector of what greedy free-face collapsing leaves behind.

    Reaching (1, 0, ...) certifies the complex contracts to a point;
    anything else certifies nothing.
    """
    remaining = collapse_subcomplex(view)
    return tuple(remaining.n_cells(k) for k in range(view.max_dim + 1))
