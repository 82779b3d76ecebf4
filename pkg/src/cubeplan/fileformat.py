"""Text formats: system files, state files, move scripts, complex export.

System files are line oriented UTF-8 text; ``#`` starts a comment.  The
first directive must be ``lattice KIND``.  Cells are written ``(x,y)``
on the square and hex lattices, ``(x,y,h)`` or ``(x,y,v)`` on the edge
lattice, and as bare tokens (integers or identifiers) on finite graphs.
``parse_system_file`` and ``serialize`` are mutually inverse on valid
input: parse(serialize(x)) == x by dataclass equality.
"""

from __future__ import annotations

import re

from . import lattice as lat
from .cubepaths import CubePath
from .errors import FormatError, ModelError, StateError
from .model import (
    BACKWARD,
    CONSTRAINTS,
    FORWARD,
    Generator,
    Placement,
    System,
    SystemFile,
    Workspace,
    make_action,
)

_INT_RE = re.compile(r"^-?\d+$")
_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_.-]*$")
_PAIR_RE = re.compile(r"^\((-?\d+),(-?\d+)\)$")
_EDGE_CELL_RE = re.compile(r"^\((-?\d+),(-?\d+),([hv])\)$")
_GRAPH_PAIR_RE = re.compile(r"^\(([^,()\s]+),([^,()\s]+)\)$")

_ORIENT_LETTER = {lat.HORIZONTAL: "h", lat.VERTICAL: "v"}
_ORIENT_VALUE = {"h": lat.HORIZONTAL, "v": lat.VERTICAL}

_GENERATOR_FIELDS = ("support", "trace", "occ0", "occ1", "edges")


def _err(ln: int, msg: str) -> FormatError:
    return FormatError(f"line {ln}: {msg}")


# -- token level ------------------------------------------------------------

def _parse_node_token(tok: str, ln: int):
    """Graph node labels and generator-local labels: int or identifier."""
    if _INT_RE.match(tok):
        return int(tok)
    if _NAME_RE.match(tok):
        return tok
    raise _err(ln, f"bad node token {tok!r}")


def _fmt_node(node) -> str:
    if isinstance(node, int) and not isinstance(node, bool):
        return str(node)
    if isinstance(node, str) and _NAME_RE.match(node):
        return node
    raise FormatError(f"node label {node!r} is not serializable")


def _parse_cell(tok: str, kind: str, ln: int):
    if kind == lat.GRAPH:
        return _parse_node_token(tok, ln)
    if kind == lat.SQUARE_EDGE:
        m = _EDGE_CELL_RE.match(tok)
        if not m:
            raise _err(ln, f"bad edge-lattice cell {tok!r}, expected (x,y,h|v)")
        return (int(m.group(1)), int(m.group(2)), _ORIENT_VALUE[m.group(3)])
    m = _PAIR_RE.match(tok)
    if not m:
        raise _err(ln, f"bad cell {tok!r}, expected (x,y)")
    return (int(m.group(1)), int(m.group(2)))


def _fmt_cell(cell, kind: str) -> str:
    if kind == lat.GRAPH:
        return _fmt_node(cell)
    if kind == lat.SQUARE_EDGE:
        x, y, o = cell
        return f"({x},{y},{_ORIENT_LETTER[o]})"
    x, y = cell
    return f"({x},{y})"


def _parse_graph_pair(tok: str, ln: int) -> tuple:
    m = _GRAPH_PAIR_RE.match(tok)
    if not m:
        raise _err(ln, f"bad edge {tok!r}, expected (a,b)")
    return (
        _parse_node_token(m.group(1), ln),
        _parse_node_token(m.group(2), ln),
    )


def _fmt_graph_pair(pair) -> str:
    a, b = pair
    return f"({_fmt_node(a)},{_fmt_node(b)})"


def _homogeneous(tokens, ln: int, what: str):
    types = {type(t) for t in tokens}
    if len(types) > 1:
        raise _err(ln, f"{what} mix integer and string labels")


def _strip_comment(raw: str) -> str:
    cut = raw.find("#")
    if cut >= 0:
        raw = raw[:cut]
    return raw.strip()


# -- system files -------------------------------------------------------------

def parse_system_file(text: str) -> SystemFile:
    """Parse a system file; diagnostics carry 1-based line numbers."""
    kind = None
    kind_ln = 0
    nodes = None
    nodes_ln = 0
    graph_edges = None
    ws_tokens = None
    ws_ln = 0
    excluded = set()
    exclude_ln = 0
    obstacles = []  # (cell, bit, line)
    constraint = None
    generators = []
    gid_lines = {}
    seeds = []  # (frozenset, line)
    block = None  # (gid, start_line, {field: cells})

    for ln, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        toks = line.split()
        head, args = toks[0], toks[1:]

        if block is not None:
            gid, start_ln, fields = block
            if head == "end":
                if args:
                    raise _err(ln, "end takes no arguments")
                generators.append(_finish_generator(gid, start_ln, fields, kind))
                block = None
            elif head in _GENERATOR_FIELDS:
                if head in fields:
                    raise _err(ln, f"duplicate {head} in generator {gid}")
                if head == "edges":
                    if kind != lat.GRAPH:
                        raise _err(
                            ln, "generator edges apply only to finite graphs"
                        )
                    fields[head] = tuple(
                        _parse_graph_pair(t, ln) for t in args
                    )
                else:
                    fields[head] = tuple(
                        _parse_cell(t, kind, ln) for t in args
                    )
            else:
                raise _err(
                    ln, f"expected a generator field or end, got {head!r}"
                )
            continue

        if kind is None and head != "lattice":
            raise _err(ln, "the lattice must be declared first")

        if head == "lattice":
            if kind is not None:
                raise _err(ln, "duplicate lattice line")
            if len(args) != 1 or args[0] not in lat.KINDS:
                raise _err(
                    ln, f"lattice kind must be one of {', '.join(lat.KINDS)}"
                )
            kind, kind_ln = args[0], ln
        elif head == "nodes":
            if kind != lat.GRAPH:
                raise _err(ln, "nodes line applies only to finite graphs")
            if nodes is not None:
                raise _err(ln, "duplicate nodes line")
            nodes = tuple(_parse_node_token(t, ln) for t in args)
            _homogeneous(nodes, ln, "node labels")
            nodes_ln = ln
        elif head == "edges":
            if kind != lat.GRAPH:
                raise _err(ln, "edges line applies only to finite graphs")
            if graph_edges is not None:
                raise _err(ln, "duplicate edges line")
            graph_edges = tuple(_parse_graph_pair(t, ln) for t in args)
        elif head == "workspace":
            if ws_tokens is not None:
                raise _err(ln, "duplicate workspace line")
            ws_tokens, ws_ln = args, ln
        elif head == "exclude":
            excluded.update(_parse_cell(t, kind, ln) for t in args)
            exclude_ln = exclude_ln or ln
        elif head == "obstacle":
            if len(args) != 2 or args[1] not in ("occupied", "empty"):
                raise _err(ln, "obstacle takes a cell and occupied|empty")
            obstacles.append(
                (_parse_cell(args[0], kind, ln), args[1] == "occupied", ln)
            )
        elif head == "constraint":
            if constraint is not None:
                raise _err(ln, "duplicate constraint line")
            if len(args) != 1:
                raise _err(ln, "constraint takes one name")
            if args[0] not in CONSTRAINTS:
                raise _err(ln, f"unknown constraint {args[0]!r}")
            constraint = args[0]
        elif head == "generator":
            if len(args) != 1 or not _NAME_RE.match(args[0]):
                raise _err(ln, "generator takes one identifier")
            if args[0] in gid_lines:
                raise _err(
                    ln,
                    f"generator {args[0]} already defined on line"
                    f" {gid_lines[args[0]]}",
                )
            gid_lines[args[0]] = ln
            block = (args[0], ln, {})
        elif head == "seed":
            cells = frozenset(_parse_cell(t, kind, ln) for t in args)
            seeds.append((cells, ln))
        else:
            raise _err(ln, f"unknown directive {head!r}")

    if block is not None:
        raise _err(block[1], f"generator {block[0]} is missing its end line")
    if kind is None:
        raise FormatError("missing lattice declaration")

    if kind == lat.GRAPH:
        if nodes is None:
            raise _err(kind_ln, "finite graphs need a nodes line")
        try:
            lattice = lat.graph_lattice(nodes, graph_edges or ())
        except ModelError as e:
            raise _err(nodes_ln, str(e)) from e
    else:
        if nodes is not None or graph_edges is not None:
            raise _err(kind_ln, "nodes/edges apply only to finite graphs")
        lattice = lat.Lattice(kind)

    if ws_tokens is None:
        raise FormatError("missing workspace line")
    if ws_tokens == ["all"]:
        cells = None
    elif "all" in ws_tokens:
        raise _err(ws_ln, "workspace is either all or an explicit cell list")
    else:
        cells = frozenset(_parse_cell(t, kind, ws_ln) for t in ws_tokens)
        if kind == lat.GRAPH:
            _homogeneous(cells, ws_ln, "workspace nodes")

    try:
        base_ws = Workspace(lattice, cells, (), frozenset(excluded))
    except ModelError as e:
        raise _err(exclude_ln or ws_ln, str(e)) from e
    seen_obstacles = set()
    for cell, bit, ln in obstacles:
        if cell in seen_obstacles:
            raise _err(ln, f"duplicate obstacle cell {cell!r}")
        seen_obstacles.add(cell)
        if not base_ws.contains(cell):
            raise _err(ln, f"obstacle cell {cell!r} outside workspace")
    workspace = Workspace(
        lattice,
        cells,
        tuple((c, b) for c, b, _ in obstacles),
        frozenset(excluded),
    )

    try:
        system = System(workspace, tuple(generators), constraint)
    except ModelError as e:
        raise FormatError(str(e)) from e

    checked = []
    for cells_, ln in seeds:
        try:
            checked.append(workspace.check_state(cells_))
        except StateError as e:
            raise _err(ln, str(e)) from e
    return SystemFile(system, tuple(checked))


def _finish_generator(gid: str, ln: int, fields: dict, kind: str) -> Generator:
    for name in ("support", "trace", "occ0", "occ1"):
        if name not in fields:
            raise _err(ln, f"generator {gid} is missing its {name} line")
    if kind == lat.GRAPH:
        if "edges" not in fields:
            raise _err(ln, f"generator {gid} needs an edges line on a graph")
        local_edges = fields["edges"]
    else:
        local_edges = None
    try:
        return Generator(
            gid,
            fields["support"],
            frozenset(fields["trace"]),
            frozenset(fields["occ0"]),
            frozenset(fields["occ1"]),
            local_edges,
        )
    except ModelError as e:
        raise _err(ln, str(e)) from e


def serialize(obj) -> str:
    """Write a System or SystemFile in the system-file format."""
    if isinstance(obj, SystemFile):
        system, seeds = obj.system, obj.seeds
    elif isinstance(obj, System):
        system, seeds = obj, ()
    else:
        raise FormatError(f"cannot serialize {type(obj).__name__}")
    ws = system.workspace
    kind = ws.lattice.kind
    lines = [f"lattice {kind}"]
    if kind == lat.GRAPH:
        lines.append("nodes " + " ".join(_fmt_node(n) for n in ws.lattice.nodes))
        if ws.lattice.edges:
            lines.append(
                "edges " + " ".join(_fmt_graph_pair(e) for e in ws.lattice.edges)
            )
    if ws.cells is None:
        lines.append("workspace all")
        if ws.excluded:
            lines.append(
                "exclude "
                + " ".join(_fmt_cell(c, kind) for c in sorted(ws.excluded))
            )
    else:
        lines.append(
            ("workspace " + " ".join(_fmt_cell(c, kind) for c in sorted(ws.cells)))
            .rstrip()
        )
    for cell, bit in ws.obstacles:
        word = "occupied" if bit else "empty"
        lines.append(f"obstacle {_fmt_cell(cell, kind)} {word}")
    if system.constraint_name is not None:
        lines.append(f"constraint {system.constraint_name}")
    for gen in system.catalogue:
        if not _NAME_RE.match(gen.gid):
            raise FormatError(f"generator id {gen.gid!r} is not serializable")
        lines.append(f"generator {gen.gid}")
        lines.append(
            "  support " + " ".join(_fmt_cell(c, kind) for c in gen.support)
        )
        for name, cells in (
            ("trace", gen.trace),
            ("occ0", gen.occ0),
            ("occ1", gen.occ1),
        ):
            body = " ".join(_fmt_cell(c, kind) for c in sorted(cells))
            lines.append(f"  {name} {body}".rstrip())
        if gen.local_edges is not None:
            body = " ".join(_fmt_graph_pair(e) for e in gen.local_edges)
            lines.append(f"  edges {body}".rstrip())
        lines.append("end")
    for seed in seeds:
        body = " ".join(_fmt_cell(c, kind) for c in sorted(seed))
        lines.append(f"seed {body}".rstrip())
    return "\n".join(lines) + "\n"


# -- state files --------------------------------------------------------------

def parse_state(text: str, system: System) -> frozenset:
    """Read a one-line ``state ...`` file against a system's workspace."""
    kind = system.workspace.lattice.kind
    state = None
    for ln, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        toks = line.split()
        if toks[0] != "state":
            raise _err(ln, f"expected a state line, got {toks[0]!r}")
        if state is not None:
            raise _err(ln, "duplicate state line")
        cells = frozenset(_parse_cell(t, kind, ln) for t in toks[1:])
        try:
            state = system.workspace.check_state(cells)
        except StateError as e:
            raise _err(ln, str(e)) from e
    if state is None:
        raise FormatError("missing state line")
    return state


def serialize_state(state, system: System) -> str:
    kind = system.workspace.lattice.kind
    body = " ".join(_fmt_cell(c, kind) for c in sorted(state))
    return ("state " + body).rstrip() + "\n"


# -- move scripts ---------------------------------------------------------------

_STEP_RE = re.compile(r"^step\s+(\d+)\s*:\s*(.*)$")


def _fmt_action(action, kind: str) -> str:
    parts = [action.gid]
    if kind == lat.GRAPH:
        parts.extend(_fmt_node(n) for n in action.offset)
    else:
        parts.extend(str(v) for v in action.offset)
    parts.append("fwd" if action.direction == FORWARD else "bwd")
    return "(" + ", ".join(parts) + ")"


def _parse_action(part: str, system: System, gens_by_gid: dict, ln: int):
    part = part.strip()
    if not (part.startswith("(") and part.endswith(")")):
        raise _err(ln, f"bad action {part!r}, expected (gid, ..., fwd|bwd)")
    items = [p.strip() for p in part[1:-1].split(",")]
    if len(items) < 2:
        raise _err(ln, f"bad action {part!r}: too few fields")
    gid, mid, dir_tok = items[0], items[1:-1], items[-1]
    gen = gens_by_gid.get(gid)
    if gen is None:
        raise _err(ln, f"unknown generator {gid!r}")
    if dir_tok == "fwd":
        direction = FORWARD
    elif dir_tok == "bwd":
        direction = BACKWARD
    else:
        raise _err(ln, f"bad direction {dir_tok!r}, expected fwd or bwd")
    lattice = system.workspace.lattice
    if lattice.kind == lat.GRAPH:
        offset = tuple(_parse_node_token(t, ln) for t in mid)
        if len(offset) != len(gen.support):
            raise _err(
                ln,
                f"action for {gid} needs {len(gen.support)} node fields,"
                f" got {len(offset)}",
            )
    else:
        if len(mid) != 2 or not all(_INT_RE.match(t) for t in mid):
            raise _err(ln, f"action for {gid} needs two integer offsets")
        offset = (int(mid[0]), int(mid[1]))
    return make_action(Placement(gen, offset), direction, lattice)


def parse_path(text: str, system: System) -> CubePath:
    """Read a move script; actions are resolved against the system."""
    kind = system.workspace.lattice.kind
    gens_by_gid = {g.gid: g for g in system.catalogue}
    start = None
    steps = []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        toks = line.split()
        if toks[0] == "start":
            if start is not None:
                raise _err(ln, "duplicate start line")
            start = frozenset(_parse_cell(t, kind, ln) for t in toks[1:])
            continue
        m = _STEP_RE.match(line)
        if not m:
            raise _err(ln, "expected a start or step line")
        if start is None:
            raise _err(ln, "the start line must come first")
        index = int(m.group(1))
        if index != len(steps) + 1:
            raise _err(ln, f"expected step {len(steps) + 1}, got step {index}")
        body = m.group(2).strip()
        if body:
            acts = [
                _parse_action(p, system, gens_by_gid, ln)
                for p in body.split(";")
            ]
        else:
            acts = []
        step = frozenset(acts)
        if len(step) != len(acts):
            raise _err(ln, f"step {index} repeats an action")
        steps.append(step)
    if start is None:
        raise FormatError("missing start line")
    return CubePath(start, tuple(steps), system)


def serialize_path(path: CubePath, system: System | None = None) -> str:
    system = system if system is not None else path.system
    if system is None:
        raise FormatError("serializing a path needs its system for cell syntax")
    kind = system.workspace.lattice.kind
    body = " ".join(_fmt_cell(c, kind) for c in sorted(path.start))
    lines = [("start " + body).rstrip()]
    for i, step in enumerate(path.steps, 1):
        acts = "; ".join(_fmt_action(a, kind) for a in sorted(step))
        lines.append(f"step {i}: {acts}" if acts else f"step {i}:")
    return "\n".join(lines) + "\n"


# -- complex export --------------------------------------------------------------

def export_complex(view) -> str:
    """Listing of every cell per dimension with facet back references.

    The header repeats the f-vector; facet references are positions in
    the previous dimension's listing.  Cells appear in build order,
    which is deterministic for a given system and seed set.
    """
    lines = []
    fvec = [view.n_cells(k) for k in range(view.max_dim + 1)]
    lines.append("fvec: " + " ".join(str(n) for n in fvec))
    prev_index = {}
    for k in range(view.max_dim + 1):
        keys = view.cell_keys(k)
        lines.append(f"dim {k}")
        index = {key: i for i, key in enumerate(keys)}
        for i, key in enumerate(keys):
            if k == 0:
                lines.append(f"cell {i}: {key!r}")
            else:
                refs = " ".join(
                    str(prev_index[fk]) for fk in view.facet_keys(k, key)
                )
                lines.append(f"cell {i}: {key!r} facets {refs}")
        prev_index = index
    return "\n".join(lines) + "\n"
