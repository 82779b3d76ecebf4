"""Command-line front end.

Exit codes: 0 on success, 1 on a domain error (bad system, impossible
path, failed lift), 2 on a usage error.  All subcommands are
deterministic given identical flags; ``--threads`` is accepted for
interface stability but builds always run single threaded so output is
bit stable.
"""

from __future__ import annotations

import argparse
import sys

from . import systems
from .cubepaths import (
    NORMALIZE,
    STOP_ON_LENGTH,
    from_edge_path,
    is_normal,
    random_edge_path,
    time_geodesic,
    validate,
)
from .errors import CubeplanError
from .fileformat import (
    export_complex,
    parse_path,
    parse_state,
    parse_system_file,
    serialize,
    serialize_path,
)
from .model import CONSTRAINTS, System, SystemFile
from .shape import build_shape_complex, lift_path, random_shape_path
from .statecomplex import build_complex, check_link_condition
from .topology import betti_mod2, euler_characteristic, f_vector

_PAIR_HELP = "translation written as (tx,ty)"


def _parse_offset(text: str) -> tuple:
    import re

    m = re.match(r"^\((-?\d+),(-?\d+)\)$", text.strip())
    if not m:
        raise argparse.ArgumentTypeError(f"expected (tx,ty), got {text!r}")
    return (int(m.group(1)), int(m.group(2)))


def _builtin_agv_k5(args) -> SystemFile:
    return systems.graph_agv_system(systems.complete_graph(5), args.n)


def _builtin_agv_grid(args) -> SystemFile:
    return systems.agv_grid_fixture(args.m, args.n)


def _builtin_arm(args) -> SystemFile:
    return systems.arm_system(args.n)


def _builtin_sliding_ring(args) -> SystemFile:
    return systems.sliding_ring_fixture(args.p, args.q)


def _builtin_hex(args) -> SystemFile:
    variant = {
        "changing": systems.VARIANT_CHANGING,
        "preserving": systems.VARIANT_PRESERVING,
    }[args.variant]
    cells = None if args.unbounded else systems.hex_ball(args.radius)
    system = systems.hex_pivot_system(variant, cells)
    # three modules in a triangle; fits any ball of radius >= 1
    seed = frozenset([(0, 0), (1, 0), (0, 1)])
    return SystemFile(system, (seed,))


def _builtin_hex_trap(args) -> SystemFile:
    return systems.hex_connectivity_trap(constrained=True)


def _builtin_hex_trap_free(args) -> SystemFile:
    return systems.hex_connectivity_trap(constrained=False)


BUILTINS = {
    "agv-k5": (_builtin_agv_k5, "tokens on the complete graph K5 (--n tokens)"),
    "agv-grid": (_builtin_agv_grid, "two tokens on disjoint paths (--m, --n edges)"),
    "arm": (_builtin_arm, "planar staircase arm with --n segments"),
    "sliding-ring": (
        _builtin_sliding_ring,
        "two sliding squares around a --p by --q wall",
    ),
    "hex": (
        _builtin_hex,
        "pivoting hexagons; --variant changing|preserving,"
        " --radius R ball or --unbounded",
    ),
    "hex-trap": (
        _builtin_hex_trap,
        "hexagons plus connectivity rule at the curvature trap",
    ),
    "hex-trap-free": (
        _builtin_hex_trap_free,
        "the trap workspace without the global rule (passes the check)",
    ),
}


def _add_system_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--system", metavar="FILE", help="system file to load")
    src.add_argument(
        "--builtin",
        choices=sorted(BUILTINS),
        help="; ".join(f"{k}: {v[1]}" for k, v in sorted(BUILTINS.items())),
    )
    p.add_argument("--n", type=int, default=2, help="builtin size parameter")
    p.add_argument("--m", type=int, default=3, help="builtin size parameter")
    p.add_argument("--p", type=int, default=1, help="wall width")
    p.add_argument("--q", type=int, default=1, help="wall height")
    p.add_argument(
        "--variant",
        choices=("changing", "preserving"),
        default="changing",
        help="hex pivot flavor",
    )
    p.add_argument("--radius", type=int, default=2, help="hex ball radius")
    p.add_argument(
        "--unbounded",
        action="store_true",
        help="use the whole lattice (shape-complex work only)",
    )
    p.add_argument(
        "--constraint",
        choices=sorted(CONSTRAINTS) + ["none"],
        default=None,
        help="override the system's global constraint",
    )
    p.add_argument("--seed", metavar="STATEFILE", help="start state file")
    p.add_argument("--cap", type=int, default=1_000_000, help="vertex cap")
    p.add_argument("--out", metavar="FILE", help="write output here, not stdout")
    p.add_argument(
        "--threads", type=int, default=1, help="accepted for compatibility; builds are single threaded"
    )
    p.add_argument("--shapes", action="store_true", help="build the translation quotient instead")


def _load_system(args) -> SystemFile:
    if args.system is not None:
        with open(args.system, encoding="utf-8") as fh:
            sf = parse_system_file(fh.read())
    else:
        sf = BUILTINS[args.builtin][0](args)
    if args.constraint is not None:
        name = None if args.constraint == "none" else args.constraint
        system = System(sf.system.workspace, sf.system.catalogue, name)
        sf = SystemFile(system, sf.seeds)
    return sf


def _load_seeds(args, sf: SystemFile) -> tuple:
    if args.seed is not None:
        with open(args.seed, encoding="utf-8") as fh:
            return (parse_state(fh.read(), sf.system),)
    if sf.seeds:
        return sf.seeds
    raise CubeplanError(
        "no start state: pass --seed or use a system file with seed lines"
    )


def _build(args):
    sf = _load_system(args)
    seeds = _load_seeds(args, sf)
    if args.shapes:
        cx = build_shape_complex(sf.system, seeds, cap=args.cap)
    else:
        cx = build_complex(sf.system, seeds, max_vertices=args.cap)
    return sf, cx


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fvec_line(cx) -> str:
    return "fvec: " + " ".join(
        str(cx.n_cells(k)) for k in range(cx.max_dim + 1)
    )


def _warn_truncated(cx) -> None:
    if getattr(cx, "truncated", False):
        print("warning: build hit the vertex cap; counts are a lower bound", file=sys.stderr)


def cmd_build(args) -> int:
    _, cx = _build(args)
    _warn_truncated(cx)
    if args.format == "counts":
        _emit(args, _fvec_line(cx) + "\n")
    else:
        _emit(args, export_complex(cx))
    return 0


def cmd_stats(args) -> int:
    _, cx = _build(args)
    _warn_truncated(cx)
    _emit(args, _fvec_line(cx) + "\n")
    return 0


def cmd_check_npc(args) -> int:
    _, cx = _build(args)
    _warn_truncated(cx)
    report = check_link_condition(cx)
    if report.ok:
        _emit(args, "OK\n")
        return 0
    lines = []
    for state, acts, count in report.violations:
        cells = " ".join(repr(c) for c in sorted(state))
        moves = "; ".join(
            f"{a.gid}@{a.offset}:{'fwd' if a.direction == 0 else 'bwd'}"
            for a in sorted(acts)
        )
        lines.append(
            f"violation at [{cells}] actions [{moves}] spanned {count} times"
        )
    _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_homology(args) -> int:
    _, cx = _build(args)
    _warn_truncated(cx)
    betti = betti_mod2(cx)
    chi = euler_characteristic(cx)
    _emit(
        args,
        "betti: " + " ".join(str(b) for b in betti) + f"\nchi: {chi}\n",
    )
    return 0


def cmd_export(args) -> int:
    sf, cx = _build(args)
    _warn_truncated(cx)
    if args.what == "system":
        _emit(args, serialize(sf))
    else:
        _emit(args, export_complex(cx))
    return 0


def _optimize_common(args, mode: str) -> int:
    sf = _load_system(args)
    with open(args.infile, encoding="utf-8") as fh:
        path = parse_path(fh.read(), sf.system)
    report = validate(path)
    if not report.ok:
        raise CubeplanError(f"input path invalid: {report.reason}")
    out = time_geodesic(path, mode)
    header = (
        f"# length {path.length} -> {out.length}\n"
        f"# potential {path.potential} -> {out.potential}\n"
    )
    if mode == NORMALIZE:
        header += f"# normal {is_normal(out)}\n"
    _emit(args, header + serialize_path(out))
    return 0


def cmd_optimize(args) -> int:
    return _optimize_common(args, STOP_ON_LENGTH)


def cmd_normalize(args) -> int:
    return _optimize_common(args, NORMALIZE)


def cmd_lift(args) -> int:
    sf = _load_system(args)
    with open(args.infile, encoding="utf-8") as fh:
        shape_path = parse_path(fh.read(), sf.system)
    result = lift_path(shape_path, args.base, sf.system)
    if not result.ok:
        print(
            f"lift failed at step {result.fail_step}: {result.reason}",
            file=sys.stderr,
        )
        return 1
    _emit(args, serialize_path(result.path))
    return 0


def cmd_random_path(args) -> int:
    import random

    sf = _load_system(args)
    seeds = _load_seeds(args, sf)
    rng = random.Random(args.rng_seed)
    if args.shapes:
        path = random_shape_path(sf.system, seeds[0], args.length, rng)
    else:
        moves = random_edge_path(sf.system, seeds[0], args.length, rng)
        path = from_edge_path(seeds[0], moves, sf.system)
    _emit(args, serialize_path(path, sf.system))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cubeplan",
        description="state complexes of lattice reconfiguration systems",
    )
    sub = ap.add_subparsers(dest="subcommand", required=True)

    commands = [
        ("build", cmd_build, "build the complex and export it"),
        ("stats", cmd_stats, "build and print the f-vector only"),
        ("check-npc", cmd_check_npc, "certify the link condition"),
        ("homology", cmd_homology, "mod-2 betti numbers and Euler characteristic"),
        ("optimize", cmd_optimize, "shorten a move script to optimal length"),
        ("normalize", cmd_normalize, "rewrite a move script in normal form"),
        ("lift", cmd_lift, "place a shape-space script at a translation"),
        ("export", cmd_export, "write the system or complex as text"),
        ("random-path", cmd_random_path, "generate a seeded random move script"),
    ]
    for name, fn, help_ in commands:
        p = sub.add_parser(name, help=help_)
        _add_system_args(p)
        p.set_defaults(fn=fn)
        if name in ("build",):
            p.add_argument(
                "--format", choices=("text", "counts"), default="text"
            )
        if name in ("optimize", "normalize", "lift"):
            p.add_argument(
                "--in", dest="infile", required=True, metavar="SCRIPT",
                help="move script to read",
            )
        if name == "lift":
            p.add_argument(
                "--base", type=_parse_offset, required=True, help=_PAIR_HELP
            )
        if name == "export":
            p.add_argument(
                "--what", choices=("system", "complex"), default="complex"
            )
        if name == "random-path":
            p.add_argument("--length", type=int, default=20)
            p.add_argument("--rng-seed", type=int, default=0)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CubeplanError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
