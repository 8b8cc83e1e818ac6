"""Command-line front end.

Exit codes: 0 success, 1 semantic failure (validation, mismatch, numerical
check), 2 I/O, parse or usage error. Reports are JSON with ``--format json``;
the text form is a projection of the same data.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .eigenlift import full_eigvec_report
from .errors import FactoredLiftError, FormatError, ResidualTooLarge, ValidationError
from .lift import (
    expand_factored_lift,
    expand_ordinary_lift,
    export_lift,
    factorisation_epimorphism,
    verify_free_arc_action,
)
from .reps import builtin_irreps, load_irreps, verify_rank_identity
from .spectra import (
    compare_spectra,
    fmt_float,
    moment_check,
    spectrum_direct,
    spectrum_via_representations,
)
from .voltage import build_b_matrix, parse_voltage_graph
from .walks import (
    b_power,
    closed_walk_count,
    closed_walk_count_via_characters,
    oracle_closed_walk_count,
)

BUNDLED = ("fig1", "example1", "example2")


def default_tol():
    raw = os.environ.get("FACTOREDLIFT_TOL", "1e-7")
    try:
        tol = float(raw)
    except ValueError:
        raise FormatError(f"FACTOREDLIFT_TOL={raw!r} is not a number") from None
    if not tol > 0:
        raise FormatError("FACTOREDLIFT_TOL must be positive")
    return tol


def positive_float(text):
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not x > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return x


def positive_int(text):
    try:
        x = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if x < 1:
        raise argparse.ArgumentTypeError("walk length must be at least 1 (length-0 walks are not supported)")
    return x


def resolve_instance(name):
    """A path, or one of the bundled instance names."""
    if name in BUNDLED and not Path(name).exists():
        return str(resources.files("factoredlift") / "data" / f"{name}.json")
    return name


def load_instance(args):
    return parse_voltage_graph(resolve_instance(args.instance))


def load_irrep_set(graph, source):
    if source in (None, "builtin"):
        return builtin_irreps(graph.group)
    if source == "d3":
        source = str(resources.files("factoredlift") / "data" / "d3_irreps.json")
    try:
        return load_irreps(graph.group, source)
    except json.JSONDecodeError as exc:
        raise FormatError(f"representation file: {exc}") from None


def emit(args, payload, text_lines):
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        for line in text_lines:
            print(line)


def fmt(x):
    return f"{fmt_float(x):.12g}"


# subcommands


def cmd_validate(args):
    graph = load_instance(args)
    problems = []
    irreps = None
    if args.irreps is not None or graph.group.family[0] != "table":
        irreps = load_irrep_set(graph, args.irreps)
        if not irreps.is_complete():
            problems.append("representation set is not complete")
        else:
            for u, H in enumerate(graph.omega):
                rep = verify_rank_identity(irreps, H)
                if not rep.ok:
                    problems.append(
                        f"rank identity fails at {graph.base.vertices[u]}: {rep.total} != {rep.index}"
                    )
    payload = {
        "ok": not problems,
        "group": graph.group.name,
        "order": graph.n,
        "vertices": graph.k,
        "arcs": len(graph.base.arcs),
        "k_omega": graph.k_omega,
        "irreps": None if irreps is None else len(irreps),
        "problems": problems,
    }
    lines = [
        f"group={graph.group.name} order={graph.n} vertices={graph.k} arcs={len(graph.base.arcs)} k_omega={graph.k_omega}"
    ]
    if irreps is not None:
        lines.append(f"irreps={len(irreps)} dims={list(irreps.dims)}")
    lines += [f"problem: {p}" for p in problems]
    lines.append("ok" if not problems else "invalid")
    emit(args, payload, lines)
    return 0 if not problems else 1


def cmd_expand(args):
    graph = load_instance(args)
    lift = expand_ordinary_lift(graph) if args.ordinary else expand_factored_lift(graph)
    summary = f"vertices={lift.n_vertices} arcs={lift.n_arcs}"
    if args.format in ("dot", "edgelist"):
        sys.stdout.write(export_lift(lift, args.format))
        print(summary, file=sys.stderr)
        return 0
    if args.check:
        problems = list(verify_free_arc_action(lift).problems)
        if not args.ordinary:
            problems += factorisation_epimorphism(expand_ordinary_lift(graph), lift).problems
    else:
        problems = []
    degrees = lift.degrees()
    payload = {
        "vertices": lift.n_vertices,
        "arcs": lift.n_arcs,
        "degrees": [int(x) for x in degrees],
        "vertex_names": [lift.vertex_name(x) for x in range(lift.n_vertices)],
        "problems": problems,
    }
    lines = [summary]
    if len(set(degrees.tolist())) == 1 and lift.n_vertices:
        lines.append(f"regular of degree {int(degrees[0])}")
    lines += [f"problem: {p}" for p in problems]
    emit(args, payload, lines)
    return 0 if not problems else 1


def cmd_spectrum(args):
    graph = load_instance(args)
    tol = args.tol or default_tol()
    payload = {"method": args.method, "tol": tol}
    lines = []
    rep = direct = None
    lift = None
    if args.method in ("rep", "both"):
        irreps = load_irrep_set(graph, args.irreps)
        report = spectrum_via_representations(graph, irreps, method=args.solver)
        rep = report.final
        payload.update(report.to_json())
        lines.append(
            f"k*n={report.assembled_size} k_omega={report.k_omega} trimmed_zeros={report.trimmed_count}"
            f" (max |value| {report.trimmed_max_abs:.3g})"
        )
        lines.append(f"spectrum (rep):    {rep!r}")
    if args.method in ("direct", "both"):
        lift = expand_factored_lift(graph)
        direct = spectrum_direct(lift)
        payload["direct_spectrum"] = direct.to_json()
        lines.append(f"spectrum (direct): {direct!r}")
    status = 0
    if args.method == "both":
        match = compare_spectra(rep, direct, tol)
        payload["match"] = {"ok": match.ok, "max_distance": fmt_float(match.max_distance), "tol": tol}
        lines.append(f"match: {'pass' if match.ok else 'FAIL'} (max distance {match.max_distance:.3g}, tol {tol:g})")
        status = 0 if match.ok else 1
    if args.moments:
        lift = lift or expand_factored_lift(graph)
        mom = moment_check(rep if rep is not None else direct, lift)
        payload["moments"] = [
            {"length": r[0], "power_sum": fmt_float(r[1]), "trace": r[2], "error": fmt_float(r[3])} for r in mom.rows
        ]
        for r in mom.rows:
            lines.append(f"moment l={r[0]}: sum={fmt(r[1])} trace={r[2]}")
        if not mom.ok:
            lines.append("moments: FAIL")
            status = 1
    emit(args, payload, lines)
    return status


def cmd_walks(args):
    graph = load_instance(args)
    irreps = load_irrep_set(graph, args.irreps)
    B = build_b_matrix(graph)
    lift = expand_factored_lift(graph) if args.oracle else None
    vertices = [graph.base.vertex_index(args.vertex)] if args.vertex is not None else range(graph.k)
    power = b_power(B, args.length)
    rows, lines, status = [], [], 0
    for u in vertices:
        name = graph.base.vertices[u]
        a = closed_walk_count(graph, u, args.length, B)
        b = closed_walk_count_via_characters(graph, irreps, u, args.length, B)
        row = {"vertex": name, "length": args.length, "b_power": a, "characters": b}
        entry = power.entry(u, u)
        row["entry"] = {graph.group.label(g): int(c) for g, c in sorted(entry.coeffs.items())}
        counts = [a, b]
        text = f"{name} l={args.length}: b_power={a} characters={b}"
        if lift is not None:
            c = oracle_closed_walk_count(lift, lift.vertex_index(u), args.length)
            row["oracle"] = c
            counts.append(c)
            text += f" oracle={c}"
        row["agree"] = len(set(counts)) == 1
        if not row["agree"]:
            status = 1
        rows.append(row)
        lines.append(text + ("" if row["agree"] else "  MISMATCH"))
        lines.append(f"  (B^{args.length})_{name}{name} = {entry!r}")
    emit(args, {"walks": rows}, lines)
    return status


def cmd_eigvecs(args):
    graph = load_instance(args)
    irreps = load_irrep_set(graph, args.irreps)
    try:
        report = full_eigvec_report(graph, irreps)
    except ResidualTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    payload = report.to_json()
    lines = []
    for e in report.entries:
        line = (
            f"{e.irrep} (d={e.dim}) lambda={fmt(e.eigenvalue)}: eigenspace={e.eigenspace_dim} "
            f"condition_C={e.c_subspace_dim}"
        )
        if args.check_independence and e.ranks:
            line += f" ranks={e.ranks}"
        lines.append(line)
    if not args.check_independence:
        for e in payload["eigenspaces"]:
            e.pop("independence_ranks")
    lines.append(f"certified {report.certified}/{report.k_omega}")
    emit(args, payload, lines)
    return 0


def cmd_selftest(args):
    from .randomgen import random_instances
    from .walks import walk_count_table

    failures = []
    for i, graph in enumerate(random_instances(args.seed, args.count)):
        irreps = builtin_irreps(graph.group)
        lift = expand_factored_lift(graph)
        report = spectrum_via_representations(graph, irreps)
        if not compare_spectra(report.final, spectrum_direct(lift), default_tol()).ok:
            failures.append((i, "spectrum"))
        if any(len(set(r[2:])) != 1 for r in walk_count_table(graph, irreps, lift, 3)):
            failures.append((i, "walks"))
        if not verify_free_arc_action(lift).ok:
            failures.append((i, "free action"))
    payload = {"seed": args.seed, "count": args.count, "failures": [list(f) for f in failures]}
    lines = [f"instance {i}: {what} FAILED" for i, what in failures]
    lines.append(f"{args.count - len({f[0] for f in failures})}/{args.count} instances passed")
    emit(args, payload, lines)
    return 0 if not failures else 1


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--irreps", default=None, help="'builtin' (default) or a representation file")

    inst = argparse.ArgumentParser(add_help=False, parents=[common])
    inst.add_argument("instance", help="instance file or bundled name (fig1, example1, example2)")

    parser = argparse.ArgumentParser(prog="factoredlift", description="Factored lifts of combined voltage graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[inst], help="check an instance")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("expand", parents=[inst], help="build the lift explicitly")
    p.add_argument("--format", choices=["edgelist", "dot", "text", "json"], default="edgelist")
    p.add_argument("--ordinary", action="store_true", help="expand the ordinary lift instead")
    p.add_argument("--check", action="store_true", help="verify the group action (text/json formats)")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("spectrum", parents=[inst], help="lift spectrum")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--method", choices=["rep", "direct", "both"], default="both")
    p.add_argument("--tol", type=positive_float, default=None)
    p.add_argument("--solver", choices=["structured", "generic"], default="structured")
    p.add_argument("--moments", action="store_true", help="compare power sums with traces of A^l")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("walks", parents=[inst], help="closed walk counts")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--vertex", default=None)
    p.add_argument("--length", type=positive_int, required=True)
    p.add_argument("--oracle", action="store_true", help="also count with powers of the lift adjacency matrix")
    p.set_defaults(func=cmd_walks)

    p = sub.add_parser("eigvecs", parents=[inst], help="lift eigenvectors of B(rho)")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--check-independence", action="store_true")
    p.set_defaults(func=cmd_eigvecs)

    p = sub.add_parser("selftest", parents=[common], help="seeded random differential checks")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=50)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    np.set_printoptions(precision=12)
    try:
        return args.func(args)
    except (FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, FactoredLiftError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
