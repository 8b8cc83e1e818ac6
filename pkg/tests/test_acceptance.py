"""Acceptance criteria, one test each.

Every test records a single ``[PASS]``/``[FAIL]`` line; the lines are printed
in the pytest terminal summary. Run standalone with
``python3 -m tests.test_acceptance``.
"""

import json
import subprocess
import sys
import time
from contextlib import redirect_stdout
from io import StringIO
from math import sqrt

import numpy as np

from factoredlift.cli import main as cli_main
from factoredlift.eigenlift import condition_C_subspace, lift_eigenvector, make_candidate
from factoredlift.groups import GroupAlgebraElement
from factoredlift.lift import expand_factored_lift
from factoredlift.randomgen import random_instances
from factoredlift.reps import builtin_irreps
from factoredlift.spectra import (
    SpectrumMultiset,
    compare_spectra,
    moment_check,
    null_space,
    spectrum_direct,
    spectrum_via_representations,
)
from factoredlift.voltage import build_b_matrix, build_b_rho, parse_voltage_graph
from factoredlift.walks import (
    b_power,
    closed_walk_count,
    closed_walk_count_via_characters,
    oracle_closed_walk_count,
)

from .conftest import ZETA, data_path
from .props import CHECKS, check_instance

RESULTS = []  # (number, title, ok, detail)

TOL = 1e-7
EX1 = [3 * (1 + sqrt(5)) / 2, (1 + sqrt(13)) / 2, 0, 0, 0, (1 - sqrt(13)) / 2, 3 * (1 - sqrt(5)) / 2, -2, -2]
EX2 = [3 + sqrt(3), 2, 3 - sqrt(3), 0, 0, -1, -1, -3, -3]


def record(number, title, ok, detail):
    RESULTS.append((number, title, bool(ok), detail))
    print(format_line(number, title, ok, detail))
    assert ok, detail


def format_line(number, title, ok, detail):
    return f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"


def load(name):
    return parse_voltage_graph(data_path(f"{name}.json"))


def _expand_json_spectrum(items):
    vals = []
    for d in items:
        vals += [d["value"]] * d["multiplicity"]
    return SpectrumMultiset(vals)


def _cli_spectrum(name):
    buf = StringIO()
    t0 = time.perf_counter()
    with redirect_stdout(buf):
        code = cli_main(["spectrum", name, "--method", "both", "--format", "json"])
    elapsed = time.perf_counter() - t0
    return code, json.loads(buf.getvalue()), elapsed


def _process_time(name):
    """Wall time of a fresh interpreter running the same command (imports included)."""
    t0 = time.perf_counter()
    subprocess.run(
        [sys.executable, "-m", "factoredlift.cli", "spectrum", name, "--method", "both"],
        capture_output=True,
        check=False,
    )
    return time.perf_counter() - t0


def _spectrum_criterion(name, expected):
    code, data, elapsed = _cli_spectrum(name)
    want = SpectrumMultiset(expected)
    rep = _expand_json_spectrum(data["spectrum"])
    direct = _expand_json_spectrum(data["direct_spectrum"])
    # the JSON carries 12 significant digits; compare the full-precision values as well
    g = load(name)
    full = spectrum_via_representations(g, builtin_irreps(g.group)).final
    d_rep = compare_spectra(full, want, TOL)
    d_json = compare_spectra(rep, want, TOL)
    d_direct = compare_spectra(spectrum_direct(expand_factored_lift(g)), want, TOL)
    ok = (
        code == 0
        and data["match"]["ok"]
        and d_rep.ok
        and d_json.ok
        and d_direct.ok
        and direct.total == 9
        and elapsed < 1.0
    )
    detail = (
        f"exit={code}, rep-vs-expected {d_rep.max_distance:.1e}, direct-vs-expected {d_direct.max_distance:.1e}, "
        f"rep-vs-direct {data['match']['max_distance']:.1e}, tol {TOL:g}, "
        f"{elapsed:.3f}s in-process, {_process_time(name):.2f}s cold process"
    )
    return ok, detail


def test_criterion_1_example1_spectrum():
    ok, detail = _spectrum_criterion("example1", EX1)
    record(1, "Example 1 spectrum, both paths", ok, detail)


def test_criterion_2_example2_spectrum():
    ok, detail = _spectrum_criterion("example2", EX2)
    record(2, "Example 2 spectrum, both paths", ok, detail)


def test_criterion_3_walk_counts():
    g = load("fig1")
    G = g.group
    irr = builtin_irreps(G)
    lift = expand_factored_lift(g)
    counts = {}
    for u in ("u", "v"):
        counts[u] = (
            closed_walk_count(g, u, 5),
            closed_walk_count_via_characters(g, irr, u, 5),
            oracle_closed_walk_count(lift, lift.vertex_index(u), 5),
        )
    P = b_power(build_b_matrix(g), 5)
    uu = GroupAlgebraElement.from_labels(G, {"g^3": 176, "g^2": 160, "g": 176, "e": 160})
    vv = GroupAlgebraElement.from_labels(G, {x: 80 for x in G.elements})
    ok = counts["u"] == (160,) * 3 and counts["v"] == (160,) * 3 and P[0, 0] == uu and P[1, 1] == vv
    record(3, "fig1 closed walks and (B^5)_uu", ok, f"n(u,5)={counts['u']}, n(v,5)={counts['v']}, (B^5)_uu={P[0, 0]!r}")


def test_criterion_4_octahedron():
    g = load("fig1")
    lift = expand_factored_lift(g)
    A = lift.adjacency
    direct = spectrum_direct(lift)
    octa = SpectrumMultiset([4, 0, 0, 0, -2, -2])
    rep = spectrum_via_representations(g, builtin_irreps(g.group))
    simple = not np.diag(A).any() and A.max() <= 1
    # K_{2,2,2}: each vertex misses exactly one other
    matching = np.all((1 - A - np.eye(6, dtype=int)).sum(axis=1) == 1)
    ok = (
        lift.n_vertices == 6
        and np.all(A.sum(axis=1) == 4)
        and simple
        and matching
        and compare_spectra(direct, octa, 1e-9).ok
        and rep.assembled_size == 8
        and rep.trimmed_count == 2
        and compare_spectra(rep.final, direct, TOL).ok
    )
    record(4, "fig1 lift is the octahedron", ok, f"|B|={rep.assembled_size}, trimmed={rep.trimmed_count}, spectrum={rep.final!r}")


def _exact(M, expected):
    M = np.asarray(M)
    R = np.rint(M.real).astype(np.int64)
    err = float(np.abs(M - R).max())
    return np.array_equal(R, expected) and err <= 1e-12, err


def test_criterion_5_intermediate_matrices():
    ex1, ex2 = load("example1"), load("example2")
    irr = builtin_irreps(ex1.group)
    r0, e0 = _exact(build_b_rho(ex1, irr[0]), [[0, 6, 0], [1, 3, 1], [0, 3, 0]])
    r1, e1 = _exact(build_b_rho(ex1, irr[1]), [[0, 0, 0], [1, 1, 1], [0, 3, 0]])
    r2, e2 = _exact(build_b_rho(ex2, irr[2]), [[-1, -1, 1, 1], [-1, -1, 1, 1], [1, 0, -1, 0], [0, 1, 0, -1]])
    record(5, "B(rho) matrices entrywise", r0 and r1 and r2, f"max distance to integers {max(e0, e1, e2):.1e}")


def test_criterion_6_eigenvector_lifting():
    ex1, ex2 = load("example1"), load("example2")
    irr = builtin_irreps(ex1.group)
    rho2 = irr[2]
    f = make_candidate(ex1, rho2, -2, [0, 0, -1, 1, 0, 0])
    lifted = lift_eigenvector(f, ex1, tol=TOL)
    Z = ZETA
    f1 = np.array([0, -1, -Z, -(Z**2), 1, Z, Z**2, 0, 0])
    f2 = np.array([0, 1, 1 / Z, 1 / Z**2, -1, -1 / Z, -1 / Z**2, 0, 0])

    def parallel(x, y):
        c = np.vdot(y, x) / np.vdot(y, y)
        return np.linalg.norm(x - c * y) <= 1e-9 * np.linalg.norm(x)

    s1, s2 = lifted.sections
    part1 = parallel(s1, f1) and parallel(s2, f2) and max(lifted.residuals) <= TOL

    sub = condition_C_subspace(rho2, null_space(build_b_rho(ex2, rho2)), ex2)
    ones = np.ones(4) / 2
    span_ok = sub.shape[1] == 1 and abs(abs(np.vdot(sub[:, 0], ones)) - 1) <= 1e-9
    lifted2 = lift_eigenvector(make_candidate(ex2, rho2, 0, sub[:, 0]), ex2, tol=TOL)
    A = expand_factored_lift(ex2).adjacency
    part2 = span_ok and len(lifted2.sections) == 2 and all(np.linalg.norm(A @ s) <= TOL for s in lifted2.sections)
    res = max(lifted.residuals + lifted2.residuals)
    record(6, "eigenvector lifting", part1 and part2, f"sections parallel={part1}, C-subspace=span(1,1,1,1): {span_ok}, max residual {res:.1e}")


def test_criterion_7_property_suite():
    t0 = time.perf_counter()
    graphs = random_instances(2024, 200, max_order=12, max_vertices=5, max_out_degree=4)
    failures = {c: [] for c in CHECKS}
    for i, g in enumerate(graphs):
        for c, ok in check_instance(g, tol=TOL, max_length=5).items():
            if not ok:
                failures[c].append(i)
    elapsed = time.perf_counter() - t0
    bounds = all(g.n <= 12 and g.k <= 5 and all(g.base.out_degree(u) <= 4 for u in range(g.k)) for g in graphs)
    bad = {c: v for c, v in failures.items() if v}
    ok = not bad and bounds and elapsed < 60
    record(7, "randomized property suite", ok, f"{len(graphs)} instances, seed 2024, failures={bad or 'none'}, {elapsed:.1f}s")


def test_criterion_8_moments():
    worst = 0.0
    ok = True
    for name in ("fig1", "example1", "example2"):
        g = load(name)
        rep = spectrum_via_representations(g, builtin_irreps(g.group))
        m = moment_check(rep.final, expand_factored_lift(g), max_length=6, tol=1e-6)
        ok &= m.ok
        worst = max([worst] + [r[3] for r in m.rows])
    record(8, "moment identity on the corpus", ok, f"max relative error {worst:.1e} for l=1..6")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            with redirect_stdout(StringIO()):
                try:
                    fn()
                except AssertionError:
                    failed += 1
    for number, title, ok, detail in RESULTS:
        print(format_line(number, title, ok, detail))
    sys.exit(1 if failed else 0)
