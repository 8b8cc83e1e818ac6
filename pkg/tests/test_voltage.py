import json

import numpy as np
import pytest

from factoredlift.errors import (
    BadReversePairing,
    FormatError,
    GroupMismatch,
    NotASubgroup,
    SemiEdgeNonInvolution,
    UnknownElementLabel,
    VoltageInverseViolation,
)
from factoredlift.groups import GroupAlgebraElement, cyclic_group, subgroup_sum
from factoredlift.randomgen import random_instances
from factoredlift.reps import builtin_irreps, irreps_cyclic
from factoredlift.voltage import (
    BMatrix,
    apply_representation,
    build_b_matrix,
    build_b_rho,
    build_instance,
    dump_voltage_graph,
    parse_voltage_graph,
    voltage_sums,
)

from .conftest import ZETA, data_path


def elem(G, mapping):
    return GroupAlgebraElement.from_labels(G, mapping)


def load(name):
    with open(data_path(f"{name}.json")) as fh:
        return json.load(fh)


def test_fig1_parses_and_matches_b(fig1):
    G = fig1.group
    assert fig1.base.vertices == ("u", "v")
    assert fig1.omega[1].labels() == ["e", "g^2"]
    B = build_b_matrix(fig1)
    assert B[0, 0] == elem(G, {"g": 1, "g^3": 1})
    assert B[0, 1] == elem(G, {"e": 1, "g": 1})
    # (e + g^2)(e + g^-1) = e + g + g^-1 + g^2
    assert B[1, 0] == elem(G, {"e": 1, "g": 1, "g^2": 1, "g^3": 1})
    assert B[1, 0] == subgroup_sum(fig1.omega[1]) * elem(G, {"e": 1, "g^-1": 1})
    assert B[1, 1] == 0


def test_example2_b_matrix(ex2):
    G = ex2.group
    B = build_b_matrix(ex2)
    eb = elem(G, {"e": 1, "b": 1})
    assert B[0, 0] == eb * elem(G, {"a": 1, "a^-1": 1})
    assert B[0, 1] == eb
    assert B[1, 0] == elem(G, {"e": 1})
    assert B[1, 1] == elem(G, {"a": 1, "a^2": 1})


def test_example1_b_matrix_includes_subgroup_factors(ex1):
    G = ex1.group
    B = build_b_matrix(ex1)
    whole = elem(G, {x: 1 for x in G.elements})
    assert B[0, 1] == whole
    assert B[1, 1] == elem(G, {"a": 1, "a^2": 1, "b": 1})
    assert B[2, 1] == elem(G, {"e": 1, "a": 1, "a^2": 1})
    assert B[0, 2] == 0 and B[0, 0] == 0 and B[2, 2] == 0


def test_b_rho_example1(ex1, d3_irreps):
    assert np.array_equal(build_b_rho(ex1, d3_irreps[0]), [[0, 6, 0], [1, 3, 1], [0, 3, 0]])
    assert np.array_equal(build_b_rho(ex1, d3_irreps[1]), [[0, 0, 0], [1, 1, 1], [0, 3, 0]])
    s = sum(ZETA**i for i in range(3))
    t = ZETA + ZETA**-1
    expected = np.array(
        [
            [0, 0, s, s, 0, 0],
            [0, 0, s.conjugate(), s.conjugate(), 0, 0],
            [1, 0, t, 1, 1, 0],
            [0, 1, 1, t, 0, 1],
            [0, 0, s, 0, 0, 0],
            [0, 0, 0, s.conjugate(), 0, 0],
        ]
    )
    assert np.allclose(build_b_rho(ex1, d3_irreps[2]), expected, atol=1e-12)


def test_b_rho_example2(ex2, d3_irreps):
    assert np.array_equal(build_b_rho(ex2, d3_irreps[0]), [[4, 2], [1, 2]])
    assert np.array_equal(build_b_rho(ex2, d3_irreps[1]), [[0, 0], [1, 2]])
    B2 = build_b_rho(ex2, d3_irreps[2])
    expected = [[-1, -1, 1, 1], [-1, -1, 1, 1], [1, 0, -1, 0], [0, 1, 0, -1]]
    assert np.allclose(B2, expected, atol=1e-12)
    assert np.array_equal(np.rint(B2.real).astype(int), expected)


def test_b_rho_group_mismatch(ex2, fig1):
    with pytest.raises(GroupMismatch):
        build_b_rho(ex2, irreps_cyclic(fig1.group)[1])


def test_two_routes_to_b_rho(fig1, ex1, ex2):
    for graph in (fig1, ex1, ex2, *random_instances(5, 40)):
        B = build_b_matrix(graph)
        for rho in builtin_irreps(graph.group):
            assert np.allclose(build_b_rho(graph, rho), apply_representation(B, rho), atol=1e-12)


def test_b_matrix_invariants():
    for graph in random_instances(6, 40):
        B = build_b_matrix(graph)
        S = voltage_sums(graph)
        counts = S.sum(axis=2)
        for u, H in enumerate(graph.omega):
            left = subgroup_sum(H)
            for v in range(graph.k):
                x = B[u, v]
                assert (x == 0) == (counts[u, v] == 0)
                assert all(isinstance(c, int) and c > 0 for c in x.coeffs.values())
                assert x.coefficient_sum() == H.order * counts[u, v]
                # row u lies in G_u^+ C[G]: left multiplication by h in G_u fixes it
                for h in H.elements:
                    assert GroupAlgebraElement.delta(graph.group, h) * x == x
                assert x == left * GroupAlgebraElement.from_dense(graph.group, S[u, v])
        B0 = build_b_rho(graph, builtin_irreps(graph.group)[0]).real
        assert np.all(B0 >= 0)
        degrees = [H.order * graph.base.out_degree(u) for u, H in enumerate(graph.omega)]
        assert np.allclose(B0.sum(axis=1), degrees)


def test_bmatrix_product_and_identity(fig1):
    B = build_b_matrix(fig1)
    I = BMatrix.identity(fig1.group, fig1.k)
    assert I @ B == B and B @ I == B
    B2 = B @ B
    manual = B[0, 0] * B[0, 0] + B[0, 1] * B[1, 0]
    assert B2[0, 0] == manual


# parsing


def test_dump_parse_roundtrip(ex1, tmp_path):
    path = tmp_path / "x.json"
    dump_voltage_graph(ex1, path)
    again = parse_voltage_graph(str(path))
    assert again.alpha == ex1.alpha and again.base.rev == ex1.base.rev
    assert [H.elements for H in again.omega] == [H.elements for H in ex1.omega]
    assert parse_voltage_graph(dump_voltage_graph(ex1)).k_omega == 9


def test_generators_key():
    data = load("fig1")
    data["vertices"][1] = {"id": "v", "generators": ["g^2"]}
    g = parse_voltage_graph(data)
    assert g.omega[1].labels() == ["e", "g^2"]


def test_voltage_inverse_violation():
    data = load("fig1")
    # edge u -> v with voltage g whose reverse also carries g
    for a in data["arcs"]:
        if a["id"] == "y'":
            a["voltage"] = "g^1"
    with pytest.raises(VoltageInverseViolation):
        parse_voltage_graph(data)


def test_semi_edge_must_be_involution():
    with pytest.raises(SemiEdgeNonInvolution):
        build_instance("dihedral(3)", {"v": None}, semi_edges=[("v", "a")])
    g = build_instance("dihedral(3)", {"v": None}, semi_edges=[("v", "b")])
    assert build_b_matrix(g)[0, 0] == elem(g.group, {"b": 1})


def test_bad_reverse_pairing():
    data = load("example2")
    data["arcs"][2]["reverse"] = "loopv"
    with pytest.raises(BadReversePairing):
        parse_voltage_graph(data)
    data = load("example2")
    data["arcs"][2]["reverse"] = "nope"
    with pytest.raises(BadReversePairing):
        parse_voltage_graph(data)
    data = load("example2")
    # a non-loop arc cannot be its own reverse
    data["arcs"][2]["reverse"] = "uv"
    with pytest.raises(BadReversePairing):
        parse_voltage_graph(data)


def test_not_a_subgroup():
    data = load("example2")
    data["vertices"][0]["subgroup"] = ["e", "a"]
    with pytest.raises(NotASubgroup):
        parse_voltage_graph(data)


def test_unknown_label():
    data = load("example2")
    data["arcs"][0]["voltage"] = "c"
    with pytest.raises(UnknownElementLabel):
        parse_voltage_graph(data)


def test_format_errors(tmp_path):
    with pytest.raises(FormatError):
        parse_voltage_graph("{not json")
    with pytest.raises(FormatError):
        parse_voltage_graph({"group": "cyclic(3)", "vertices": []})
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    with pytest.raises(FormatError):
        parse_voltage_graph(str(bad))
    with pytest.raises(OSError):
        parse_voltage_graph(str(tmp_path / "missing.json"))


def test_no_arcs_zero_entries():
    g = build_instance(cyclic_group(3), {"u": None, "v": ["g"]})
    B = build_b_matrix(g)
    assert all(B[u, v] == 0 for u in range(2) for v in range(2))
