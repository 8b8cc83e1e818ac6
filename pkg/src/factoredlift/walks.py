"""Closed walks in factored lifts: group-algebra powers, characters, walk lifting, and an adjacency oracle.

Counts are exact integers throughout; the character route rounds once at the
end. Length-0 walks are rejected by the formula-based counters because the
formula gives |G_u| there while the true count is 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import BadWalk, NonRealResult, NotCompleteIrrepSet, ZeroLengthUnsupported
from .reps import character_of_algebra_element
from .voltage import BMatrix, build_b_matrix

IMAG_TOL = 1e-8


@dataclass(frozen=True)
class WalkSpec:
    arcs: tuple
    root: int

    @property
    def length(self):
        return len(self.arcs)


@dataclass(frozen=True)
class LiftedWalk:
    arcs: tuple  # (base arc index, group element index)
    choices: tuple  # g_j in omega(v_j)


def make_walk(graph, arcs, root=None):
    """Validate a base walk given by arc ids or indices."""
    base = graph.base
    ids = {a.id: i for i, a in enumerate(base.arcs)}
    idx = []
    for a in arcs:
        if isinstance(a, str):
            if a not in ids:
                raise BadWalk(f"unknown arc {a!r}")
            idx.append(ids[a])
        else:
            if not 0 <= int(a) < len(base.arcs):
                raise BadWalk(f"arc index {a} out of range")
            idx.append(int(a))
    if root is None:
        if not idx:
            raise BadWalk("empty walk needs an explicit root")
        root = base.arcs[idx[0]].tail
    root = base.vertex_index(root)
    at = root
    for i in idx:
        a = base.arcs[i]
        if a.tail != at:
            raise BadWalk(f"arc {a.id} starts at {base.vertices[a.tail]}, walk is at {base.vertices[at]}")
        at = a.head
    return WalkSpec(tuple(idx), root)


def enumerate_walk_lifts(graph, walk):
    """All lifts of ``walk`` starting at (v_1, G_{v_1}): one per choice g_j in omega(v_j)."""
    if not isinstance(walk, WalkSpec):
        walk = make_walk(graph, walk)
    G = graph.group
    base = graph.base
    tails = [base.arcs[a].tail for a in walk.arcs]
    if tails and tails[0] != walk.root:
        raise BadWalk("walk does not start at its root")
    pools = [graph.omega[v].elements for v in tails]
    out = []
    for choice in itertools.product(*pools):
        h = 0
        steps = []
        for a, g in zip(walk.arcs, choice):
            hg = G.op(h, g)
            steps.append((a, hg))
            h = G.op(hg, graph.alpha[a])
        out.append(LiftedWalk(tuple(steps), tuple(choice)))
    return out


def b_power(B, length):
    """B^length over the group algebra (B^0 is the identity)."""
    if length < 0:
        raise ValueError("power must be non-negative")
    result = BMatrix.identity(B.group, B.k)
    base = B
    e = int(length)
    while e:
        if e & 1:
            result = result @ base
        e >>= 1
        if e:
            base = base @ base
    return result


def _check_length(length):
    if length == 0:
        raise ZeroLengthUnsupported("closed-walk formulas need length >= 1")
    if length < 0:
        raise ValueError("walk length must be positive")


def closed_walk_count(graph, u, length, B=None):
    """|G_u| times the identity coefficient of (B^length)_{uu}."""
    _check_length(length)
    u = graph.base.vertex_index(u)
    B = build_b_matrix(graph) if B is None else B
    coef = b_power(B, length).coeffs[u, u, 0]
    return graph.omega[u].order * int(coef)


def closed_walk_count_via_characters(graph, irreps, u, length, B=None):
    """|G_u| (1/n) sum_r d_r chi_r((B^length)_{uu})."""
    _check_length(length)
    if not irreps.is_complete():
        raise NotCompleteIrrepSet("character formula needs a complete set of irreducible representations")
    u = graph.base.vertex_index(u)
    B = build_b_matrix(graph) if B is None else B
    x = b_power(B, length).entry(u, u)
    total = sum(r.dim * character_of_algebra_element(r, x) for r in irreps)
    value = graph.omega[u].order * total / graph.n
    scale = max(1.0, abs(value))
    if abs(value.imag) > IMAG_TOL * scale:
        raise NonRealResult(f"character sum has imaginary part {value.imag:.3g}")
    return int(round(value.real))


def integer_matrix_power(A, length):
    """Exact power of a non-negative integer matrix (object dtype when int64 could overflow)."""
    A = np.asarray(A)
    N = A.shape[0]
    if length == 0:
        return np.eye(N, dtype=np.int64)
    bound = int(A.sum(axis=1).max(initial=0)) if N else 0
    if bound > 1 and length * np.log2(bound) >= 62:
        A = A.astype(object)
    return np.linalg.matrix_power(A, length) if A.dtype != object else _object_power(A, length)


def _object_power(A, length):
    out = np.identity(A.shape[0], dtype=np.int64).astype(object)
    base = A
    while length:
        if length & 1:
            out = out.dot(base)
        length >>= 1
        if length:
            base = base.dot(base)
    return out


def oracle_closed_walk_count(lift, vertex, length):
    """Diagonal entry of A^length for the lift adjacency matrix."""
    if length < 0:
        raise ValueError("walk length must be non-negative")
    P = integer_matrix_power(lift.adjacency, length)
    return int(P[vertex, vertex])


def walk_count_table(graph, irreps, lift, max_length):
    """Rows (u, length, formula, characters, oracle) for every base vertex."""
    B = build_b_matrix(graph)
    rows = []
    for length in range(1, max_length + 1):
        for u in range(graph.k):
            rows.append(
                (
                    u,
                    length,
                    closed_walk_count(graph, u, length, B),
                    closed_walk_count_via_characters(graph, irreps, u, length, B),
                    oracle_closed_walk_count(lift, lift.vertex_index(u), length),
                )
            )
    return rows


def fibre_weighted_trace(graph, length, B=None):
    """Sum over base vertices of [G : G_u] * n(u, length); equals tr(A^length) of the lift."""
    B = build_b_matrix(graph) if B is None else B
    return sum(graph.omega[u].index * closed_walk_count(graph, u, length, B) for u in range(graph.k))
