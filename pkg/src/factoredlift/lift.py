"""Explicit factored and ordinary lifts, the factorisation map, and the free arc action check."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import UnknownFormat, ValidationError


class FactoredLift:
    """The lift graph on pairs (u, coset index) with arcs (a, h).

    Lift vertices are ordered by base vertex, then coset index; the lift arc
    (a, h) has index ``a * n + h``. Arc (a, h) runs from (u, h G_u) to
    (v, h alpha(a) G_v) and its reverse is (rev(a), h alpha(a)).
    """

    def __init__(self, graph, ordinary=False):
        G = graph.group
        n = G.order
        self.graph = graph
        self.ordinary = ordinary
        spaces = graph.coset_spaces
        sizes = [len(cs) for cs in spaces]
        self.offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
        self.vertices = tuple((u, c) for u, s in enumerate(sizes) for c in range(s))

        base = graph.base
        m = len(base.arcs)
        h = np.arange(n)
        tail = np.empty(m * n, dtype=np.int64)
        head = np.empty(m * n, dtype=np.int64)
        rev = np.empty(m * n, dtype=np.int64)
        for i, a in enumerate(base.arcs):
            end = G.mult[:, graph.alpha[i]]  # h * alpha(a)
            sl = slice(i * n, (i + 1) * n)
            tail[sl] = self.offsets[a.tail] + spaces[a.tail].coset_of[h]
            head[sl] = self.offsets[a.head] + spaces[a.head].coset_of[end]
            rev[sl] = base.rev[i] * n + end
        for arr in (tail, head, rev):
            arr.setflags(write=False)
        self.tail, self.head, self.rev = tail, head, rev
        self.arc_base = np.repeat(np.arange(m), n)
        self.arc_element = np.tile(h, m)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_arcs(self):
        return len(self.tail)

    def vertex_index(self, u, coset=0):
        u = self.graph.base.vertex_index(u)
        if not 0 <= coset < self.offsets[u + 1] - self.offsets[u]:
            raise ValidationError(f"coset index {coset} out of range for vertex {self.graph.base.vertices[u]}")
        return int(self.offsets[u] + coset)

    def fibre(self, u):
        u = self.graph.base.vertex_index(u)
        return range(int(self.offsets[u]), int(self.offsets[u + 1]))

    def vertex_name(self, x):
        u, c = self.vertices[x]
        return f"{self.graph.base.vertices[u]}@{c}"

    def arc_label(self, i):
        G = self.graph.group
        return (self.graph.base.arcs[self.arc_base[i]].id, G.label(int(self.arc_element[i])))

    @cached_property
    def adjacency(self):
        return adjacency_matrix(self)

    def degrees(self):
        return np.bincount(self.tail, minlength=self.n_vertices)

    def __repr__(self):
        kind = "OrdinaryLift" if self.ordinary else "FactoredLift"
        return f"{kind}(vertices={self.n_vertices}, arcs={self.n_arcs})"


OrdinaryLift = FactoredLift


def expand_factored_lift(graph):
    return FactoredLift(graph)


def expand_ordinary_lift(graph):
    """Lift with every vertex subgroup replaced by the trivial one."""
    return FactoredLift(graph.with_trivial_subgroups(), ordinary=True)


def adjacency_matrix(lift):
    """Integer matrix whose (x, y) entry counts the lift arcs from x to y."""
    N = lift.n_vertices
    A = np.zeros((N, N), dtype=np.int64)
    np.add.at(A, (lift.tail, lift.head), 1)
    return A


@dataclass
class EpimorphismReport:
    vertex_map: np.ndarray
    fibre_sizes: np.ndarray
    expected_fibre_sizes: np.ndarray
    problems: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.problems


def factorisation_epimorphism(ordinary, factored):
    """Map (u, h) -> (u, h G_u) and check it carries arc (a, h) onto arc (a, h)."""
    g_ord, g_fac = ordinary.graph, factored.graph
    problems = []
    if g_ord.base is not g_fac.base or g_ord.alpha != g_fac.alpha or not g_ord.group.same_as(g_fac.group):
        problems.append("lifts come from different base graphs or voltages")
    n = g_fac.n
    vmap = np.empty(ordinary.n_vertices, dtype=np.int64)
    expected = np.empty(factored.n_vertices, dtype=np.int64)
    for u, H in enumerate(g_fac.omega):
        if ordinary.offsets[u + 1] - ordinary.offsets[u] != n:
            problems.append(f"ordinary lift fibre of vertex {u} does not have |G| vertices")
            continue
        # in the ordinary lift the coset index of (u, h) is h itself
        cs = g_fac.coset_spaces[u]
        vmap[ordinary.offsets[u] : ordinary.offsets[u + 1]] = factored.offsets[u] + cs.coset_of
        expected[factored.offsets[u] : factored.offsets[u + 1]] = H.order
    if problems:
        return EpimorphismReport(vmap, np.zeros(0, dtype=np.int64), expected, problems)
    if not np.array_equal(factored.tail, vmap[ordinary.tail]):
        problems.append("tails are not preserved")
    if not np.array_equal(factored.head, vmap[ordinary.head]):
        problems.append("heads are not preserved")
    if not np.array_equal(factored.rev, ordinary.rev):
        problems.append("arc reversal is not preserved")
    sizes = np.bincount(vmap, minlength=factored.n_vertices)
    if not np.array_equal(sizes, expected):
        problems.append("fibre sizes differ from |G_u|")
    return EpimorphismReport(vmap, sizes, expected, problems)


@dataclass
class FreeActionReport:
    stabilisers: list
    orbit_count: int
    arc_orbit_count: int
    problems: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.problems


def left_action(lift, g):
    """Vertex and arc permutations induced by left multiplication with g."""
    graph = lift.graph
    G = graph.group
    n = G.order
    vperm = np.empty(lift.n_vertices, dtype=np.int64)
    for u, cs in enumerate(graph.coset_spaces):
        reps = np.array(cs.representatives, dtype=np.int64)
        vperm[lift.offsets[u] : lift.offsets[u + 1]] = lift.offsets[u] + cs.coset_of[G.mult[g, reps]]
    aperm = lift.arc_base * n + G.mult[g, lift.arc_element]
    return vperm, aperm


def verify_free_arc_action(lift):
    """Check that G acts by automorphisms, freely on arcs, transitively on fibres,
    with stabiliser G_u at (u, G_u)."""
    graph = lift.graph
    G = graph.group
    problems = []
    images_of_root = {u: set() for u in range(graph.k)}
    stab = {u: [] for u in range(graph.k)}
    N = lift.n_vertices
    for g in range(G.order):
        vperm, aperm = left_action(lift, g)
        if g != 0:
            if np.unique(vperm).size != N:
                problems.append(f"{G.label(g)} does not permute the vertices")
            if not np.array_equal(lift.tail[aperm], vperm[lift.tail]) or not np.array_equal(
                lift.head[aperm], vperm[lift.head]
            ):
                problems.append(f"{G.label(g)} does not preserve incidence")
            if not np.array_equal(lift.rev[aperm], aperm[lift.rev]):
                problems.append(f"{G.label(g)} does not commute with arc reversal")
            fixed = np.flatnonzero(aperm == np.arange(lift.n_arcs))
            if fixed.size:
                problems.append(f"{G.label(g)} fixes {fixed.size} arcs")
        for u in range(graph.k):
            root = int(lift.offsets[u])
            images_of_root[u].add(int(vperm[root]))
            if vperm[root] == root:
                stab[u].append(g)
    for u in range(graph.k):
        if images_of_root[u] != set(lift.fibre(u)):
            problems.append(f"action is not transitive on the fibre of {graph.base.vertices[u]}")
        if tuple(stab[u]) != graph.omega[u].elements:
            problems.append(f"stabiliser of ({graph.base.vertices[u]}, G_u) differs from G_u")
    orbit_count = sum(1 for u in range(graph.k) if images_of_root[u])
    arc_orbits = lift.n_arcs // G.order if not problems else -1
    return FreeActionReport([tuple(s) for s in stab.values()], orbit_count, arc_orbits, problems)


def edges(lift):
    """Each undirected edge once: (tail, head, is_semi_edge) for arcs with rev >= index."""
    out = []
    for i in range(lift.n_arcs):
        r = int(lift.rev[i])
        if r >= i:
            out.append((int(lift.tail[i]), int(lift.head[i]), r == i))
    return out


def export_lift(lift, fmt="edgelist"):
    """Deterministic text serialisation; vertices are named ``baseId@cosetIndex``."""
    es = edges(lift)
    names = [lift.vertex_name(x) for x in range(lift.n_vertices)]
    if fmt == "edgelist":
        lines = [f"# vertices={lift.n_vertices} edges={len(es)} arcs={lift.n_arcs}"]
        for t, h, semi in es:
            lines.append(f"{names[t]} {names[h]}" + (" semi" if semi else ""))
        return "\n".join(lines) + "\n"
    if fmt == "dot":
        lines = ["graph factored_lift {"]
        lines += [f'  "{x}";' for x in names]
        for t, h, semi in es:
            attr = " [style=dashed]" if semi else ""
            lines.append(f'  "{names[t]}" -- "{names[h]}"{attr};')
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise UnknownFormat(f"unknown export format {fmt!r} (expected 'dot' or 'edgelist')")
