"""Base graphs with combined voltage assignments and their group-algebra matrices.

An undirected edge is a pair of mutually reverse arcs, a loop is a reverse
pair of arcs at the same vertex (contributing alpha + alpha^-1 to B), and a
semi-edge is a single self-reverse arc whose voltage must be an involution.
Vertices and arcs keep declaration order; all matrices are indexed by it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .errors import (
    BadReversePairing,
    FormatError,
    GroupMismatch,
    NotASubgroup,
    SemiEdgeNonInvolution,
    ValidationError,
    VoltageInverseViolation,
)
from .groups import (
    CosetSpace,
    FiniteGroup,
    GroupAlgebraElement,
    Subgroup,
    group_descriptor,
    make_group,
    subgroup_generate,
    trivial_subgroup,
)


@dataclass(frozen=True)
class Arc:
    id: str
    tail: int
    head: int


class BaseGraph:
    def __init__(self, vertices, arcs, rev):
        self.vertices = tuple(str(v) for v in vertices)
        self.arcs = tuple(arcs)
        self.rev = tuple(int(r) for r in rev)
        self._vindex = {v: i for i, v in enumerate(self.vertices)}
        if len(self._vindex) != len(self.vertices):
            raise ValidationError("duplicate vertex ids")
        if len({a.id for a in self.arcs}) != len(self.arcs):
            raise ValidationError("duplicate arc ids")
        self._check_reverse()

    def _check_reverse(self):
        m = len(self.arcs)
        if len(self.rev) != m:
            raise BadReversePairing("reverse table has the wrong length")
        for i, a in enumerate(self.arcs):
            r = self.rev[i]
            if not 0 <= r < m:
                raise BadReversePairing(f"arc {a.id}: reverse index out of range")
            if self.rev[r] != i:
                raise BadReversePairing(f"arc {a.id}: reverse of its reverse is {self.arcs[self.rev[r]].id}")
            b = self.arcs[r]
            if b.tail != a.head or b.head != a.tail:
                raise BadReversePairing(f"arc {a.id}: reverse arc {b.id} does not run head->tail")

    @property
    def k(self):
        return len(self.vertices)

    def vertex_index(self, v):
        if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
            if 0 <= v < self.k:
                return int(v)
        elif str(v) in self._vindex:
            return self._vindex[str(v)]
        raise ValidationError(f"unknown vertex {v!r}")

    def is_semi_edge(self, a):
        return self.rev[a] == a

    def out_degree(self, u):
        return sum(1 for a in self.arcs if a.tail == u)

    def arcs_between(self, u, v):
        return [i for i, a in enumerate(self.arcs) if a.tail == u and a.head == v]


class CombinedVoltageGraph:
    """A base graph together with arc voltages alpha and per-vertex subgroups omega."""

    def __init__(self, base: BaseGraph, group: FiniteGroup, alpha, omega):
        self.base = base
        self.group = group
        self.alpha = tuple(int(x) for x in alpha)
        self.omega = tuple(omega)
        if len(self.alpha) != len(base.arcs):
            raise ValidationError("one voltage per arc required")
        if len(self.omega) != base.k:
            raise ValidationError("one subgroup per vertex required")
        self._validate()

    def _validate(self):
        G = self.group
        for H in self.omega:
            if not isinstance(H, Subgroup) or not H.group.same_as(G):
                raise NotASubgroup("vertex subgroup is not a subgroup of the voltage group")
        for i, a in enumerate(self.base.arcs):
            x = self.alpha[i]
            r = self.base.rev[i]
            if r == i:
                if G.op(x, x) != 0:
                    raise SemiEdgeNonInvolution(f"semi-edge {a.id} has voltage {G.label(x)} whose square is not e")
            elif self.alpha[r] != G.inverse(x):
                raise VoltageInverseViolation(
                    f"arc {a.id} has voltage {G.label(x)} but its reverse "
                    f"{self.base.arcs[r].id} has {G.label(self.alpha[r])}"
                )

    @property
    def k(self):
        return self.base.k

    @property
    def n(self):
        return self.group.order

    @cached_property
    def coset_spaces(self):
        return tuple(CosetSpace(H) for H in self.omega)

    @property
    def k_omega(self):
        return sum(self.n // H.order for H in self.omega)

    def with_trivial_subgroups(self):
        return CombinedVoltageGraph(self.base, self.group, self.alpha, [trivial_subgroup(self.group)] * self.k)

    def to_dict(self):
        G = self.group
        verts = [{"id": v, "subgroup": H.labels()} for v, H in zip(self.base.vertices, self.omega)]
        arcs = [
            {
                "id": a.id,
                "tail": self.base.vertices[a.tail],
                "head": self.base.vertices[a.head],
                "voltage": G.label(self.alpha[i]),
                "reverse": self.base.arcs[self.base.rev[i]].id,
            }
            for i, a in enumerate(self.base.arcs)
        ]
        return {"group": group_descriptor(G), "vertices": verts, "arcs": arcs}

    def __repr__(self):
        return f"CombinedVoltageGraph(k={self.k}, arcs={len(self.base.arcs)}, group={self.group.name})"


def build_instance(group, vertices, edges=(), semi_edges=()):
    """Convenience constructor.

    ``vertices`` maps vertex id to a Subgroup, a list of generator labels, or
    None (trivial). ``edges`` holds (tail, head, voltage) triples, each becoming
    a reverse arc pair (a loop when tail == head); ``semi_edges`` holds
    (vertex, voltage) pairs.
    """
    G = make_group(group)
    ids = list(vertices)
    index = {v: i for i, v in enumerate(ids)}
    omega = []
    for v in ids:
        H = vertices[v]
        if H is None:
            H = trivial_subgroup(G)
        elif not isinstance(H, Subgroup):
            H = subgroup_generate(G, H)
        omega.append(H)
    arcs, rev, alpha = [], [], []
    for j, (t, h, x) in enumerate(edges):
        g = G.index(x)
        i = len(arcs)
        arcs.append(Arc(f"e{j}", index[t], index[h]))
        arcs.append(Arc(f"e{j}'", index[h], index[t]))
        rev += [i + 1, i]
        alpha += [g, G.inverse(g)]
    for j, (v, x) in enumerate(semi_edges):
        rev.append(len(arcs))
        arcs.append(Arc(f"s{j}", index[v], index[v]))
        alpha.append(G.index(x))
    return CombinedVoltageGraph(BaseGraph(ids, arcs, rev), G, alpha, omega)


def parse_voltage_graph(source):
    """Read an instance (path, JSON text, or already-parsed dict) and validate it."""
    if isinstance(source, dict):
        data = source
    else:
        text = str(source)
        if text.lstrip().startswith("{"):
            data = _loads(text, "<string>")
        else:
            with open(text) as fh:
                data = _loads(fh.read(), text)
    if not isinstance(data, dict):
        raise FormatError("instance must be a JSON object")
    for key in ("group", "vertices", "arcs"):
        if key not in data:
            raise FormatError(f"instance is missing {key!r}")
    G = make_group(data["group"])

    vids, omega = [], []
    for v in data["vertices"]:
        if not isinstance(v, dict) or "id" not in v:
            raise FormatError("each vertex needs an 'id'")
        vids.append(str(v["id"]))
        if "generators" in v:
            omega.append(subgroup_generate(G, v["generators"]))
        else:
            omega.append(Subgroup.from_elements(G, v.get("subgroup") or ["e"]))
    vindex = {v: i for i, v in enumerate(vids)}
    if len(vindex) != len(vids):
        raise ValidationError("duplicate vertex ids")

    raw = data["arcs"]
    aindex = {}
    for i, a in enumerate(raw):
        if not isinstance(a, dict):
            raise FormatError("each arc must be an object")
        for key in ("id", "tail", "head", "voltage", "reverse"):
            if key not in a:
                raise FormatError(f"arc {a.get('id', i)!r} is missing {key!r}")
        if str(a["id"]) in aindex:
            raise ValidationError(f"duplicate arc id {a['id']!r}")
        aindex[str(a["id"])] = i
    arcs, rev, alpha = [], [], []
    for a in raw:
        for end in ("tail", "head"):
            if str(a[end]) not in vindex:
                raise ValidationError(f"arc {a['id']!r}: unknown {end} vertex {a[end]!r}")
        if str(a["reverse"]) not in aindex:
            raise BadReversePairing(f"arc {a['id']!r}: reverse arc {a['reverse']!r} does not exist")
        arcs.append(Arc(str(a["id"]), vindex[str(a["tail"])], vindex[str(a["head"])]))
        rev.append(aindex[str(a["reverse"])])
        alpha.append(G.index(a["voltage"]))
    base = BaseGraph(vids, arcs, rev)
    return CombinedVoltageGraph(base, G, alpha, omega)


def _loads(text, where):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{where}: {exc}") from None


def dump_voltage_graph(graph, path=None):
    text = json.dumps(graph.to_dict(), indent=2)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text


class BMatrix:
    """k x k matrix over the group algebra, stored densely as a (k, k, n) coefficient array."""

    def __init__(self, group, coeffs):
        self.group = group
        self.coeffs = np.asarray(coeffs)
        if self.coeffs.ndim != 3 or self.coeffs.shape[0] != self.coeffs.shape[1] or self.coeffs.shape[2] != group.order:
            raise ValueError(f"bad coefficient array of shape {self.coeffs.shape}")

    @property
    def k(self):
        return self.coeffs.shape[0]

    def entry(self, u, v):
        return GroupAlgebraElement.from_dense(self.group, self.coeffs[u, v])

    def __getitem__(self, uv):
        return self.entry(*uv)

    def __matmul__(self, other):
        if not self.group.same_as(other.group):
            raise GroupMismatch("B matrices over different groups")
        return BMatrix(self.group, kernels.ga_matmul(self.coeffs, other.coeffs, self.group.mult))

    def __eq__(self, other):
        return isinstance(other, BMatrix) and self.group.same_as(other.group) and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None

    @classmethod
    def identity(cls, group, k):
        c = np.zeros((k, k, group.order), dtype=np.int64)
        c[np.arange(k), np.arange(k), 0] = 1
        return cls(group, c)

    def __repr__(self):
        rows = []
        for u in range(self.k):
            rows.append("[" + ", ".join(repr(self.entry(u, v)) for v in range(self.k)) + "]")
        return "BMatrix(" + ",\n        ".join(rows) + ")"


def voltage_sums(graph):
    """(k, k, n) array whose (u, v) entry is sum of alpha(a) over arcs u -> v."""
    S = np.zeros((graph.k, graph.k, graph.n), dtype=np.int64)
    for i, a in enumerate(graph.base.arcs):
        S[a.tail, a.head, graph.alpha[i]] += 1
    return S


def build_b_matrix(graph):
    """B[u, v] = G_u^+ * sum of alpha(a) over arcs u -> v."""
    k, n = graph.k, graph.n
    left = np.zeros((k, k, n), dtype=np.int64)
    for u, H in enumerate(graph.omega):
        left[u, u, list(H.elements)] = 1
    return BMatrix(graph.group, kernels.ga_matmul(left, voltage_sums(graph), graph.group.mult))


def build_b_rho(graph, rho):
    """The dk x dk block matrix with (u, v) block rho(G_u) * sum of rho(alpha(a)) over arcs u -> v."""
    if not rho.group.same_as(graph.group):
        raise GroupMismatch("representation is over a different group")
    d, k = rho.dim, graph.k
    M = np.zeros((k, k, d, d), dtype=complex)
    for i, a in enumerate(graph.base.arcs):
        M[a.tail, a.head] += rho.matrices[graph.alpha[i]]
    out = np.zeros((k, d, k, d), dtype=complex)
    for u, H in enumerate(graph.omega):
        P = rho.restrict_sum(H.elements)
        out[u] = np.einsum("ij,vjk->ivk", P, M[u])
    return out.reshape(k * d, k * d)


def apply_representation(B, rho):
    """Entrywise image of a group-algebra matrix under rho (second route to B(rho))."""
    if not rho.group.same_as(B.group):
        raise GroupMismatch("representation is over a different group")
    k, d = B.k, rho.dim
    blocks = np.einsum("uvg,gij->uivj", B.coeffs.astype(complex), rho.matrices)
    return blocks.reshape(k * d, k * d)
