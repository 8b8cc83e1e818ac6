"""Seeded random combined voltage graphs for differential self-tests."""

import numpy as np

from .groups import cyclic_group, dihedral_group, direct_product, subgroup_generate
from .voltage import build_instance


def small_groups(max_order=12):
    groups = [cyclic_group(n) for n in range(1, max_order + 1)]
    groups += [dihedral_group(n) for n in range(1, max_order // 2 + 1)]
    for parts in ((2, 2), (2, 3), (2, 4), (3, 3), (2, 6), (3, 4), (2, 2, 2), (2, 2, 3)):
        if int(np.prod(parts)) <= max_order:
            groups.append(direct_product([cyclic_group(p) for p in parts]))
    if max_order >= 12:
        groups.append(direct_product([cyclic_group(2), dihedral_group(3)]))
    return groups


def random_instance(rng, max_order=12, max_vertices=5, max_out_degree=4, groups=None):
    """Random instance with |G| <= max_order, k <= max_vertices and at most
    ``max_out_degree`` arcs leaving each vertex."""
    if groups is None:
        groups = small_groups(max_order)
    G = groups[rng.integers(len(groups))]
    n = G.order
    k = int(rng.integers(1, max_vertices + 1))
    names = [f"v{i}" for i in range(k)]
    vertices = {}
    for v in names:
        ngens = int(rng.choice([0, 1, 1, 2]))
        vertices[v] = subgroup_generate(G, [int(x) for x in rng.integers(0, n, size=ngens)])
    involutions = [g for g in range(n) if G.op(g, g) == 0]

    out = dict.fromkeys(names, 0)
    edges, semis = [], []
    for _ in range(int(rng.integers(0, 2 * max_out_degree * k + 1))):
        kind = rng.choice(["edge", "edge", "loop", "semi"])
        u = names[rng.integers(k)]
        if kind == "edge" and k > 1:
            v = names[rng.integers(k)]
            if v != u and out[u] < max_out_degree and out[v] < max_out_degree:
                edges.append((u, v, int(rng.integers(n))))
                out[u] += 1
                out[v] += 1
        elif kind == "loop" and out[u] + 2 <= max_out_degree:
            edges.append((u, u, int(rng.integers(n))))
            out[u] += 2
        elif kind == "semi" and out[u] < max_out_degree:
            semis.append((u, involutions[rng.integers(len(involutions))]))
            out[u] += 1
    return build_instance(G, vertices, edges, semis)


def random_instances(seed, count, **kwargs):
    rng = np.random.default_rng(seed)
    groups = small_groups(kwargs.pop("max_order", 12))
    return [random_instance(rng, groups=groups, **kwargs) for _ in range(count)]
