"""Complex representations of finite groups: built-in irreducible families and validated tables.

Irreducible sets are validated by characters only: every character must have
norm 1 and distinct characters must be orthogonal under
``<chi, psi> = (1/n) sum_g chi(g) conj(psi(g))``. Two sets that differ by a
change of basis in some irrep are equally acceptable; everything downstream
(spectra, walk counts) is invariant under such similarity transforms.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DuplicateRep,
    FormatError,
    GroupMismatch,
    IncompleteSet,
    NotHomomorphism,
    NotIrreducible,
    WrongFamily,
)
from .groups import FiniteGroup, GroupAlgebraElement, Subgroup

CHAR_TOL = 1e-9
RANK_TOL = 1e-9


class Representation:
    """Matrices rho(g) for every element g, stored as an (n, d, d) complex array."""

    def __init__(self, group: FiniteGroup, matrices, name=None, check=True):
        mats = np.array(matrices, dtype=np.complex128)
        if mats.ndim != 3 or mats.shape[0] != group.order or mats.shape[1] != mats.shape[2]:
            raise FormatError(f"expected {group.order} square matrices, got array of shape {mats.shape}")
        mats.setflags(write=False)
        self.group = group
        self.matrices = mats
        self.name = name
        if check:
            self.check_homomorphism()

    @property
    def dim(self):
        return self.matrices.shape[1]

    @property
    def character(self):
        return np.trace(self.matrices, axis1=1, axis2=2)

    def __call__(self, g):
        return self.matrices[self.group.index(g)]

    def __repr__(self):
        return f"Representation({self.name or '?'}, dim={self.dim}, group={self.group.name})"

    def check_homomorphism(self, tol=CHAR_TOL):
        G, R = self.group, self.matrices
        d = self.dim
        if not np.allclose(R[0], np.eye(d), atol=tol):
            raise NotHomomorphism(f"{self.name or 'rep'}: rho(e) is not the identity")
        scale = max(1.0, float(np.abs(R).max()))
        for g in range(G.order):
            # rho(g) rho(h) == rho(gh) for all h at once
            lhs = np.matmul(R[g], R)
            rhs = R[G.mult[g]]
            err = np.abs(lhs - rhs).max()
            if err > tol * scale * scale * d:
                h = int(np.argmax(np.abs(lhs - rhs).reshape(G.order, -1).max(axis=1)))
                raise NotHomomorphism(
                    f"{self.name or 'rep'}: rho({G.label(g)})rho({G.label(h)}) != rho({G.label(G.op(g, h))})"
                    f" (error {err:.3g})"
                )

    def restrict_sum(self, elements):
        return self.matrices[list(elements)].sum(axis=0)


def inner_product(chi, psi):
    return complex(np.vdot(psi, chi)) / len(chi)


class IrrepSet:
    """A complete list of pairwise inequivalent irreducible representations, trivial one first."""

    def __init__(self, group, reps, check=True):
        self.group = group
        reps = list(reps)
        for r in reps:
            if not r.group.same_as(group):
                raise GroupMismatch("representation over a different group")
        triv = [i for i, r in enumerate(reps) if r.dim == 1 and np.allclose(r.matrices[:, 0, 0], 1, atol=CHAR_TOL)]
        if triv and triv[0] != 0:
            i = triv[0]
            reps.insert(0, reps.pop(i))
        self.reps = tuple(reps)
        if check:
            self.validate()

    def __iter__(self):
        return iter(self.reps)

    def __len__(self):
        return len(self.reps)

    def __getitem__(self, i):
        return self.reps[i]

    @property
    def dims(self):
        return [r.dim for r in self.reps]

    def validate(self):
        n = self.group.order
        chars = [r.character for r in self.reps]
        for i, (r, chi) in enumerate(zip(self.reps, chars)):
            norm = inner_product(chi, chi).real
            if abs(norm - 1) > CHAR_TOL:
                raise NotIrreducible(f"rep {i} ({r.name or '?'}) has character norm {norm:.6g}, expected 1")
        for i, j in itertools.combinations(range(len(chars)), 2):
            ip = inner_product(chars[i], chars[j])
            if abs(ip) > CHAR_TOL:
                raise DuplicateRep(f"reps {i} and {j} have character inner product {ip:.6g} (equivalent)")
        total = sum(r.dim**2 for r in self.reps)
        if total != n:
            raise IncompleteSet(f"sum of squared dimensions is {total}, group order is {n}")
        if not self.reps or not np.allclose(self.reps[0].matrices[:, 0, 0], 1) or self.reps[0].dim != 1:
            raise IncompleteSet("trivial representation missing")
        nu = len(conjugacy_classes(self.group))
        if len(self.reps) != nu:
            raise IncompleteSet(f"{len(self.reps)} irreps but {nu} conjugacy classes")

    def is_complete(self):
        return sum(r.dim**2 for r in self.reps) == self.group.order


def conjugacy_classes(G):
    seen = np.full(G.order, -1)
    classes = []
    for g in range(G.order):
        if seen[g] >= 0:
            continue
        cls = sorted({G.op(G.op(x, g), G.inverse(x)) for x in range(G.order)})
        seen[cls] = len(classes)
        classes.append(tuple(cls))
    return classes


def _require(G, family):
    if G.family[0] != family:
        raise WrongFamily(f"{G.name} is not a {family} group")


def irreps_cyclic(G):
    _require(G, "cyclic")
    n = G.order
    k = np.arange(n)
    reps = []
    for j in range(n):
        vals = np.exp(2j * np.pi * j * k / n)
        reps.append(Representation(G, vals[:, None, None], name=f"chi_{j}", check=False))
    return IrrepSet(G, reps)


def irreps_dihedral(G):
    """Irreps of D_n: the 1-dimensional ones, then rho_j(a) = Dia(z^j, z^-j), rho_j(b) = Off(1, 1)."""
    _require(G, "dihedral")
    n = G.family[1]
    i = np.arange(n)
    sign_b = np.concatenate([np.ones(n), -np.ones(n)])
    sign_a = np.concatenate([(-1.0) ** i, (-1.0) ** i])
    one = np.ones(2 * n)
    oned = [("trivial", one), ("alternating", sign_b)]
    if n % 2 == 0:
        oned += [("sign_a", sign_a), ("sign_ab", sign_a * sign_b)]
    reps = [Representation(G, v[:, None, None].astype(complex), name=nm, check=False) for nm, v in oned]
    zeta = np.exp(2j * np.pi / n)
    for j in range(1, (n - 1) // 2 + 1):
        mats = np.zeros((2 * n, 2, 2), dtype=complex)
        z = zeta ** (j * i)
        mats[:n, 0, 0] = z
        mats[:n, 1, 1] = 1 / z
        # a^i b = Off(z^ij, z^-ij): top-right z^ij, bottom-left z^-ij
        mats[n:, 0, 1] = z
        mats[n:, 1, 0] = 1 / z
        reps.append(Representation(G, mats, name=f"rho_{j}", check=False))
    return IrrepSet(G, reps)


def irreps_product(G, factor_irreps=None):
    _require(G, "product")
    if factor_irreps is None:
        factor_irreps = [builtin_irreps(F) for F in G.factors]
    orders = [F.order for F in G.factors]
    comps = np.array(list(np.ndindex(*orders)), dtype=np.int64).reshape(G.order, len(orders))
    reps = []
    for combo in itertools.product(*[list(s) for s in factor_irreps]):
        mats = np.ones((G.order, 1, 1), dtype=complex)
        for t, r in enumerate(combo):
            m = r.matrices[comps[:, t]]
            mats = np.einsum("gij,gkl->gikjl", mats, m).reshape(G.order, mats.shape[1] * m.shape[1], -1)
        name = "x".join(r.name or "?" for r in combo)
        reps.append(Representation(G, mats, name=name, check=False))
    return IrrepSet(G, reps)


def builtin_irreps(G):
    kind = G.family[0]
    if kind == "cyclic":
        return irreps_cyclic(G)
    if kind == "dihedral":
        return irreps_dihedral(G)
    if kind == "product":
        return irreps_product(G)
    raise WrongFamily(f"no built-in irreps for {G.name}; supply a representation file")


def _parse_entry(x):
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise FormatError(f"complex entry must be [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, str):
        return complex(x.replace(" ", "").replace("i", "j"))
    raise FormatError(f"bad matrix entry {x!r}")


def load_irreps(G, source):
    """Read and validate a representation file (path, JSON text or parsed dict)."""
    if isinstance(source, (str, Path)) and not str(source).lstrip().startswith("{"):
        try:
            with open(source) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{source}: {exc}") from None
    elif isinstance(source, str):
        data = json.loads(source)
    else:
        data = source
    if not isinstance(data, dict) or not isinstance(data.get("reps"), list):
        raise FormatError('representation file needs a top-level "reps" list')
    reps = []
    for k, entry in enumerate(data["reps"]):
        try:
            d = int(entry["dim"])
            table = entry["matrices"]
        except (KeyError, TypeError, ValueError):
            raise FormatError(f'rep {k}: needs "dim" and "matrices"') from None
        mats = np.full((G.order, d, d), np.nan, dtype=complex)
        for lab, m in table.items():
            g = G.index(lab)
            if not np.isnan(mats[g]).all():
                raise FormatError(f"rep {k}: element {lab!r} given twice")
            try:
                arr = np.array([[_parse_entry(x) for x in row] for row in m], dtype=complex)
            except TypeError:
                raise FormatError(f"rep {k}: matrix for {lab!r} is malformed") from None
            if arr.shape != (d, d):
                raise FormatError(f"rep {k}: matrix for {lab!r} is not {d}x{d}")
            mats[g] = arr
        missing = [G.label(g) for g in range(G.order) if np.isnan(mats[g]).any()]
        if missing:
            raise FormatError(f"rep {k}: missing matrices for {missing}")
        reps.append(Representation(G, mats, name=entry.get("name", f"rep_{k}")))
    return IrrepSet(G, reps)


def dump_irreps(irreps):
    G = irreps.group
    out = []
    for r in irreps:
        mats = {}
        for g in range(G.order):
            mats[G.label(g)] = [[[float(z.real), float(z.imag)] for z in row] for row in r.matrices[g]]
        out.append({"name": r.name, "dim": r.dim, "matrices": mats})
    return {"reps": out}


def rho_of_subgroup(rho, H: Subgroup):
    """rho(H) = sum of rho(h) over h in H."""
    if not H.group.same_as(rho.group):
        raise GroupMismatch("subgroup and representation over different groups")
    return rho.restrict_sum(H.elements)


def rho_of_element(rho, x: GroupAlgebraElement):
    """Linear extension of rho to the group algebra."""
    if not x.group.same_as(rho.group):
        raise GroupMismatch("algebra element and representation over different groups")
    out = np.zeros((rho.dim, rho.dim), dtype=complex)
    for g, c in x.coeffs.items():
        out += c * rho.matrices[g]
    return out


def character_of_algebra_element(rho, x: GroupAlgebraElement):
    if not x.group.same_as(rho.group):
        raise GroupMismatch("algebra element and representation over different groups")
    chi = rho.character
    return complex(sum(c * chi[g] for g, c in x.coeffs.items()))


def matrix_rank(M, tol=RANK_TOL):
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.count_nonzero(s > tol * M.shape[0]))


@dataclass
class RankIdentityReport:
    ranks: list
    dims: list
    total: int
    index: int

    @property
    def ok(self):
        return self.total == self.index


def verify_rank_identity(irreps, H):
    """Check sum over irreps of dim * rank(rho(H)) == [G : H]."""
    ranks = [matrix_rank(rho_of_subgroup(r, H)) for r in irreps]
    dims = irreps.dims
    total = sum(d * k for d, k in zip(dims, ranks))
    return RankIdentityReport(ranks, dims, total, H.group.order // H.order)
