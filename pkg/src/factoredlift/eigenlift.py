"""Lifting eigenvectors of B(rho) to eigenvectors of the factored lift.

A vector f of length d*k is split into d-segments f(v), one per base vertex.
Condition (C) asks that every f(v) is fixed by rho(G_v). When it holds,
f+(v, h G_v) = rho(h) f(v) is well defined, and each of its d coordinate
slices (j-sections) is an eigenvector of the lift adjacency matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConditionCViolated, ResidualTooLarge, ZeroVector
from .lift import expand_factored_lift
from .spectra import b_rho_eigenspaces, fmt_float
from .voltage import build_b_rho

C_TOL = 1e-9
SV_TOL = 1e-9
CANDIDATE_TOL = 1e-8
LIFT_TOL = 1e-7


@dataclass
class CandidateEigenvector:
    rho: object
    eigenvalue: complex
    f: np.ndarray
    residual: float = 0.0

    @property
    def dim(self):
        return self.rho.dim

    def segment(self, v):
        d = self.rho.dim
        return self.f[v * d : (v + 1) * d]


def make_candidate(graph, rho, eigenvalue, f, tol=CANDIDATE_TOL):
    """Validate ``f`` as an eigenvector of B(rho) for ``eigenvalue``."""
    f = np.asarray(f, dtype=complex).ravel()
    if f.shape[0] != rho.dim * graph.k:
        raise ValueError(f"vector has length {f.shape[0]}, expected {rho.dim * graph.k}")
    B = build_b_rho(graph, rho)
    res = float(np.linalg.norm(B @ f - eigenvalue * f))
    if res > tol * (1 + abs(eigenvalue)) * np.linalg.norm(f):
        raise ResidualTooLarge(f"||B(rho) f - lambda f|| = {res:.3g}")
    return CandidateEigenvector(rho, eigenvalue, f, res)


def check_condition_C(f, graph, tol=C_TOL):
    """(True, None) if rho(h) f(v) = f(v) for all v and h in G_v, else (False, (v, h))."""
    rho = f.rho
    scale = max(1.0, float(np.linalg.norm(f.f)))
    for v, H in enumerate(graph.omega):
        seg = f.segment(v)
        for h in H.elements:
            if np.linalg.norm(rho.matrices[h] @ seg - seg) > tol * scale:
                return False, (v, h)
    return True, None


def condition_C_constraints(rho, graph):
    """Rows of the linear system (rho(h) - I) f(v) = 0 over generators h of each G_v."""
    d, k = rho.dim, graph.k
    rows = []
    for v, H in enumerate(graph.omega):
        gens = H.generators or [h for h in H.elements if h != 0]
        for h in gens:
            block = np.zeros((d, d * k), dtype=complex)
            block[:, v * d : (v + 1) * d] = rho.matrices[h] - np.eye(d)
            rows.append(block)
    if not rows:
        return np.zeros((0, d * k), dtype=complex)
    return np.vstack(rows)


def condition_C_subspace(rho, basis, graph, tol=SV_TOL):
    """Orthonormal basis (columns) of the part of span(basis) that satisfies (C)."""
    basis = np.asarray(basis, dtype=complex)
    if basis.ndim == 1:
        basis = basis[:, None]
    if basis.shape[1] == 0:
        return basis
    Q, s, _ = np.linalg.svd(basis, full_matrices=False)
    Q = Q[:, s > tol * max(1.0, float(s.max()))]
    C = condition_C_constraints(rho, graph)
    if C.shape[0] == 0:
        return Q
    M = C @ Q
    _, s, vh = np.linalg.svd(M)
    cutoff = tol * max(1.0, float(s.max(initial=0.0)))
    rank = int(np.count_nonzero(s > cutoff))
    return Q @ vh[rank:].conj().T


def _coset_representative(cs, c, choice):
    members = cs.cosets[c]
    return members[0] if choice == "first" else members[-1]


def lifted_segments(f, graph, choice="first"):
    """(k^omega, d) array of rho(h) f(v) over lift vertices (v, h G_v) in lift order."""
    rho = f.rho
    rows = []
    for v, cs in enumerate(graph.coset_spaces):
        seg = f.segment(v)
        for c in range(len(cs)):
            h = _coset_representative(cs, c, choice)
            rows.append(rho.matrices[h] @ seg)
    return np.array(rows, dtype=complex).reshape(-1, rho.dim)


@dataclass
class LiftedEigenvector:
    eigenvalue: complex
    segments: np.ndarray  # (k^omega, d)
    residuals: list

    @property
    def full(self):
        """f+ as a vector of length d * k^omega."""
        return self.segments.ravel()

    @property
    def sections(self):
        return [self.segments[:, j] for j in range(self.segments.shape[1])]


def lift_eigenvector(f, graph, lift=None, tol=LIFT_TOL, choice="first"):
    if float(np.linalg.norm(f.f)) <= 1e-12:
        raise ZeroVector("cannot lift the zero vector")
    ok, witness = check_condition_C(f, graph)
    if not ok:
        v, h = witness
        raise ConditionCViolated(
            f"rho({graph.group.label(h)}) moves the segment at {graph.base.vertices[v]}"
        )
    lift = lift or expand_factored_lift(graph)
    A = lift.adjacency.astype(float)
    segs = lifted_segments(f, graph, choice)
    lam = f.eigenvalue
    residuals = []
    for j in range(segs.shape[1]):
        x = segs[:, j]
        r = float(np.linalg.norm(A @ x - lam * x))
        if r > tol * (1 + abs(lam)) * max(float(np.linalg.norm(x)), 1e-300) and r > 1e-12:
            raise ResidualTooLarge(f"j-section {j} has adjacency residual {r:.3g}")
        residuals.append(r)
    return LiftedEigenvector(lam, segs, residuals)


@dataclass
class IndependenceReport:
    rank: int
    dim: int
    witness: tuple | None  # lift vertex indices with independent segments

    @property
    def independent(self):
        return self.rank == self.dim


def independence_check(f, graph, tol=SV_TOL, choice="first"):
    """Rank of the k^omega x d matrix of segments rho(h) f(v); the j-sections are independent iff it is d."""
    segs = lifted_segments(f, graph, choice)
    s = np.linalg.svd(segs, compute_uv=False)
    cutoff = tol * max(1.0, float(s.max(initial=0.0)))
    rank = int(np.count_nonzero(s > cutoff))
    chosen = []
    for x in range(segs.shape[0]):
        trial = segs[chosen + [x]]
        sv = np.linalg.svd(trial, compute_uv=False)
        if np.count_nonzero(sv > cutoff) == len(chosen) + 1:
            chosen.append(x)
            if len(chosen) == f.dim:
                break
    witness = tuple(chosen) if len(chosen) == f.dim else None
    return IndependenceReport(rank, f.dim, witness)


@dataclass
class EigenspaceEntry:
    irrep: str
    dim: int
    eigenvalue: float
    eigenspace_dim: int
    c_subspace_dim: int
    residuals: list
    ranks: list


@dataclass
class EigvecReport:
    entries: list
    certified: int
    k_omega: int
    by_eigenvalue: list  # (lambda, certified rank)
    vectors: dict = field(default_factory=dict)  # lambda -> (k^omega, m) array of certified sections
    max_residual: float = 0.0

    @property
    def complete(self):
        return self.certified == self.k_omega

    def to_json(self):
        return {
            "k_omega": self.k_omega,
            "certified": self.certified,
            "complete": self.complete,
            "max_residual": fmt_float(self.max_residual),
            "eigenvalues": [{"value": fmt_float(lam), "certified": c} for lam, c in self.by_eigenvalue],
            "eigenspaces": [
                {
                    "irrep": e.irrep,
                    "dim": e.dim,
                    "eigenvalue": fmt_float(e.eigenvalue),
                    "eigenspace_dim": e.eigenspace_dim,
                    "condition_C_dim": e.c_subspace_dim,
                    "section_residuals": [fmt_float(r) for r in e.residuals],
                    "independence_ranks": e.ranks,
                }
                for e in self.entries
            ],
        }


def full_eigvec_report(graph, irreps, lift=None, cluster_tol=1e-8):
    """Lift every (C)-satisfying eigenvector of every B(rho) and count independent results per eigenvalue."""
    lift = lift or expand_factored_lift(graph)
    entries = []
    pools = []  # (lambda, list of sections)
    max_res = 0.0
    for i, rho in enumerate(irreps):
        name = rho.name or f"rho_{i}"
        for lam, basis in b_rho_eigenspaces(graph, rho):
            sub = condition_C_subspace(rho, basis, graph)
            residuals, ranks, sections = [], [], []
            for c in range(sub.shape[1]):
                cand = CandidateEigenvector(rho, lam, sub[:, c])
                lifted = lift_eigenvector(cand, graph, lift)
                residuals.extend(lifted.residuals)
                ranks.append(independence_check(cand, graph).rank)
                sections.extend(lifted.sections)
            max_res = max([max_res] + residuals)
            entries.append(EigenspaceEntry(name, rho.dim, lam, basis.shape[1], sub.shape[1], residuals, ranks))
            if sections:
                pools.append((lam, sections))
    scale = max([1.0] + [abs(lam) for lam, _ in pools])
    merged = []
    for lam, secs in sorted(pools, key=lambda t: -t[0]):
        if merged and abs(merged[-1][0] - lam) <= cluster_tol * scale:
            merged[-1][1].extend(secs)
        else:
            merged.append([lam, list(secs)])
    by_lam, vectors, total = [], {}, 0
    for lam, secs in merged:
        X = np.array(secs).T
        u, s, _ = np.linalg.svd(X, full_matrices=False)
        r = int(np.count_nonzero(s > SV_TOL * max(1.0, float(s.max(initial=0.0)))))
        by_lam.append((lam, r))
        vectors[lam] = u[:, :r]
        total += r
    return EigvecReport(entries, total, graph.k_omega, by_lam, vectors, max_res)
