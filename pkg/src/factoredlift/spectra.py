"""Lift spectra from per-irrep matrices B(rho), with a direct eigendecomposition as oracle.

Per-irrep solver
----------------
B(rho) can be defective at 0, and a general-purpose eigensolver then smears
the zero eigenvalues by about sqrt(machine epsilon). The default solver
avoids that. After a change of basis that makes rho unitary, block row u of
B(rho) is |G_u| times an orthogonal projector Pi_u, so B(rho) = S Pi M with M
Hermitian. With Q an orthonormal basis of range(Pi) and D = Q* S Q, the
nonzero eigenvalues of B(rho) are those of D^(1/2) (Q* M Q) D^(1/2) (a
Hermitian matrix), and the rest are exact zeros. ``method="generic"`` runs
LAPACK on B(rho) instead.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .errors import (
    CardinalityMismatch,
    DidNotConverge,
    GroupMismatch,
    InsufficientZeros,
    NonRealResult,
    NonSquare,
    NonSymmetric,
    NotCompleteIrrepSet,
)
from .lift import expand_factored_lift
from .voltage import build_b_rho
from .walks import integer_matrix_power

CLUSTER_TOL = 1e-8
ZERO_TOL = 1e-7
MATCH_TOL = float(os.environ.get("FACTOREDLIFT_TOL", "1e-7"))
IMAG_TOL = 1e-7
MAX_ORDER = 2000


def _sort_key(z):
    return (round(z.real, 9), round(z.imag, 9))


class SpectrumMultiset:
    """Eigenvalues with multiplicities.

    Values within ``tol * max(1, spectral radius)`` of each other are merged
    into one cluster whose value is the cluster mean.
    """

    def __init__(self, values, tol=CLUSTER_TOL):
        vals = np.asarray(values, dtype=complex).ravel()
        vals = vals + 0.0  # normalise -0.0
        self.tol = tol
        self.raw = np.array(sorted(vals, key=_sort_key), dtype=complex)
        self.radius = float(np.abs(vals).max(initial=0.0))
        eps = tol * max(1.0, self.radius)
        clusters = []
        for z in self.raw:
            for c in clusters:
                if abs(z - c[0]) <= eps:
                    c[1].append(z)
                    break
            else:
                clusters.append([z, [z]])
        items = []
        for _, members in clusters:
            z = complex(np.mean(members))
            re = 0.0 if abs(z.real) <= eps else z.real
            im = 0.0 if abs(z.imag) <= eps else z.imag
            items.append((complex(re, im), len(members)))
        self.items = sorted(items, key=lambda t: (-t[0].real, -t[0].imag))

    @property
    def total(self):
        return len(self.raw)

    def __len__(self):
        return self.total

    def __iter__(self):
        return iter(self.items)

    @property
    def values(self):
        return self.raw

    def is_real(self, tol=IMAG_TOL):
        return bool(np.all(np.abs(self.raw.imag) <= tol * max(1.0, self.radius)))

    def multiplicity(self, value, tol=None):
        eps = (tol or self.tol) * max(1.0, self.radius)
        return int(np.count_nonzero(np.abs(self.raw - value) <= eps))

    def to_json(self):
        out = []
        for z, m in self.items:
            val = fmt_float(z.real) if abs(z.imag) <= IMAG_TOL * max(1.0, self.radius) else [fmt_float(z.real), fmt_float(z.imag)]
            out.append({"value": val, "multiplicity": m})
        return out

    def __repr__(self):
        parts = []
        for z, m in self.items:
            s = f"{z.real:.12g}" if abs(z.imag) < 1e-12 else f"{z:.12g}"
            parts.append(s + (f"^[{m}]" if m > 1 else ""))
        return "{" + ", ".join(parts) + "}"


def fmt_float(x):
    """Round to 12 significant digits so serialised output is reproducible."""
    v = float(f"{float(x):.12g}")
    return 0.0 if v == 0 else v


def _pair(z, vals, rel=1e-12):
    eps = rel * max(1.0, float(np.abs(vals).max(initial=0.0)))
    return [fmt_float(z.real if abs(z.real) > eps else 0.0), fmt_float(z.imag if abs(z.imag) > eps else 0.0)]


def eigenvalues(M, tol=CLUSTER_TOL, max_order=MAX_ORDER):
    """All eigenvalues of a square matrix (LAPACK Hessenberg-QR, or the Hermitian solver when applicable)."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NonSquare(f"matrix of shape {M.shape} is not square")
    if M.shape[0] > max_order:
        raise ValueError(f"order {M.shape[0]} exceeds the dense limit {max_order}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    try:
        if np.array_equal(M, M.conj().T):
            vals = np.linalg.eigvalsh(M)
        else:
            vals = np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise DidNotConverge(str(exc)) from None
    return SpectrumMultiset(vals, tol)


# structured per-irrep solver


def unitarizer(rho):
    """R with R rho(g) R^-1 unitary for every g (R = I when rho already is)."""
    mats = rho.matrices
    P = np.einsum("gji,gjk->ik", mats.conj(), mats) / mats.shape[0]
    if np.allclose(P, np.eye(rho.dim), atol=1e-12):
        return np.eye(rho.dim, dtype=complex)
    L = np.linalg.cholesky((P + P.conj().T) / 2)
    return L.conj().T


@dataclass
class ProjectedForm:
    """Data of the Hermitian compression of B(rho) (see module docstring)."""

    R: np.ndarray  # unitarizing change of basis, per d-block
    Q: np.ndarray  # dk x r, orthonormal basis of range(Pi)
    weights: np.ndarray  # length r, |G_u| for each column of Q
    K: np.ndarray  # r x r Hermitian: D^1/2 Q* M Q D^1/2
    dk: int


def projected_form(graph, rho):
    if not rho.group.same_as(graph.group):
        raise GroupMismatch("representation is over a different group")
    d, k = rho.dim, graph.k
    R = unitarizer(rho)
    Rinv = np.linalg.inv(R)
    sigma = R @ rho.matrices @ Rinv
    M = np.zeros((k, d, k, d), dtype=complex)
    for i, a in enumerate(graph.base.arcs):
        M[a.tail, :, a.head, :] += sigma[graph.alpha[i]]
    M = M.reshape(k * d, k * d)
    M = (M + M.conj().T) / 2
    cols, weights = [], []
    for u, H in enumerate(graph.omega):
        proj = sigma[list(H.elements)].sum(axis=0) / H.order
        w, V = np.linalg.eigh((proj + proj.conj().T) / 2)
        for j in np.flatnonzero(w > 0.5):
            col = np.zeros(k * d, dtype=complex)
            col[u * d : (u + 1) * d] = V[:, j]
            cols.append(col)
            weights.append(H.order)
    Q = np.array(cols, dtype=complex).T.reshape(k * d, len(cols))
    wts = np.array(weights, dtype=float)
    s = np.sqrt(wts)
    K = s[:, None] * (Q.conj().T @ M @ Q) * s[None, :]
    K = (K + K.conj().T) / 2
    return ProjectedForm(R, Q, wts, K, k * d)


def b_rho_spectrum(graph, rho, method="structured"):
    """All d*k eigenvalues of B(rho) as a complex array."""
    if method == "generic":
        return eigenvalues(build_b_rho(graph, rho)).raw
    if method != "structured":
        raise ValueError(f"unknown method {method!r}")
    pf = projected_form(graph, rho)
    try:
        nonzero = np.linalg.eigvalsh(pf.K) if pf.K.size else np.zeros(0)
    except np.linalg.LinAlgError as exc:
        raise DidNotConverge(str(exc)) from None
    return np.concatenate([nonzero, np.zeros(pf.dk - len(nonzero))]).astype(complex)


def b_rho_eigenspaces(graph, rho, tol=CLUSTER_TOL, null_tol=1e-9):
    """Distinct eigenvalues of B(rho) with a basis (columns) of each eigenspace.

    Eigenspaces for nonzero eigenvalues come from the Hermitian compression;
    the 0-eigenspace is the numerical kernel of B(rho).
    """
    pf = projected_form(graph, rho)
    B = build_b_rho(graph, rho)
    k, d = graph.k, rho.dim
    Rinv_blocks = np.kron(np.eye(k), np.linalg.inv(pf.R))
    out = []
    if pf.K.size:
        w, Z = np.linalg.eigh(pf.K)
    else:
        w, Z = np.zeros(0), np.zeros((0, 0))
    radius = max(1.0, float(np.abs(w).max(initial=0.0)))
    eps = tol * radius
    zero_eps = ZERO_TOL * radius
    i = 0
    while i < len(w):
        j = i
        while j + 1 < len(w) and w[j + 1] - w[i] <= eps:
            j += 1
        lam = float(np.mean(w[i : j + 1]))
        if abs(lam) > zero_eps:
            Y = np.sqrt(pf.weights)[:, None] * Z[:, i : j + 1]
            F = Rinv_blocks @ (pf.Q @ Y)
            out.append((lam, _orthonormal(F)))
        i = j + 1
    kernel = null_space(B, null_tol)
    if kernel.shape[1]:
        out.append((0.0, kernel))
    out.sort(key=lambda t: -t[0])
    return out


def null_space(M, tol=1e-9):
    if M.size == 0:
        return np.zeros((M.shape[1], 0), dtype=complex)
    u, s, vh = np.linalg.svd(M)
    cutoff = tol * max(1.0, float(s.max(initial=0.0)))
    rank = int(np.count_nonzero(s > cutoff))
    return vh[rank:].conj().T


def _orthonormal(F, tol=1e-9):
    if F.shape[1] == 0:
        return F
    u, s, _ = np.linalg.svd(F, full_matrices=False)
    return u[:, s > tol * max(1.0, float(s.max()))]


# lift spectrum


@dataclass
class MatchReport:
    ok: bool
    max_distance: float
    tol: float
    total: int


@dataclass
class SpectrumReport:
    per_irrep: list  # (name, dim, eigenvalue array)
    assembled_size: int
    trimmed_count: int
    trimmed_max_abs: float
    max_imag: float
    final: SpectrumMultiset
    k_omega: int
    direct: SpectrumMultiset | None = None
    match: MatchReport | None = None
    notes: list = field(default_factory=list)

    def to_json(self):
        out = {
            "per_irrep": [
                {
                    "irrep": name,
                    "dim": dim,
                    "eigenvalues": [_pair(z, vals) for z in sorted(vals, key=_sort_key)],
                }
                for name, dim, vals in self.per_irrep
            ],
            "assembled_size": self.assembled_size,
            "trimmed_zero_count": self.trimmed_count,
            "trimmed_max_abs": fmt_float(self.trimmed_max_abs),
            "max_imag_dropped": fmt_float(self.max_imag),
            "k_omega": self.k_omega,
            "spectrum": self.final.to_json(),
        }
        if self.direct is not None:
            out["direct_spectrum"] = self.direct.to_json()
        if self.match is not None:
            out["match"] = {
                "ok": self.match.ok,
                "max_distance": fmt_float(self.match.max_distance),
                "tol": self.match.tol,
            }
        return out


def spectrum_via_representations(graph, irreps, method="structured", zero_tol=ZERO_TOL):
    """Lift spectrum from the union of d_r copies of spec(B(rho_r)), minus k n - k^omega zeros."""
    if not irreps.group.same_as(graph.group):
        raise GroupMismatch("irreps are over a different group")
    if not irreps.is_complete():
        raise NotCompleteIrrepSet("spectrum assembly needs a complete set of irreducible representations")
    per = []
    pool = []
    for i, rho in enumerate(irreps):
        vals = b_rho_spectrum(graph, rho, method)
        per.append((rho.name or f"rho_{i}", rho.dim, vals))
        pool.extend(list(vals) * rho.dim)
    pool = np.array(pool, dtype=complex)
    kn = graph.k * graph.n
    assert len(pool) == kn
    n_zero = kn - graph.k_omega
    radius = max(1.0, float(np.abs(pool).max(initial=0.0)))
    order = np.argsort(np.abs(pool), kind="stable")
    trimmed = pool[order[:n_zero]]
    kept = pool[order[n_zero:]]
    tmax = float(np.abs(trimmed).max(initial=0.0))
    if tmax >= zero_tol * radius:
        small = int(np.count_nonzero(np.abs(pool) < zero_tol * radius))
        raise InsufficientZeros(
            f"need {n_zero} numerically zero eigenvalues, found {small} (largest trimmed |value| {tmax:.3g})"
        )
    max_imag = float(np.abs(kept.imag).max(initial=0.0))
    if max_imag >= IMAG_TOL * radius:
        raise NonRealResult(f"lift eigenvalue with imaginary part {max_imag:.3g}")
    final = SpectrumMultiset(kept.real)
    return SpectrumReport(per, kn, n_zero, tmax, max_imag, final, graph.k_omega)


def spectrum_direct(lift):
    A = lift.adjacency
    if not np.array_equal(A, A.T):
        raise NonSymmetric("lift adjacency matrix is not symmetric")
    if A.shape[0] > MAX_ORDER:
        raise ValueError(f"lift has {A.shape[0]} vertices; dense limit is {MAX_ORDER}")
    return SpectrumMultiset(np.linalg.eigvalsh(A.astype(float)) if A.size else np.zeros(0))


def compare_spectra(x, y, tol=MATCH_TOL):
    """Match sorted values one-to-one; fall back to an optimal assignment if the sorted pairing fails."""
    if x.total != y.total:
        raise CardinalityMismatch(f"spectra have {x.total} and {y.total} values")
    if x.total == 0:
        return MatchReport(True, 0.0, tol, 0)
    a, b = x.raw, y.raw
    dist = float(np.abs(a - b).max())
    if dist > tol:
        cost = np.abs(a[:, None] - b[None, :])
        r, c = linear_sum_assignment(cost)
        dist = min(dist, float(cost[r, c].max()))
    return MatchReport(dist <= tol, dist, tol, x.total)


def spectrum_report(graph, irreps, method="structured", with_direct=True, tol=MATCH_TOL, lift=None):
    rep = spectrum_via_representations(graph, irreps, method)
    if with_direct:
        lift = lift or expand_factored_lift(graph)
        rep.direct = spectrum_direct(lift)
        rep.match = compare_spectra(rep.final, rep.direct, tol)
    return rep


@dataclass
class QuotientReport:
    quotient_radius: float
    lift_radius: float
    radius_ok: bool
    equitable_ok: bool
    row_sums_ok: bool

    @property
    def ok(self):
        return self.radius_ok and self.equitable_ok and self.row_sums_ok


def quotient_spectral_radius_check(graph, irreps, lift, tol=1e-7):
    """B(rho_0) is the quotient matrix of the fibre partition; compare radii and cell counts."""
    B0 = build_b_rho(graph, irreps[0])
    if not np.allclose(B0.imag, 0):
        raise ValueError("first irrep is not the trivial representation")
    B0 = np.rint(B0.real).astype(np.int64)
    qr = float(np.max(np.linalg.eigvals(B0).real)) if B0.size else 0.0
    A = lift.adjacency
    lr = float(np.linalg.eigvalsh(A.astype(float)).max(initial=0.0)) if A.size else 0.0
    cell = np.repeat(np.arange(graph.k), np.diff(lift.offsets))
    counts = np.zeros((lift.n_vertices, graph.k), dtype=np.int64)
    if A.size:
        np.add.at(counts, (slice(None), cell), A)
    equitable = bool(np.array_equal(counts, B0[cell])) if A.size else True
    degrees = [graph.omega[u].order * graph.base.out_degree(u) for u in range(graph.k)]
    rows_ok = bool(np.array_equal(B0.sum(axis=1), np.array(degrees, dtype=np.int64))) if graph.k else True
    return QuotientReport(qr, lr, abs(qr - lr) <= tol * max(1.0, lr), equitable, rows_ok)


@dataclass
class MomentReport:
    rows: list  # (length, sum of lambda^length, trace of A^length, relative error)
    tol: float

    @property
    def ok(self):
        return all(r[3] <= self.tol for r in self.rows)


def moment_check(spectrum, lift, max_length=6, tol=1e-6):
    """Power sums of the spectrum against exact traces of adjacency powers."""
    vals = spectrum.raw.real
    rows = []
    for length in range(1, max_length + 1):
        s = float(np.sum(vals**length))
        t = int(np.trace(integer_matrix_power(lift.adjacency, length)))
        scale = max(1.0, float(np.sum(np.abs(vals) ** length)))
        rows.append((length, s, t, abs(s - t) / scale))
    return MomentReport(rows, tol)


def schur_reconstruction_error(M):
    """Relative residual of a Schur form, ||M - Z T Z*|| / ||M|| (contract check for eigenvalues)."""
    T, Z = scipy.linalg.schur(np.asarray(M, dtype=complex), output="complex")
    nrm = max(1.0, float(np.linalg.norm(M)))
    return float(np.linalg.norm(M - Z @ T @ Z.conj().T)) / nrm
