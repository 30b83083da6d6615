"""Realizing a Fermat tree plus its boundary simplex one dimension up.

A tree with branches a_0i over a boundary simplex with edges a_ij combines
into one edge tuple on the vertex set {0, 1, ..., N} (vertex 0 = tree point).
The combined tuple may embed as a Euclidean simplex (flat immersion), or on a
sphere of some radius rho_0 found by scanning and bisecting the spherical
realizability indicator.  Isoperimetric sweeps perturb the boundary edges
with zero-sum increments and re-run the whole pipeline per perturbation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dekster_wilker import in_dw_euclidean
from .errors import InfeasibleError
from .geometry import CurvedSpace
from .realizability import RealizabilityReport, check_edge_matrix, schoenberg_euclidean, \
    schoenberg_spherical
from .solver import FermatTree, SimplexRealization, classify_edges, realization_from_witness, \
    solve_fermat
from .inverse import inverse_weights

EDGE_SUM_TOL = 1e-12


@dataclass
class CombinedTuple:
    """Tree branches plus boundary edges on vertices {0..N}; weights decorate."""

    edges: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        self.edges = check_edge_matrix(self.edges)

    @property
    def m(self) -> int:
        return self.edges.shape[0]

    @property
    def boundary(self) -> np.ndarray:
        return self.edges[1:, 1:]

    @property
    def branches(self) -> np.ndarray:
        return self.edges[0, 1:]


def combine(tree: FermatTree, boundary_edges, weights=None) -> CombinedTuple:
    """Assemble the combined tuple from a solved tree and its boundary simplex."""
    boundary_edges = check_edge_matrix(boundary_edges)
    m = boundary_edges.shape[0]
    e = np.zeros((m + 1, m + 1))
    e[1:, 1:] = boundary_edges
    e[0, 1:] = tree.branches
    e[1:, 0] = tree.branches
    w = None
    if weights is not None:
        w = np.concatenate([np.asarray(weights, dtype=float), np.ones(m * (m - 1) // 2)])
    return CombinedTuple(e, w)


@dataclass
class GodelImmersionReport:
    dw_member: bool
    report: RealizabilityReport
    admissible: bool


def godel_immersion_check(ct: CombinedTuple, n: int) -> GodelImmersionReport:
    """Flat immersion check: spread admissibility and Euclidean realizability
    at rank n for the combined tuple (weights decorate, lengths decide)."""
    dw = in_dw_euclidean(ct.edges, n)
    rep = schoenberg_euclidean(ct.edges, n)
    return GodelImmersionReport(dw, rep, dw and rep.realizable)


@dataclass
class RhoSearchResult:
    rho0: float | None
    report: RealizabilityReport | None
    scanned: list[tuple[float, bool]]
    cause: str | None = None


def _spherical_ok(edges: np.ndarray, rho: float) -> bool:
    m = edges.shape[0]
    if float(edges.max()) > math.pi * rho:
        return False
    g = np.cos(edges / rho)
    np.fill_diagonal(g, 1.0)
    w = np.linalg.eigvalsh(g)
    scale = max(float(np.abs(w).max()), 1e-300)
    return bool(w.min() >= -1e-9 * scale)


def schoenberg_rho_search(ct: CombinedTuple, n: int, rho_lo: float, rho_hi: float,
                          tol: float = 1e-9, grid: int = 64) -> RhoSearchResult:
    """Smallest radius in [rho_lo, rho_hi] whose sphere realizes the tuple.

    Coarse log-spaced scan of the PSD indicator of cos(a/rho), then bisection
    between the last infeasible and first feasible grid points.  Requires
    rho_lo > (max edge)/pi so the edge bound is satisfiable.
    """
    if not 0 < rho_lo < rho_hi:
        raise ValueError("need 0 < rho_lo < rho_hi")
    ell = float(ct.edges.max())
    if rho_lo <= ell / math.pi:
        raise ValueError(f"rho_lo must exceed (max edge)/pi = {ell / math.pi}")
    rhos = np.geomspace(rho_lo, rho_hi, grid)
    flags = [_spherical_ok(ct.edges, r) for r in rhos]
    scanned = list(zip((float(r) for r in rhos), flags))
    if not any(flags):
        return RhoSearchResult(None, None, scanned, "no feasible radius in range")
    first = next(i for i, fl in enumerate(flags) if fl)
    if first == 0:
        rho0 = float(rhos[0])
    else:
        lo, hi = float(rhos[first - 1]), float(rhos[first])
        while hi - lo > tol * hi:
            mid = math.sqrt(lo * hi)
            if _spherical_ok(ct.edges, mid):
                hi = mid
            else:
                lo = mid
        rho0 = hi
    rank = min(ct.m, n + 1)
    report = schoenberg_spherical(ct.edges, rho0, rank)
    if not report.realizable:
        # at the critical radius the Gram is rank deficient; report PSD status
        report = schoenberg_spherical(ct.edges, rho0 * (1 + 10 * tol), rank)
    return RhoSearchResult(rho0, report, scanned)


@dataclass
class SweepRow:
    eps: np.ndarray
    edge_sum: float
    dw_member: bool
    realizable: bool
    tree: FermatTree | None
    immersion: GodelImmersionReport | None
    exits_dw: bool


@dataclass(frozen=True)
class SweepOptions:
    max_eps: float = 0.05
    solve: bool = True


def isoperimetric_perturbation_sweep(boundary, eps_list, weights, space: CurvedSpace,
                                     opts: SweepOptions = SweepOptions()) -> list[SweepRow]:
    """Re-run DW/realizability/tree/immersion per zero-sum edge perturbation.

    Every eps matrix must be symmetric, zero-diagonal, with zero total over
    i < j; the perturbed tuples keep the original total edge length exactly
    (to EDGE_SUM_TOL).
    """
    from .enumeration import in_dw
    from .realizability import realize_in_space

    boundary = check_edge_matrix(boundary)
    m = boundary.shape[0]
    n = space.dim
    w = np.asarray(weights, dtype=float)
    base_sum = float(boundary[np.triu_indices(m, 1)].sum())
    rows: list[SweepRow] = []
    base_dw = in_dw(boundary, n, space)
    for eps in eps_list:
        eps = np.asarray(eps, dtype=float)
        if eps.shape != boundary.shape:
            raise ValueError("perturbation shape mismatch")
        if not np.allclose(eps, eps.T, atol=1e-14):
            raise ValueError("perturbation must be symmetric")
        tri = eps[np.triu_indices(m, 1)]
        if abs(float(tri.sum())) > EDGE_SUM_TOL * max(1.0, base_sum):
            raise InfeasibleError("perturbation does not conserve the edge sum")
        if float(np.abs(tri).max()) > opts.max_eps:
            raise InfeasibleError(f"perturbation exceeds max_eps = {opts.max_eps}")
        pert = boundary + eps
        if np.any(pert[np.triu_indices(m, 1)] <= 0):
            raise InfeasibleError("perturbed tuple has nonpositive edges")
        edge_sum = float(pert[np.triu_indices(m, 1)].sum())
        dw = in_dw(pert, n, space)
        rep = realize_in_space(pert, space)
        tree = None
        imm = None
        if rep.realizable and opts.solve:
            realization = realization_from_witness(rep.witness, space)
            tree = solve_fermat(realization, w)
            imm = godel_immersion_check(combine(tree, pert, w), n)
        rows.append(SweepRow(eps, edge_sum, dw, rep.realizable, tree, imm,
                             exits_dw=base_dw and not dw))
    return rows


def paired_perturbation(m: int, ij: tuple[int, int], kl: tuple[int, int],
                        delta: float) -> np.ndarray:
    """Zero-sum perturbation: +delta on edge ij, -delta on edge kl."""
    eps = np.zeros((m, m))
    i, j = ij
    k, l = kl
    eps[i, j] = eps[j, i] = delta
    eps[k, l] = eps[l, k] = -delta
    return eps


def normalized_weight_solve(realization: SimplexRealization, a0) -> np.ndarray:
    """Inverse weights at a0 normalized to total 1."""
    return inverse_weights(a0, realization, 1.0)
