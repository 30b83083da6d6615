"""Recovering the curvature from tree-plus-simplex distance data.

m points measured inside a space of curvature K make the m x m matrix of
cos(kappa a_ij) (K > 0) or cosh(kappa a_ij) (K < 0) rank deficient whenever
m exceeds the ambient rank, so its determinant vanishes exactly at the true
K.  The estimator brackets sign changes of that determinant on a curvature
grid and bisects; candidate roots are validated by the realizability
signature of the matrix, and the smallest-|K| validated root is primary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError, NumericalError
from .realizability import check_edge_matrix, hyperbolic_cm_det, spherical_cm_det

FLAT_DET_TOL = 1e-9


@dataclass
class CurvatureEstimate:
    k: float | None
    roots: list[float]
    status: str  # "root-found" | "flat-consistent"
    det_at_smallest: float


def _det(edges: np.ndarray, k: float) -> float:
    return spherical_cm_det(edges, k) if k > 0 else hyperbolic_cm_det(edges, k)


def _margin(edges: np.ndarray, k: float) -> float:
    """Signed realizability margin of the curved Gram at curvature k.

    Positive when the tuple embeds at curvature k (PSD cosine Gram for k > 0;
    exactly one positive eigenvalue of the cosh Gram for k < 0), zero exactly
    at the determinant roots with a valid signature, negative otherwise.  The
    margin is continuous in k and crosses zero transversally where the raw
    determinant (a product of eigenvalues) is flat to roundoff.
    """
    kappa = math.sqrt(abs(k))
    g = np.cos(kappa * edges) if k > 0 else np.cosh(kappa * edges)
    np.fill_diagonal(g, 1.0)
    w = np.linalg.eigvalsh(g)
    scale = max(float(np.abs(w).max()), 1e-300)
    if k > 0:
        return float(w[0]) / scale
    return -float(w[-2]) / scale


def _realizable_at(edges: np.ndarray, k: float, tol_factor: float = 1e-6) -> bool:
    """PSD-like validity of the cosine/cosh Gram at curvature k (rank-deficient
    by one at the true curvature)."""
    kappa = math.sqrt(abs(k))
    if k > 0:
        g = np.cos(kappa * edges)
        np.fill_diagonal(g, 1.0)
        w = np.linalg.eigvalsh(g)
        scale = max(float(np.abs(w).max()), 1e-300)
        return bool(w.min() >= -tol_factor * scale)
    g = np.cosh(kappa * edges)
    np.fill_diagonal(g, 1.0)
    w = np.sort(np.linalg.eigvalsh(g))
    scale = max(float(np.abs(w).max()), 1e-300)
    # Lorentz signature: exactly one positive eigenvalue, none spuriously so
    return bool(np.sum(w > tol_factor * scale) == 1)


def estimate_curvature(edges, sign: str, k_lo: float, k_hi: float, tol: float = 1e-10,
                       grid: int = 128) -> CurvatureEstimate:
    """Root of the curved determinant on [k_lo, k_hi] by bracketing + bisection.

    All sign-change roots are reported; the primary estimate is the
    smallest-|K| root whose Gram matrix is also realizability-consistent
    (largest model sphere consistent with the data).  Flat data is reported
    as flat-consistent when the determinant at the smallest grid |K| is
    already below FLAT_DET_TOL without any bracketed root.
    """
    edges = check_edge_matrix(edges)
    if sign not in ("positive", "negative"):
        raise ValueError("sign must be 'positive' or 'negative'")
    if sign == "positive":
        if not 0 < k_lo < k_hi:
            raise ValueError("positive sign needs 0 < k_lo < k_hi")
    else:
        if not k_lo < k_hi < 0:
            raise ValueError("negative sign needs k_lo < k_hi < 0")
    ks = np.geomspace(abs(k_lo), abs(k_hi), grid)
    if sign == "negative":
        ks = -ks[::-1]
    vals = [_margin(edges, k) for k in ks]
    roots: list[float] = []

    def bisect(a, fa, b, fb):
        while abs(b - a) > tol * max(abs(a), abs(b)):
            mid = 0.5 * (a + b)
            fm = _margin(edges, mid)
            if fm == 0.0:
                return mid
            if (fm > 0) == (fa > 0):
                a, fa = mid, fm
            else:
                b, fb = mid, fm
        return 0.5 * (a + b)

    for i in range(len(ks) - 1):
        a, fa = float(ks[i]), vals[i]
        b, fb = float(ks[i + 1]), vals[i + 1]
        if fa == 0.0:
            roots.append(a)
            continue
        if (fa > 0) != (fb > 0):
            roots.append(bisect(a, fa, b, fb))
    # realizability windows narrower than the grid show up as interior local
    # maxima of the (negative) margin; refine each and bisect both edges
    for i in range(1, len(ks) - 1):
        if vals[i] >= 0 or not (vals[i] > vals[i - 1] and vals[i] > vals[i + 1]):
            continue
        a, b = float(ks[i - 1]), float(ks[i + 1])
        for _ in range(200):
            m1 = a + (b - a) / 3.0
            m2 = b - (b - a) / 3.0
            if _margin(edges, m1) < _margin(edges, m2):
                a = m1
            else:
                b = m2
            if abs(b - a) <= 0.25 * tol * max(abs(a), abs(b)):
                break
        peak = 0.5 * (a + b)
        fpeak = _margin(edges, peak)
        if fpeak > 0.0:
            roots.append(bisect(float(ks[i - 1]), vals[i - 1], peak, fpeak))
            roots.append(bisect(peak, fpeak, float(ks[i + 1]), vals[i + 1]))
        elif abs(fpeak) < 1e-13:
            roots.append(peak)
    roots = sorted(set(round(r, 14) for r in roots), key=abs)
    small_k = float(min(ks, key=abs))
    det_small = float(_det(edges, small_k))
    if not roots:
        if abs(det_small) < FLAT_DET_TOL:
            return CurvatureEstimate(None, [], "flat-consistent", det_small)
        raise NumericalError("no sign change bracketed in the given range")
    validated = [r for r in roots if _realizable_at(edges, r)]
    primary = validated[0] if validated else roots[0]
    return CurvatureEstimate(primary, roots, "root-found", det_small)


@dataclass
class ConsensusReport:
    estimates: list[float]
    consensus: float
    spread: float
    consistent: bool
    root_sets: list[list[float]]


def multitree_curvature_consensus(combined_tuples, sign: str, k_lo: float, k_hi: float,
                                  tol: float = 1e-10, spread_tol: float = 1e-6,
                                  match_tol: float = 1e-5) -> ConsensusReport:
    """Common curvature across entries by intersecting their root sets.

    One tuple of tree-plus-simplex distances can embed exactly at several
    curvatures (the root set), so identification comes from the family: the
    true curvature shows up in every entry's root set, while the alternatives
    drift from entry to entry.  Per-entry estimates are the matched roots of
    the intersection candidate; consensus is their median.  With a single
    entry the smallest-|K| root passes through.  Root sets with no common
    value (relative match_tol) are flagged inconsistent, with the spread taken
    over the per-entry primaries.
    """
    tuples = list(combined_tuples)
    if not tuples:
        raise ValueError("need at least one combined tuple")
    results = []
    for edges in tuples:
        est = estimate_curvature(edges, sign, k_lo, k_hi, tol)
        if est.k is None:
            raise InfeasibleError("an entry is flat-consistent; no common curvature")
        results.append(est)
    root_sets = [list(est.roots) for est in results]
    best_common: list[float] | None = None
    for cand in sorted(root_sets[0], key=abs):
        matched = []
        for rs in root_sets:
            close = min(rs, key=lambda r: abs(r - cand))
            if abs(close - cand) > match_tol * max(abs(cand), 1e-300):
                matched = None
                break
            matched.append(close)
        if matched is not None:
            best_common = matched
            break
    if best_common is None:
        estimates = [est.k for est in results]
        consensus = float(np.median(estimates))
        spread = float(np.max(estimates) - np.min(estimates))
        return ConsensusReport(estimates, consensus, spread, False, root_sets)
    consensus = float(np.median(best_common))
    spread = float(np.max(best_common) - np.min(best_common)) if len(best_common) > 1 else 0.0
    rel_spread = spread / max(abs(consensus), 1e-300)
    return ConsensusReport(best_common, consensus, spread, rel_spread <= spread_tol, root_sets)
