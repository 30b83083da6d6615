"""Realizability of an edge-length tuple as a simplex in each geometry.

An edge tuple is the symmetric m x m matrix of pairwise geodesic lengths of m
labeled points (zero diagonal).  The tests are quadratic-form conditions:

* Euclidean: the Gram form anchored at vertex 0 must be PSD with prescribed
  rank; the witness comes from its eigenfactorization.
* spherical radius rho: the matrix cos(a_ij / rho) must be PSD with prescribed
  rank, after checking a_ij <= pi * rho.
* hyperbolic curvature K: the matrix cosh(kappa a_ij) must have Lorentz
  signature (one positive eigenvalue, the rest negative).

Also here: Euclidean simplex volume from the bordered determinant, the curved
determinants of the cosine/cosh matrices, and positive-term volume series used
as bounds (ideal regular simplex, orthoscheme).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleError, NumericalError
from .geometry import CurvedSpace, cos_vertex_angle

PSD_TOL_FACTOR = 1e-9
RANK_TOL_FACTOR = 1e-8
SERIES_TERM_CAP = 10**6


def check_edge_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"edge matrix must be square, got shape {a.shape}")
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, float(np.abs(a).max()))):
        raise ValueError("edge matrix must be symmetric")
    if np.any(np.abs(np.diag(a)) > 0):
        raise ValueError("edge matrix diagonal must be zero")
    off = a[~np.eye(a.shape[0], dtype=bool)]
    if np.any(off <= 0):
        raise ValueError("off-diagonal edge lengths must be positive")
    return a


@dataclass
class RealizabilityReport:
    realizable: bool
    rank: int
    volume: float | None = None
    witness: np.ndarray | None = None
    cause: str | None = None
    eigenvalues: np.ndarray | None = field(default=None, repr=False)


def _psd_rank(g: np.ndarray) -> tuple[bool, int, np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(g)
    scale = max(float(np.abs(w).max()), 1e-300)
    psd = bool(w.min() >= -PSD_TOL_FACTOR * scale)
    rank = int(np.sum(w > RANK_TOL_FACTOR * scale))
    return psd, rank, w, v


def anchored_gram(a: np.ndarray) -> np.ndarray:
    """Gram form of the difference vectors anchored at vertex 0."""
    d0 = a[0, 1:]
    return (d0[:, None] ** 2 + d0[None, :] ** 2 - a[1:, 1:] ** 2) / 2.0


def schoenberg_euclidean(a, r: int) -> RealizabilityReport:
    """PSD + rank test for lengths of an r-simplex in R^r (anchored Gram form)."""
    a = check_edge_matrix(a)
    m = a.shape[0]
    if not 1 <= r <= m - 1:
        raise ValueError(f"rank target {r} out of range for {m} points")
    g = anchored_gram(a)
    psd, rank, w, v = _psd_rank(g)
    realizable = psd and rank == r
    witness = None
    if psd:
        cols = np.argsort(w)[::-1][:r]
        lam = np.clip(w[cols], 0.0, None)
        x = v[:, cols] * np.sqrt(lam)[None, :]
        witness = np.vstack([np.zeros(r), x])
    vol = None
    try:
        vol = euclidean_volume(a) if psd else None
    except InfeasibleError:
        vol = None
    cause = None if realizable else ("form not PSD" if not psd else f"rank {rank} != {r}")
    return RealizabilityReport(realizable, rank, vol, witness if realizable else witness,
                               cause, eigenvalues=w)


def schoenberg_spherical(a, rho: float, r: int) -> RealizabilityReport:
    """PSD + rank test of the cosine Gram for points on a sphere of radius rho.

    m points spanning S^(r-1) of radius rho (a sphere sitting in R^r) have a
    cosine Gram matrix of rank exactly r.
    """
    a = check_edge_matrix(a)
    if rho <= 0:
        raise ValueError("radius must be positive")
    m = a.shape[0]
    if not 1 < r <= m:
        raise ValueError(f"rank target {r} out of range for {m} points")
    if float(a.max()) > math.pi * rho * (1 + 1e-12):
        return RealizabilityReport(False, 0, cause="edge exceeds pi*rho")
    g = np.cos(a / rho)
    np.fill_diagonal(g, 1.0)
    psd, rank, w, v = _psd_rank(g)
    realizable = psd and rank == r
    witness = None
    if psd:
        cols = np.argsort(w)[::-1][:r]
        lam = np.clip(w[cols], 0.0, None)
        witness = rho * (v[:, cols] * np.sqrt(lam)[None, :])
    cause = None if realizable else ("form not PSD" if not psd else f"rank {rank} != {r}")
    return RealizabilityReport(realizable, rank, None, witness, cause, eigenvalues=w)


def hyperbolic_realizable(a, k: float, r: int) -> RealizabilityReport:
    """Lorentz-signature test of the cosh Gram for points in hyperbolic space.

    m points spanning H^(r-1) of curvature k < 0 give cosh(kappa a_ij) exactly
    one positive eigenvalue and r - 1 negative ones (rank r).
    """
    a = check_edge_matrix(a)
    if k >= 0:
        raise ValueError("curvature must be negative")
    m = a.shape[0]
    if not 1 < r <= m:
        raise ValueError(f"rank target {r} out of range for {m} points")
    kappa = math.sqrt(-k)
    g = np.cosh(kappa * a)
    np.fill_diagonal(g, 1.0)
    w, v = np.linalg.eigh(g)
    scale = max(float(np.abs(w).max()), 1e-300)
    n_pos = int(np.sum(w > RANK_TOL_FACTOR * scale))
    n_neg = int(np.sum(w < -RANK_TOL_FACTOR * scale))
    rank = n_pos + n_neg
    realizable = n_pos == 1 and n_neg == r - 1
    witness = None
    if n_pos == 1:
        order = np.argsort(w)[::-1]
        time_col = order[0]
        space_cols = order[1:][np.argsort(-np.abs(w[order[1:]]))][: max(0, n_neg)]
        t = v[:, time_col] * math.sqrt(max(w[time_col], 0.0))
        if t.sum() < 0:
            t = -t
        cols = [t]
        for c in space_cols:
            cols.append(v[:, c] * math.sqrt(max(-w[c], 0.0)))
        witness = np.column_stack(cols) / kappa
    cause = None
    if not realizable:
        cause = f"signature ({n_pos} pos, {n_neg} neg) != (1, {r - 1})"
    return RealizabilityReport(realizable, rank, None, witness, cause, eigenvalues=w)


def cm_bordered_det(a: np.ndarray) -> float:
    """Determinant of the squared-distance matrix bordered by a row/col of ones."""
    m = a.shape[0]
    b = np.ones((m + 1, m + 1))
    b[0, 0] = 0.0
    b[1:, 1:] = a**2
    return float(np.linalg.det(b))


def euclidean_volume(a) -> float:
    """(m-1)-volume of the simplex on m points from the bordered determinant."""
    a = check_edge_matrix(a)
    m = a.shape[0]
    det = cm_bordered_det(a)
    denom = (-1.0) ** m * 2.0 ** (m - 1) * math.factorial(m - 1) ** 2
    v2 = det / denom
    scale = float(np.mean(a[a > 0])) ** (2 * (m - 1)) if m > 1 else 1.0
    if v2 < -1e-9 * scale:
        raise InfeasibleError(f"negative squared volume {v2}: tuple not realizable")
    return math.sqrt(max(v2, 0.0))


def spherical_cm_det(a, k: float) -> float:
    """Determinant of the matrix cos(kappa a_ij) with unit diagonal (k > 0)."""
    a = check_edge_matrix(a)
    if k <= 0:
        raise ValueError("curvature must be positive")
    g = np.cos(math.sqrt(k) * a)
    np.fill_diagonal(g, 1.0)
    return float(np.linalg.det(g))


def hyperbolic_cm_det(a, k: float) -> float:
    """Determinant of the matrix cosh(kappa a_ij) with unit diagonal (k < 0)."""
    a = check_edge_matrix(a)
    if k >= 0:
        raise ValueError("curvature must be negative")
    g = np.cosh(math.sqrt(-k) * a)
    np.fill_diagonal(g, 1.0)
    return float(np.linalg.det(g))


def realize_in_space(a, space: CurvedSpace) -> RealizabilityReport:
    """Dispatch the full-rank simplex test for m points in the given space.

    The witness is returned in model coordinates: R^dim rows for k = 0, points
    on the sphere (rotated so their mean direction is the pole, keeping well
    separated configurations inside the open hemisphere) for k > 0, upper-sheet
    hyperboloid points for k < 0.
    """
    a = check_edge_matrix(a)
    m = a.shape[0]
    if space.k == 0.0:
        rep = schoenberg_euclidean(a, m - 1)
        if rep.realizable and m - 1 < space.dim:
            pad = np.zeros((m, space.dim - (m - 1)))
            rep.witness = np.hstack([rep.witness, pad])
        return rep
    if space.k > 0.0:
        rep = schoenberg_spherical(a, 1.0 / space.kappa, m)
        if rep.realizable:
            x = rep.witness
            c = x.mean(axis=0)
            nc = np.linalg.norm(c)
            if nc > 1e-12:
                chat = c / nc
                e0 = np.zeros(m)
                e0[0] = 1.0
                w = chat - e0
                nw = np.linalg.norm(w)
                if nw > 1e-12:
                    x = x - 2.0 * np.outer(x @ w, w) / nw**2
            rep.witness = x
        return rep
    return hyperbolic_realizable(a, space.k, m)


@dataclass
class SeriesValue:
    """Truncated positive-term series: value, tail estimate, shells summed."""

    value: float
    error: float
    shells: int


def ideal_regular_shells(n: int, depth: int) -> np.ndarray:
    """Shell terms of the ideal regular simplex volume series, k = 0..depth-1.

    The printed series sum_k rising(beta,k) A_{n,k} / (n+2k)! with
    beta=(n+1)/2 and A_{n,k} the convolution of (2i)!/i! overflows float64
    factorials near k ~ 85, so the shells are generated by an equivalent
    scaled recurrence: with q_j(k) the k-th coefficient of (sum_i (1/2)_i x^i)^j
    (so q_{n+1}(k) = A_{n,k}/4^k), Legendre duplication turns the k-th term
    into const * q_{n+1}(k)/Gamma(n/2+k+1), and q_j obeys
        q_j(k+1) = q_j(k) (k/j + 1/2) + q_{j-1}(k+1),
    which stays bounded after dividing by the Gamma factor.
    """
    if n < 2:
        raise ValueError("dimension must be >= 2")
    const = math.sqrt(n * math.pi) / (math.gamma((n + 1) / 2.0) * 2.0**n)
    r = [0.0] * (n + 2)
    for j in range(1, n + 2):
        r[j] = 1.0 / math.gamma(n / 2.0 + 1.0)
    shells = np.empty(depth)
    for k in range(depth):
        shells[k] = const * r[n + 1]
        denom = n / 2.0 + k + 1.0
        prev = 0.0
        for j in range(1, n + 2):
            prev = r[j] * ((k / j + 0.5) / denom) + prev
            r[j] = prev
    return shells


def milnor_ideal_regular_bound(n: int, tol: float, term_cap: int = SERIES_TERM_CAP) -> SeriesValue:
    """Volume of the ideal regular hyperbolic n-simplex (curvature -1).

    Positive-term series summed until a shell contributes less than tol (after
    at least 3 shells); the tail decays like k^-(n+1)/2, and the reported error
    bound integrates that tail from the stopping index.
    """
    if n < 2:
        raise ValueError("dimension must be >= 2")
    const = math.sqrt(n * math.pi) / (math.gamma((n + 1) / 2.0) * 2.0**n)
    r = [0.0] * (n + 2)
    for j in range(1, n + 2):
        r[j] = 1.0 / math.gamma(n / 2.0 + 1.0)
    total = 0.0
    last = math.inf
    k = 0
    while k < term_cap:
        last = const * r[n + 1]
        total += last
        denom = n / 2.0 + k + 1.0
        prev = 0.0
        for j in range(1, n + 2):
            prev = r[j] * ((k / j + 0.5) / denom) + prev
            r[j] = prev
        k += 1
        if k >= 3 and last < tol:
            break
    if last >= tol:
        raise NumericalError(
            f"series did not reach per-shell tolerance {tol} within {term_cap} shells")
    p = (n + 1) / 2.0
    err = last * k / max(p - 1.0, 0.5)
    return SeriesValue(total, err, k)


def ideal_regular_partial_sums(n: int, depth: int) -> np.ndarray:
    """Partial sums S_0..S_(depth-1) of the ideal regular volume series."""
    return np.cumsum(ideal_regular_shells(n, depth))


def _compositions(k: int, n: int):
    if n == 1:
        yield (k,)
        return
    for first in range(k + 1):
        for rest in _compositions(k - first, n - 1):
            yield (first,) + rest


def orthoscheme_shells(params, depth: int) -> np.ndarray:
    """Shell sums (by total multi-index degree) of the orthoscheme volume series."""
    a = np.asarray(params, dtype=float)
    n = len(a)
    if np.any(a < 0):
        raise ValueError("series parameters must be nonnegative")
    if float(np.sum(a**2)) >= 1.0:
        raise InfeasibleError("series parameters outside convergence region sum a_j^2 < 1")
    beta = (n + 1) / 2.0
    a2 = a**2
    shells = np.zeros(depth)
    rising = 1.0
    for k in range(depth):
        if k > 0:
            rising *= beta + k - 1
        s = 0.0
        for idx in _compositions(k, n):
            den = 1.0
            for ij in idx:
                den *= math.factorial(ij)
            suffix = 0
            poly = 1.0
            term = 1.0
            for j in range(n - 1, -1, -1):
                suffix += 2 * idx[j]
                poly *= suffix + (n - j)
                term *= a2[j] ** idx[j]
            s += rising * term / (den * poly)
        shells[k] = s
    return float(np.prod(a)) * shells


def milnor_orthosimplex_volume(params, k: float, tol: float,
                               term_cap: int = SERIES_TERM_CAP) -> SeriesValue:
    """Hyperbolic orthoscheme volume from the multi-index power series.

    params are the chained tanh parameters a_1..a_N (tanh of kappa-scaled edge
    lengths along the orthogonal path); requires sum a_j^2 < 1.  The series
    value is the volume at curvature -1; for curvature k < 0 it is divided by
    kappa^N.
    """
    if k >= 0:
        raise ValueError("curvature must be negative")
    a = np.asarray(params, dtype=float)
    n = len(a)
    if n == 0:
        raise ValueError("need at least one parameter")
    if np.all(a == 0.0):
        return SeriesValue(0.0, 0.0, 1)
    total = 0.0
    shells_done = 0
    depth = 16
    last = np.inf
    terms = 0
    while True:
        shells = orthoscheme_shells(a, shells_done + depth)[shells_done:]
        total += float(shells.sum())
        shells_done += depth
        terms += sum(math.comb(kk + n - 1, n - 1) for kk in range(shells_done - depth, shells_done))
        last = float(shells[-1])
        if shells_done >= 3 and last < tol:
            break
        if terms > term_cap:
            raise NumericalError(f"series exceeded {term_cap} terms before tolerance {tol}")
        depth = min(depth * 2, 128)
    ratio = float(np.sum(a**2))
    err = last * ratio / max(1e-12, 1.0 - ratio)
    kappa = math.sqrt(-k)
    return SeriesValue(total / kappa**n, err / kappa**n, shells_done)


def triangle_area_curved(a: float, b: float, c: float, k: float) -> float:
    """Triangle area: Heron for k = 0, angle excess/defect over |K| otherwise."""
    if k == 0.0:
        s = (a + b + c) / 2.0
        h2 = s * (s - a) * (s - b) * (s - c)
        if h2 < -1e-12 * max(a, b, c) ** 4:
            raise InfeasibleError("triangle inequality violated")
        return math.sqrt(max(h2, 0.0))
    space = CurvedSpace(k, 2)
    ang = (
        math.acos(cos_vertex_angle(b, c, a, space))
        + math.acos(cos_vertex_angle(a, c, b, space))
        + math.acos(cos_vertex_angle(a, b, c, space))
    )
    if k > 0:
        excess = ang - math.pi
        if excess < -1e-9:
            raise InfeasibleError("spherical triangle with angle sum below pi")
        return max(excess, 0.0) / k
    defect = math.pi - ang
    if defect < -1e-9:
        raise InfeasibleError("hyperbolic triangle with angle sum above pi")
    return max(defect, 0.0) / (-k)
