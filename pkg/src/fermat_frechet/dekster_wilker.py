"""Dekster-Wilker admissibility domains for edge-length spreads.

A length multiset with spread (ell, s) = (max, min) inside the domain is
guaranteed to realize nondegenerate simplexes for every assignment to the
edges of the complete graph, hence a full family of incongruent simplexes.

All trig/hyperbolic arguments are scaled by kappa = sqrt(|K|); the even-N
spherical lower boundary and the spherical terminal abscissa are implemented
in the form whose K -> 0 limit reproduces the Euclidean boundary (see tests).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .realizability import check_edge_matrix

BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class DWQuery:
    """Spread query: ell = max edge, s = min edge, dimension, curvature."""

    ell: float
    s: float
    n: int
    k: float

    def __post_init__(self):
        if not 0 < self.s <= self.ell:
            raise ValueError(f"need 0 < s <= ell, got s={self.s}, ell={self.ell}")


def spread(a) -> tuple[float, float]:
    """(max, min) off-diagonal entries of an edge matrix."""
    a = check_edge_matrix(a)
    off = a[~np.eye(a.shape[0], dtype=bool)]
    return float(off.max()), float(off.min())


def lambda_euclidean(ell: float, n: int) -> float:
    """Euclidean lower boundary of the admissible spread region."""
    if ell <= 0:
        raise ValueError("ell must be positive")
    if n < 2:
        raise ValueError("dimension must be >= 2")
    if n % 2 == 0:
        return ell * math.sqrt(1.0 - 2.0 * (n + 1) / (n * (n + 2)))
    return ell * math.sqrt(1.0 - 2.0 / (n + 1))


def lambda_hyperbolic(ell: float, n: int, k: float) -> float:
    """Hyperbolic lower boundary; tends to the Euclidean one as k -> 0."""
    if ell <= 0:
        raise ValueError("ell must be positive")
    if k >= 0:
        raise ValueError("curvature must be negative")
    kappa = math.sqrt(-k)
    sh = math.sinh(kappa * ell / 2.0)
    if n % 2 == 0:
        f1 = math.sqrt(1.0 + 2.0 * (1.0 - 2.0 / n) * sh * sh)
        f2 = math.sqrt(1.0 + 2.0 * (1.0 - 2.0 / (n + 2)) * sh * sh)
        return math.acosh(f1 * f2) / kappa
    return 2.0 / kappa * math.asinh(math.sqrt(1.0 - 2.0 / (n + 1)) * sh)


def lambda_spherical(ell: float, n: int, k: float) -> float:
    """Spherical lower boundary; tends to the Euclidean one as k -> 0."""
    if ell <= 0:
        raise ValueError("ell must be positive")
    if k <= 0:
        raise ValueError("curvature must be positive")
    kappa = math.sqrt(k)
    si = math.sin(kappa * ell / 2.0)
    if n % 2 == 0:
        f1 = math.sqrt(max(0.0, 1.0 - 2.0 * (1.0 - 2.0 / n) * si * si))
        f2 = math.sqrt(max(0.0, 1.0 - 2.0 * (1.0 - 2.0 / (n + 2)) * si * si))
        return math.acos(min(1.0, f1 * f2)) / kappa
    return 2.0 / kappa * math.asin(min(1.0, math.sqrt(1.0 - 2.0 / (n + 1)) * si))


def spherical_domain_constants(n: int, k: float) -> dict[str, float]:
    """Corner abscissas of the spherical domain.

    ell_star: edge of the largest regular n-simplex (cos(kappa ell_star) = -1/n);
    a_n: terminal abscissa where the upper and lower arcs end.
    """
    if k <= 0:
        raise ValueError("curvature must be positive")
    if n < 2:
        raise ValueError("dimension must be >= 2")
    kappa = math.sqrt(k)
    ell_star = 2.0 / kappa * math.asin(math.sqrt((n + 1) / (2.0 * n)))
    arg = 0.25 * math.sqrt((7.0 * n - 4.0 + math.sqrt(n * n + 8.0 * n)) / (n - 1.0))
    if arg > 1.0:
        raise ValueError(f"arcsin argument {arg} > 1 for n={n}")
    a_n = 2.0 / kappa * math.asin(arg)
    return {"ell_star": ell_star, "a_n": a_n}


def m_spherical(ell: float, n: int, k: float) -> float:
    """Upper boundary arc of the spherical domain for ell >= ell_star."""
    if k <= 0:
        raise ValueError("curvature must be positive")
    kappa = math.sqrt(k)
    c = math.cos(kappa * ell)
    num = 2.0 + 2.0 * (n - 1) * c
    den = 1.0 + (n - 2) * c
    if den <= 0.0 or num < -BOUNDARY_TOL:
        raise ValueError(f"upper arc undefined at ell={ell}")
    ratio = max(num, 0.0) / den
    arg = math.sqrt(ratio) * math.sin(kappa * ell / 2.0)
    if arg > 1.0 + BOUNDARY_TOL:
        raise ValueError(f"arcsin argument {arg} > 1 at ell={ell}")
    return 2.0 / kappa * math.asin(min(1.0, arg))


def in_dw_euclidean(a, n: int) -> bool:
    """Spread membership: min edge >= lambda_n(max edge)."""
    ell, s = spread(a)
    return s >= lambda_euclidean(ell, n) - BOUNDARY_TOL * ell


def in_dw_hyperbolic(a, n: int, k: float) -> bool:
    ell, s = spread(a)
    return s >= lambda_hyperbolic(ell, n, k) - BOUNDARY_TOL * ell


def in_dw_spherical(a, n: int, k: float) -> bool:
    """Membership in the region bounded by the four spherical arcs."""
    ell, s = spread(a)
    consts = spherical_domain_constants(n, k)
    tol = BOUNDARY_TOL * ell
    if ell > consts["a_n"] + tol:
        return False
    if s < lambda_spherical(ell, n, k) - tol:
        return False
    if ell > consts["ell_star"] + tol:
        return s <= m_spherical(ell, n, k) + tol
    return True
