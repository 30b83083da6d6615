"""Constant-curvature model spaces: points, distances, angles, exp/log maps.

One chart convention for the three geometries of curvature K:

* K = 0   points live in R^n,
* K > 0   sphere of radius 1/sqrt(K) embedded in R^(n+1); only the open
          hemisphere x[0] > 0 is admitted,
* K < 0   upper sheet of the hyperboloid <x,x>_L = 1/K in Minkowski space
          with signature (-,+,...,+), time coordinate first.

All trigonometric and hyperbolic arguments are scaled by kappa = sqrt(|K|),
so every formula has a well-defined K -> 0 limit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HemisphereError, InfeasibleError

COS_CLAMP_TOL = 1e-9
POINT_TOL = 1e-8


@dataclass(frozen=True)
class CurvedSpace:
    """Geometry selector: curvature k and dimension dim (kappa = sqrt(|k|))."""

    k: float
    dim: int

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError(f"dimension must be >= 2, got {self.dim}")

    @property
    def kappa(self) -> float:
        return float(np.sqrt(abs(self.k)))

    @property
    def ambient_dim(self) -> int:
        return self.dim if self.k == 0.0 else self.dim + 1

    @property
    def curved(self) -> bool:
        return self.k != 0.0


def lorentz_inner(x, y):
    """Minkowski inner product, signature (-,+,...,+), time coordinate first."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(np.dot(x[1:], y[1:]) - x[0] * y[0])


def ambient_inner(x, y, space: CurvedSpace) -> float:
    """Inner product of the ambient chart (Lorentzian for k < 0)."""
    if space.k < 0.0:
        return lorentz_inner(x, y)
    return float(np.dot(np.asarray(x, dtype=float), np.asarray(y, dtype=float)))


def basepoint(space: CurvedSpace) -> np.ndarray:
    """A canonical model point: the origin, or the pole e0 / kappa."""
    if space.k == 0.0:
        return np.zeros(space.dim)
    x = np.zeros(space.dim + 1)
    x[0] = 1.0 / space.kappa
    return x


def validate_point(x, space: CurvedSpace, tol: float = POINT_TOL) -> np.ndarray:
    """Check the model invariants for one point; returns the array."""
    x = np.asarray(x, dtype=float)
    if x.shape != (space.ambient_dim,):
        raise ValueError(f"point shape {x.shape} does not match ambient dim {space.ambient_dim}")
    if space.k == 0.0:
        return x
    q = ambient_inner(x, x, space)
    if abs(q * space.k - 1.0) > tol:
        raise InfeasibleError(f"point does not satisfy <x,x> = 1/K: got {q}, want {1.0 / space.k}")
    if x[0] <= 0.0:
        if space.k > 0.0:
            raise HemisphereError("spherical point outside the open hemisphere x[0] > 0")
        raise InfeasibleError("hyperboloid point not on the upper sheet")
    return x


def project_to_model(y, space: CurvedSpace) -> np.ndarray:
    """Rescale an ambient vector onto the model surface (identity for k = 0)."""
    y = np.asarray(y, dtype=float)
    if space.k == 0.0:
        return y
    q = ambient_inner(y, y, space)
    if q * space.k <= 0.0:
        raise InfeasibleError("vector cannot be scaled onto the model surface")
    x = y / np.sqrt(q * space.k)
    if x[0] < 0.0:
        x = -x
    return x


def geodesic_distance(p, q, space: CurvedSpace) -> float:
    """Geodesic distance between two model points (>= 0, symmetric)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    k, kappa = space.k, space.kappa
    if k == 0.0:
        return float(np.linalg.norm(q - p))
    if k < 0.0:
        # sinh(kappa d / 2) from the spacelike chord: well conditioned everywhere.
        chord = lorentz_inner(p - q, p - q)
        if chord < 0.0:
            chord = 0.0
        return 2.0 / kappa * float(np.arcsinh(kappa * np.sqrt(chord) / 2.0))
    c = k * float(np.dot(p, q))
    if c > 0.5:
        half_chord = kappa * float(np.linalg.norm(q - p)) / 2.0
        return 2.0 / kappa * float(np.arcsin(min(1.0, half_chord)))
    c = min(1.0, max(-1.0, c))
    return float(np.arccos(c)) / kappa


def cos_vertex_angle(a: float, b: float, c: float, space: CurvedSpace,
                     clamp_tol: float = COS_CLAMP_TOL) -> float:
    """Cosine of the angle between the sides of lengths a and b, opposite c.

    Values within clamp_tol of +-1 are clamped; beyond that the triple is not
    realizable in the given geometry and InfeasibleError is raised.
    """
    if a <= 0.0 or b <= 0.0:
        raise InfeasibleError(f"degenerate side lengths a={a}, b={b}")
    k, kappa = space.k, space.kappa
    if k == 0.0:
        v = (a * a + b * b - c * c) / (2.0 * a * b)
    elif k < 0.0:
        v = (np.cosh(kappa * a) * np.cosh(kappa * b) - np.cosh(kappa * c)) / (
            np.sinh(kappa * a) * np.sinh(kappa * b))
    else:
        v = (np.cos(kappa * c) - np.cos(kappa * a) * np.cos(kappa * b)) / (
            np.sin(kappa * a) * np.sin(kappa * b))
    v = float(v)
    if abs(v) > 1.0 + clamp_tol:
        raise InfeasibleError(f"triple ({a}, {b}, {c}) not realizable: |cos| = {abs(v)}")
    return min(1.0, max(-1.0, v))


def tangent_inner(x, y, space: CurvedSpace) -> float:
    """Inner product of tangent vectors (the ambient form restricted)."""
    return ambient_inner(x, y, space)


def tangent_norm(v, space: CurvedSpace) -> float:
    q = tangent_inner(v, v, space)
    return float(np.sqrt(max(0.0, q)))


def log_map(p, q, space: CurvedSpace) -> np.ndarray:
    """Tangent vector at p pointing to q with norm equal to the distance.

    Returns the zero vector for p = q (degenerate case, no error raised).
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if space.k == 0.0:
        return q - p
    d = geodesic_distance(p, q, space)
    if d == 0.0:
        return np.zeros_like(p)
    # Component of q orthogonal to p w.r.t. the ambient form, rescaled to d.
    u = q - (ambient_inner(p, q, space) * space.k) * p
    n = tangent_norm(u, space)
    if n == 0.0:
        return np.zeros_like(p)
    return u * (d / n)


def distances_to(x, points, space: CurvedSpace) -> np.ndarray:
    """Geodesic distances from one point to each row of points (vectorized)."""
    x = np.asarray(x, dtype=float)
    pts = np.asarray(points, dtype=float)
    k, kappa = space.k, space.kappa
    if k == 0.0:
        return np.linalg.norm(pts - x, axis=1)
    if k < 0.0:
        diff = pts - x
        chord = np.maximum(0.0, np.einsum("ij,ij->i", diff[:, 1:], diff[:, 1:]) - diff[:, 0] ** 2)
        return 2.0 / kappa * np.arcsinh(kappa * np.sqrt(chord) / 2.0)
    c = k * (pts @ x)
    out = np.empty(len(pts))
    near = c > 0.5
    if np.any(near):
        half = kappa * np.linalg.norm(pts[near] - x, axis=1) / 2.0
        out[near] = 2.0 / kappa * np.arcsin(np.minimum(1.0, half))
    far = ~near
    if np.any(far):
        out[far] = np.arccos(np.clip(c[far], -1.0, 1.0)) / kappa
    return out


def logs_to(x, points, space: CurvedSpace) -> tuple[np.ndarray, np.ndarray]:
    """Log maps from x toward each row of points, with their norms (= distances)."""
    x = np.asarray(x, dtype=float)
    pts = np.asarray(points, dtype=float)
    d = distances_to(x, pts, space)
    if space.k == 0.0:
        return pts - x, d
    if space.k < 0.0:
        inner = pts[:, 1:] @ x[1:] - pts[:, 0] * x[0]
        u = pts - (inner * space.k)[:, None] * x
        q = np.einsum("ij,ij->i", u[:, 1:], u[:, 1:]) - u[:, 0] ** 2
    else:
        inner = pts @ x
        u = pts - (inner * space.k)[:, None] * x
        q = np.einsum("ij,ij->i", u, u)
    n = np.sqrt(np.maximum(q, 0.0))
    fac = np.divide(d, n, out=np.zeros_like(d), where=n > 0)
    return u * fac[:, None], d


def exp_map(p, v, space: CurvedSpace) -> np.ndarray:
    """Point at distance |v| from p in direction v; exp(p, 0) = p."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    if space.k == 0.0:
        return p + v
    n = tangent_norm(v, space)
    if n == 0.0:
        return p.copy()
    kappa = space.kappa
    theta = kappa * n
    # renormalizing keeps repeated small steps from drifting off the model
    if space.k > 0.0:
        y = np.cos(theta) * p + np.sin(theta) / kappa * (v / n)
        x = y / (kappa * np.linalg.norm(y))
        if x[0] <= 0.0:
            raise HemisphereError("exp map left the open hemisphere")
        return x
    y = np.cosh(theta) * p + np.sinh(theta) / kappa * (v / n)
    q = lorentz_inner(y, y)
    return y / np.sqrt(q * space.k)
