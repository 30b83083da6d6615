"""Inverse weighted Fermat problems and tetrahedra with one vertex at infinity.

Inverse problem: given a point strictly inside a Euclidean simplex and a
weight-sum budget, the unique positive weights making it the weighted Fermat
point follow from Cramer's rule on sum B_i u_i = 0 (u_i the unit directions
to the vertices):  B_i is proportional to the parallelepiped volume of the
other unit directions, i.e. sqrt(det Gram(u_j : j != i)).  For a triangle
this reduces to B_i ~ sin(angle between the other two branches).

Vertex at infinity: place the fourth vertex at height M on the normal of the
triangle's weighted Fermat point; as M grows with weights B_i(M) = b_i M + c_i
(B_4 = 1), the solved tree point drops to the planar point at rate 1/M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError
from .geometry import CurvedSpace, geodesic_distance
from .solver import (FermatTree, SimplexRealization, classify_edges, solve_fermat,
                     validate_weights)
from .tetra3k import TetraConditionReport, tetra_multitree_conditions

DEGENERATE_GRAM_TOL = 1e-12


@dataclass(frozen=True)
class PlanarFermatSolution:
    """Closed-form planar tree: angle phi at vertex 0 and the three branches."""

    phi: float
    branches: np.ndarray

    @property
    def a1(self) -> float:
        return float(self.branches[0])


def weight_angle(wi: float, wj: float, wk: float) -> float:
    """Angle between branches i and j at a floating Fermat point (opposite k)."""
    c = (wk * wk - wi * wi - wj * wj) / (2.0 * wi * wj)
    if abs(c) > 1.0:
        raise InfeasibleError("weight triple admits no floating angle system")
    return math.acos(c)


def planar_fermat_phi(a12: float, a13: float, angle_213: float, weights) -> PlanarFermatSolution:
    """Closed-form weighted Fermat tree of a Euclidean triangle.

    a12, a13 are the sides from vertex 0 to vertices 1 and 2, angle_213 the
    angle between them.  phi is the angle at vertex 0 between the branch to
    the tree point and the side to vertex 2; branch lengths follow from the
    sine and cosine laws.  Caller must ensure the configuration is floating.
    """
    w = validate_weights(weights, 3)
    if not 0.0 < angle_213 < math.pi:
        raise ValueError("vertex angle must lie in (0, pi)")
    w12 = weight_angle(w[0], w[1], w[2])  # angle at tree point between branches 0,1
    w13 = weight_angle(w[0], w[2], w[1])  # angle at tree point between branches 0,2
    cot12 = math.cos(w12) / math.sin(w12)
    cot13 = math.cos(w13) / math.sin(w13)
    num = math.sin(angle_213) - math.cos(angle_213) * cot12 - (a13 / a12) * cot13
    den = -math.cos(angle_213) - math.sin(angle_213) * cot12 + a13 / a12
    phi = math.atan2(den, num)  # arccot(num / den) with the right quadrant
    if not 0.0 < phi < angle_213:
        raise InfeasibleError(f"tree angle phi = {phi} outside (0, {angle_213})")
    a1 = math.sin(phi + w13) * a13 / math.sin(w13)
    a2 = math.sqrt(a1 * a1 + a12 * a12 - 2.0 * a1 * a12 * math.cos(angle_213 - phi))
    a3 = math.sqrt(a1 * a1 + a13 * a13 - 2.0 * a1 * a13 * math.cos(phi))
    return PlanarFermatSolution(phi, np.array([a1, a2, a3]))


def unit_directions(a0, points, space: CurvedSpace) -> np.ndarray:
    from .geometry import logs_to

    v, d = logs_to(np.asarray(a0, dtype=float), np.asarray(points, dtype=float), space)
    if np.any(d <= 0):
        raise InfeasibleError("point coincides with a vertex")
    return v / d[:, None]


def inverse_weights(a0, realization: SimplexRealization, csum: float) -> np.ndarray:
    """Positive weights (summing to csum) making a0 the weighted Fermat point.

    Cramer's rule on the stationarity condition: B_i proportional to
    sqrt(det Gram(u_j : j != i)).  Requires a0 strictly interior (every
    complementary Gram determinant bounded away from zero).
    """
    if csum <= 0:
        raise ValueError("weight sum must be positive")
    pts = realization.points
    m = len(pts)
    u = unit_directions(a0, pts, realization.space)
    if realization.space.k < 0.0:
        gram_all = u[:, 1:] @ u[:, 1:].T - np.outer(u[:, 0], u[:, 0])
    else:
        gram_all = u @ u.T
    raw = np.empty(m)
    for i in range(m):
        others = [j for j in range(m) if j != i]
        g = gram_all[np.ix_(others, others)]
        det = float(np.linalg.det(g))
        if det < DEGENERATE_GRAM_TOL:
            raise InfeasibleError(
                f"point is on (or numerically on) the face opposite vertex {i}")
        raw[i] = math.sqrt(det)
    return raw * (csum / raw.sum())


def inverse_condition(a0, realization: SimplexRealization) -> float:
    """Conditioning of the inverse problem: min/max complementary Gram det."""
    pts = realization.points
    m = len(pts)
    u = unit_directions(a0, pts, realization.space)
    if realization.space.k < 0.0:
        gram_all = u[:, 1:] @ u[:, 1:].T - np.outer(u[:, 0], u[:, 0])
    else:
        gram_all = u @ u.T
    dets = []
    for i in range(m):
        others = [j for j in range(m) if j != i]
        dets.append(abs(float(np.linalg.det(gram_all[np.ix_(others, others)]))))
    return min(dets) / max(max(dets), 1e-300)


def inverse_weights_triangle(a0, realization: SimplexRealization, csum: float) -> np.ndarray:
    if realization.m != 3:
        raise ValueError("triangle inverse needs 3 vertices")
    return inverse_weights(a0, realization, csum)


def inverse_weights_tetrahedron(a0, realization: SimplexRealization, csum: float) -> np.ndarray:
    if realization.m != 4:
        raise ValueError("tetrahedron inverse needs 4 vertices")
    return inverse_weights(a0, realization, csum)


@dataclass(frozen=True)
class InfinityFamily:
    """Triangle plus linearly M-dependent weights B_i(M) = b_i M + c_i, B_4 = 1."""

    a12: float
    a13: float
    a23: float
    b: tuple[float, float, float]
    c: tuple[float, float, float]

    def __post_init__(self):
        for x in (self.a12, self.a13, self.a23):
            if x <= 0:
                raise ValueError("triangle edges must be positive")
        if (self.a12 + self.a13 <= self.a23 or self.a12 + self.a23 <= self.a13
                or self.a13 + self.a23 <= self.a12):
            raise InfeasibleError("triangle inequality violated")

    def weights_at(self, m: float) -> np.ndarray:
        w = np.array(self.b) * m + np.array(self.c)
        if np.any(w <= 0):
            raise InfeasibleError(f"weights not positive at M = {m}")
        return w

    @property
    def angle_213(self) -> float:
        c = (self.a12**2 + self.a13**2 - self.a23**2) / (2.0 * self.a12 * self.a13)
        return math.acos(min(1.0, max(-1.0, c)))

    def triangle_points(self) -> np.ndarray:
        """Vertices in the z = 0 plane: vertex 0 at the origin, vertex 2 on +x."""
        ang = self.angle_213
        return np.array([
            [0.0, 0.0, 0.0],
            [self.a12 * math.cos(ang), self.a12 * math.sin(ang), 0.0],
            [self.a13, 0.0, 0.0],
        ])

    def base_solution(self, m: float) -> tuple[PlanarFermatSolution, np.ndarray]:
        """Planar tree at the weights of parameter m, plus the base point coords."""
        sol = planar_fermat_phi(self.a12, self.a13, self.angle_213, self.weights_at(m))
        base = sol.a1 * np.array([math.cos(sol.phi), math.sin(sol.phi), 0.0])
        return sol, base


@dataclass
class InfinityGeometry:
    a41: float
    a42: float
    a43: float
    alpha_g4: float
    h412: float
    base: PlanarFermatSolution


def infinity_distances(fam: InfinityFamily, m: float) -> InfinityGeometry:
    """Edge data of the tetrahedron with the fourth vertex at height m.

    The fourth vertex sits on the normal to the triangle plane through the
    planar weighted Fermat point, so a_4i = sqrt(m^2 + branch_i^2) by the
    right-triangle relation.  The boundary dihedral along edge (0,1) is
    measured on the explicit coordinates (nan for the degenerate m = 0 case).
    """
    from .tetra3k import dihedral_angle, h012

    sol, base = fam.base_solution(m)
    a41, a42, a43 = (math.sqrt(m * m + t * t) for t in sol.branches)
    h = h012(a41, a42, fam.a12, 0.0)
    if m == 0.0:
        ag4 = math.nan
    else:
        pts = np.vstack([fam.triangle_points(), base + np.array([0.0, 0.0, m])])
        ag4 = dihedral_angle(pts, 0, 1, 2, 3, CurvedSpace(0.0, 3))
    return InfinityGeometry(a41, a42, a43, ag4, h, sol)


def _tetra_edges(fam: InfinityFamily, m: float) -> np.ndarray:
    sol, base = fam.base_solution(m)
    a41, a42, a43 = (math.sqrt(m * m + t * t) for t in sol.branches)
    e = np.zeros((4, 4))
    e[0, 1] = e[1, 0] = fam.a12
    e[0, 2] = e[2, 0] = fam.a13
    e[1, 2] = e[2, 1] = fam.a23
    e[0, 3] = e[3, 0] = a41
    e[1, 3] = e[3, 1] = a42
    e[2, 3] = e[3, 2] = a43
    return e


@dataclass
class InfinityTreeResult:
    tree: FermatTree
    realization: SimplexRealization
    edges: np.ndarray
    base_point: np.ndarray
    base: PlanarFermatSolution
    conditions: TetraConditionReport | None
    m: float
    weights: np.ndarray


def solve_infinity_tree(fam: InfinityFamily, m: float, tol: float | None = None) -> InfinityTreeResult:
    """Full weighted Fermat tree of the tetrahedron with apex at height m."""
    space = CurvedSpace(0.0, 3)
    sol, base = fam.base_solution(m)
    pts = np.vstack([fam.triangle_points(), base + np.array([0.0, 0.0, m])])
    realization = SimplexRealization(pts, space)
    w = np.append(fam.weights_at(m), 1.0)
    tree = solve_fermat(realization, w, tol)
    conditions = None
    if tree.classification.floating:
        conditions = tetra_multitree_conditions(tree, realization.edge_matrix(), w, space)
    return InfinityTreeResult(tree, realization, realization.edge_matrix(), base, sol,
                              conditions, m, w)


def infinity_limit_inverse(fam: InfinityFamily, tol: float = 1e-12) -> np.ndarray:
    """Limit weights of the inverse problem along the family (constant total).

    Requires b_1 + b_2 + b_3 = 0, which keeps the total weight constant at
    C = 1 + c_1 + c_2 + c_3.  Positivity of b_i M + c_i for arbitrarily large
    M then forces b = 0, so the limit triangle data is the one at the constant
    weights c; the result is the triangle inverse solution at the planar tree
    point, normalized to C.
    """
    b = np.array(fam.b)
    if abs(float(b.sum())) > tol:
        raise InfeasibleError("limit mode requires b_1 + b_2 + b_3 = 0")
    if np.any(np.abs(b) > tol):
        raise InfeasibleError(
            "no positive large-M limit: b_1 + b_2 + b_3 = 0 with some b_i != 0 "
            "makes a weight negative for large M")
    csum = 1.0 + float(np.sum(fam.c))
    sol, base = fam.base_solution(0.0)
    tri = SimplexRealization(fam.triangle_points()[:, :2], CurvedSpace(0.0, 2))
    return inverse_weights_triangle(base[:2], tri, csum)


def classify_triangle_weights(fam: InfinityFamily, m: float) -> bool:
    """True when the triangle problem at parameter m is floating."""
    e = np.zeros((3, 3))
    e[0, 1] = e[1, 0] = fam.a12
    e[0, 2] = e[2, 0] = fam.a13
    e[1, 2] = e[2, 1] = fam.a23
    return classify_edges(e, fam.weights_at(m), CurvedSpace(0.0, 2)).floating
