"""Branch lengths of an interior point of a tetrahedron in the 3-dimensional
space of curvature K, parameterized by (a01, a02, alpha).

Vertices are labeled 0..3; a01 and a02 are the distances from the interior
point to vertices 0 and 1 (kept with their historical names), and alpha is
the dihedral angle along edge (0,1) between the plane through vertex 2 and
the plane through the interior point.  The remaining two branch lengths then
follow in closed form from the geometry's laws of sines and cosines; the
curved identities are

  cos k a03 = cos k a02 cos k a23
              + sin k a23 [cos k h cos(g123) sin k l + sin(g123) sin k h cos(alpha)]

(k > 0, with cosh/sinh and a minus sign on the bracket for k < 0, and the
squared-length expansion for k = 0), where h is the altitude of the interior
point over edge (0,1), l the foot offset from vertex 1, and g123 the face
angle at vertex 1.  The vertex-3 branch uses the complementary dihedral
alpha_g4 - alpha, with alpha_g4 the dihedral between the two boundary faces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError
from .geometry import (CurvedSpace, cos_vertex_angle, geodesic_distance, log_map,
                       tangent_inner, tangent_norm)
from .realizability import check_edge_matrix, euclidean_volume, realize_in_space, \
    triangle_area_curved
from .solver import FermatTree, SimplexRealization, first_order_residual, \
    realization_from_witness, replace_vertex_edges, validate_weights

ALPHA_CLAMP_TOL = 1e-8


def h012(a01: float, a02: float, a12: float, k: float) -> float:
    """Altitude from the interior point onto the edge joining vertices 0 and 1.

    a01, a02 are the point's distances to the edge endpoints, a12 the edge
    length itself.
    """
    space = CurvedSpace(k, 2)
    c = cos_vertex_angle(a01, a02, a12, space)
    s = math.sqrt(max(0.0, 1.0 - c * c))
    if k == 0.0:
        return a01 * a02 / a12 * s
    kap = space.kappa
    if k > 0.0:
        arg = math.sin(kap * a01) * math.sin(kap * a02) * s / math.sin(kap * a12)
        return math.asin(min(1.0, arg)) / kap
    arg = math.sinh(kap * a01) * math.sinh(kap * a02) * s / math.sinh(kap * a12)
    return math.asinh(arg) / kap


def foot_offset(a0v: float, h: float, k: float) -> float:
    """Distance from an edge endpoint to the foot of the altitude h, given the
    endpoint distance a0v (right-triangle relation of the geometry)."""
    if k == 0.0:
        return math.sqrt(max(0.0, a0v * a0v - h * h))
    kap = math.sqrt(abs(k))
    if k > 0.0:
        c = math.cos(kap * a0v) / math.cos(kap * h)
        return math.acos(min(1.0, max(-1.0, c))) / kap
    c = math.cosh(kap * a0v) / math.cosh(kap * h)
    return math.acosh(max(1.0, c)) / kap


def _face_angle(edges: np.ndarray, target: int, k: float) -> tuple[float, float]:
    """cos and sin of the face angle at vertex 1 toward the target vertex."""
    space = CurvedSpace(k, 2)
    c = cos_vertex_angle(edges[0, 1], edges[1, target], edges[0, target], space)
    return c, math.sqrt(max(0.0, 1.0 - c * c))


def _branch_from_dihedral(a01: float, a02: float, dihedral: float, edges: np.ndarray,
                          k: float, target: int) -> float:
    h = h012(a01, a02, edges[0, 1], k)
    cg, sg = _face_angle(edges, target, k)
    a2t = edges[1, target]
    if k == 0.0:
        l = foot_offset(a02, h, 0.0)
        val = a02**2 + a2t**2 - 2.0 * a2t * (l * cg + h * sg * math.cos(dihedral))
        if val < 0:
            raise InfeasibleError("no real branch length for this configuration")
        return math.sqrt(val)
    kap = math.sqrt(abs(k))
    l = foot_offset(a02, h, k)
    if k > 0.0:
        c = (math.cos(kap * a02) * math.cos(kap * a2t)
             + math.sin(kap * a2t) * math.cos(kap * h) * cg * math.sin(kap * l)
             + math.sin(kap * a2t) * sg * math.sin(kap * h) * math.cos(dihedral))
        if abs(c) > 1.0 + ALPHA_CLAMP_TOL:
            raise InfeasibleError(f"branch cosine {c} out of range")
        return math.acos(min(1.0, max(-1.0, c))) / kap
    c = (math.cosh(kap * a02) * math.cosh(kap * a2t)
         - math.sinh(kap * a2t) * (math.cosh(kap * h) * cg * math.sinh(kap * l)
                                   + sg * math.sinh(kap * h) * math.cos(dihedral)))
    if c < 1.0 - ALPHA_CLAMP_TOL:
        raise InfeasibleError(f"branch hyperbolic cosine {c} below 1")
    return math.acosh(max(1.0, c)) / kap


def dihedral_angle(points, i: int, j: int, p: int, q: int, space: CurvedSpace) -> float:
    """Dihedral along edge (i, j) between the half-planes through p and q."""
    pts = np.asarray(points, dtype=float)
    u = log_map(pts[i], pts[j], space)
    u = u / tangent_norm(u, space)
    w = []
    for t in (p, q):
        vt = log_map(pts[i], pts[t], space)
        vt = vt / tangent_norm(vt, space)
        wt = vt - tangent_inner(vt, u, space) * u
        n = tangent_norm(wt, space)
        if n < 1e-14:
            raise InfeasibleError("point lies on the dihedral edge")
        w.append(wt / n)
    c = tangent_inner(w[0], w[1], space)
    return math.acos(min(1.0, max(-1.0, c)))


def boundary_dihedral(edges, k: float) -> float:
    """Dihedral angle along edge (0,1) between the faces through 2 and through 3."""
    edges = check_edge_matrix(edges)
    space = CurvedSpace(k, 3)
    rep = realize_in_space(edges, space)
    if not rep.realizable:
        raise InfeasibleError(f"boundary tetrahedron not realizable: {rep.cause}")
    real = realization_from_witness(rep.witness, space)
    return dihedral_angle(real.points, 0, 1, 2, 3, space)


def euclidean_alpha_g4(edges) -> float:
    """Closed Euclidean form of the boundary dihedral along edge (0,1).

    Valid when the foot of the perpendicular from vertex 3 onto edge (0,1)
    falls between the endpoints (acute feet); use boundary_dihedral otherwise.
    """
    edges = check_edge_matrix(edges)
    a42, a23, a43 = edges[1, 3], edges[1, 2], edges[2, 3]
    h4 = h012(edges[0, 3], a42, edges[0, 1], 0.0)
    cg, sg = _face_angle(edges, 2, 0.0)
    num = (a42**2 + a23**2 - a43**2) / (2.0 * a23) - math.sqrt(max(0.0, a42**2 - h4**2)) * cg
    c = num / (h4 * sg)
    if abs(c) > 1.0 + ALPHA_CLAMP_TOL:
        raise InfeasibleError(f"dihedral cosine {c} out of range")
    return math.acos(min(1.0, max(-1.0, c)))


def a03_of(a01: float, a02: float, alpha: float, edges, k: float) -> float:
    """Branch to vertex 2 from the point at (a01, a02, alpha)."""
    edges = check_edge_matrix(edges)
    return _branch_from_dihedral(a01, a02, alpha, edges, k, target=2)


def a04_of(a01: float, a02: float, alpha: float, edges, k: float,
           alpha_g4: float | None = None) -> float:
    """Branch to vertex 3; uses the complementary dihedral alpha_g4 - alpha."""
    edges = check_edge_matrix(edges)
    if alpha_g4 is None:
        alpha_g4 = boundary_dihedral(edges, k)
    return _branch_from_dihedral(a01, a02, alpha_g4 - alpha, edges, k, target=3)


def euclidean_a03_a04(a01: float, a02: float, alpha: float, edges) -> tuple[float, float]:
    """Euclidean specialization returning both remaining branches.

    The boundary dihedral is measured on an embedding; the printed closed form
    (euclidean_alpha_g4) silently picks the wrong branch of the square root
    when the perpendicular foot of vertex 3 leaves the edge segment.
    """
    edges = check_edge_matrix(edges)
    ag4 = boundary_dihedral(edges, 0.0)
    return (_branch_from_dihedral(a01, a02, alpha, edges, 0.0, target=2),
            _branch_from_dihedral(a01, a02, ag4 - alpha, edges, 0.0, target=3))


def solve_alpha(a01: float, a02: float, a03: float, edges, k: float) -> float:
    """Invert the vertex-2 branch identity for the dihedral angle alpha."""
    edges = check_edge_matrix(edges)
    h = h012(a01, a02, edges[0, 1], k)
    cg, sg = _face_angle(edges, 2, k)
    a2t = edges[1, 2]
    if sg <= 0.0 or h <= 0.0:
        raise InfeasibleError("degenerate configuration: face angle or altitude vanishes")
    if k == 0.0:
        l = foot_offset(a02, h, 0.0)
        c = (a02**2 + a2t**2 - a03**2 - 2.0 * a2t * l * cg) / (2.0 * a2t * h * sg)
    else:
        kap = math.sqrt(abs(k))
        l = foot_offset(a02, h, k)
        if k > 0.0:
            c = (math.cos(kap * a03) - math.cos(kap * a02) * math.cos(kap * a2t)
                 - math.sin(kap * a2t) * math.cos(kap * h) * cg * math.sin(kap * l)) / (
                math.sin(kap * a2t) * sg * math.sin(kap * h))
        else:
            c = (math.cosh(kap * a02) * math.cosh(kap * a2t) - math.cosh(kap * a03)
                 - math.sinh(kap * a2t) * math.cosh(kap * h) * cg * math.sinh(kap * l)) / (
                math.sinh(kap * a2t) * sg * math.sinh(kap * h))
    if abs(c) > 1.0 + ALPHA_CLAMP_TOL:
        raise InfeasibleError(f"no real dihedral: cos alpha = {c}")
    return math.acos(min(1.0, max(-1.0, c)))


def eliminate_alpha(a01: float, a02: float, a03: float, edges, k: float) -> float:
    """Fourth branch as a function of the first three (dihedral eliminated)."""
    alpha = solve_alpha(a01, a02, a03, edges, k)
    return a04_of(a01, a02, alpha, edges, k)


@dataclass
class TetraConfig:
    """Interior-point parameterization with its derived quantities exposed."""

    edges: np.ndarray
    a01: float
    a02: float
    alpha: float
    k: float

    def __post_init__(self):
        self.edges = check_edge_matrix(self.edges)
        if self.edges.shape[0] != 4:
            raise ValueError("need a 4-vertex boundary")

    def derived(self) -> dict[str, float]:
        k, kap = self.k, math.sqrt(abs(self.k))
        h = h012(self.a01, self.a02, self.edges[0, 1], k)
        l = foot_offset(self.a02, h, k)
        if k == 0.0:
            d = h * math.cos(self.alpha)
            h0123 = h * math.sin(self.alpha)
            x2 = math.hypot(d, l)
        elif k > 0.0:
            d = math.atan(math.tan(kap * h) * math.cos(self.alpha)) / kap
            h0123 = math.asin(math.sin(kap * h) * math.sin(self.alpha)) / kap
            x2 = math.acos(math.cos(kap * d) * math.cos(kap * l)) / kap
        else:
            d = math.atanh(math.tanh(kap * h) * math.cos(self.alpha)) / kap
            h0123 = math.asinh(math.sinh(kap * h) * math.sin(self.alpha)) / kap
            x2 = math.acosh(math.cosh(kap * d) * math.cosh(kap * l)) / kap
        beta = math.asin(min(1.0, (d / x2) if k == 0.0 else (
            math.sin(kap * d) / math.sin(kap * x2) if k > 0.0
            else math.sinh(kap * d) / math.sinh(kap * x2)))) if x2 > 0 else 0.0
        ag4 = euclidean_alpha_g4(self.edges) if k == 0.0 else boundary_dihedral(self.edges, k)
        return {"h012": h, "l": l, "d": d, "h0123": h0123, "x2": x2, "beta": beta,
                "alpha_g4": ag4}

    def branches(self) -> tuple[float, float]:
        return (a03_of(self.a01, self.a02, self.alpha, self.edges, self.k),
                a04_of(self.a01, self.a02, self.alpha, self.edges, self.k))


@dataclass
class TetraConditionReport:
    first_order: float
    ratio_residuals: np.ndarray | None
    ratio_constant: float | None
    volume_inequalities: list[bool] | None
    volume_status: str


def tetra_multitree_conditions(tree: FermatTree, edges, weights,
                               space: CurvedSpace) -> TetraConditionReport:
    """Stationarity and volume conditions of a tetrahedron tree.

    The first-order part applies in every geometry.  The volume-ratio part is
    Euclidean: at a floating tree the barycentric coordinates of the tree
    point are proportional to B_i / a_i, so
        (B_i / (a_i Vol(sub_i)))^2 = C^2,   C = (sum B_i / a_i) / Vol,
    where sub_i replaces vertex i by the tree point.  Volume comparisons
    against the regular mean-edge simplex are evaluated for k = 0 (volumes)
    and k > 0 (face triangle areas); otherwise reported as not checked.
    """
    edges = check_edge_matrix(edges)
    if edges.shape[0] != 4:
        raise ValueError("tetrahedron conditions need 4 boundary vertices")
    w = validate_weights(weights, 4)
    if not tree.classification.floating:
        raise InfeasibleError("conditions apply to floating trees only")
    fo = first_order_residual(tree, edges, w, space)
    b = np.asarray(tree.branches, dtype=float)
    mean_edge = float(edges[np.triu_indices(4, 1)].mean())

    if space.k == 0.0:
        vol = euclidean_volume(edges)
        subs = np.array([euclidean_volume(replace_vertex_edges(edges, b, j))
                         for j in range(4)])
        if np.any(subs <= 0):
            raise InfeasibleError("tree point lies on a face: degenerate sub-tetrahedron")
        c = float(np.sum(w / b)) / vol
        ratios = (w / (b * subs)) ** 2
        resid = np.abs(ratios - c * c) / (c * c)
        reg_vol = mean_edge**3 / (6.0 * math.sqrt(2.0))
        ineqs = [bool(s < reg_vol) for s in subs]
        return TetraConditionReport(fo, resid, c, ineqs, "euclidean volumes")
    if space.k > 0.0:
        reg_area = triangle_area_curved(mean_edge, mean_edge, mean_edge, space.k)
        ineqs = []
        for i in range(4):
            for j in range(i + 1, 4):
                area = triangle_area_curved(b[i], b[j], edges[i, j], space.k)
                ineqs.append(bool(area < reg_area))
        return TetraConditionReport(fo, None, None, ineqs, "spherical face areas")
    return TetraConditionReport(fo, None, None, None, "not checked")
