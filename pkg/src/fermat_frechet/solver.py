"""Weighted Fermat trees on realized simplexes.

Classification (floating vs absorbed at a vertex) works from edge lengths
alone: the point minimizing sum B_i d(X, A_i) is vertex k exactly when

    sum_{i<j, i,j != k} B_i B_j cos(angle A_i A_k A_j)
        <= (B_k^2 - sum_{i != k} B_i^2) / 2,

with the vertex angles taken from the geometry's law of cosines; this is the
squared form of |sum_{i != k} B_i u_i| <= B_k for the unit tangents u_i at
vertex k.  Floating trees are solved by geodesic gradient descent with an
Armijo backtracking line search, initialized at the weighted ambient mean
projected to the model.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .enumeration import (EnumerationOptions, FrechetMultisimplex, Member,
                          enumerate_incongruent, worker_count)
from .errors import HemisphereError, InfeasibleError, NumericalError
from .geometry import (CurvedSpace, cos_vertex_angle, distances_to, exp_map,
                       geodesic_distance, log_map, logs_to, project_to_model,
                       tangent_norm)
from .realizability import check_edge_matrix, euclidean_volume

ARMIJO_C1 = 1e-4
ARMIJO_FACTOR = 0.5
DEFAULT_MAX_ITER = 100_000
STATIONARY_TOL_FACTOR = 1e-9


def validate_weights(w, m: int) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (m,):
        raise ValueError(f"need {m} weights, got shape {w.shape}")
    if np.any(w <= 0):
        raise ValueError("weights must be positive")
    return w


@dataclass
class SimplexRealization:
    """Model coordinates of the m vertices of a realized simplex."""

    points: np.ndarray
    space: CurvedSpace

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] != self.space.ambient_dim:
            raise ValueError(
                f"points shape {self.points.shape} does not match ambient dim "
                f"{self.space.ambient_dim}")

    @property
    def m(self) -> int:
        return self.points.shape[0]

    def edge_matrix(self) -> np.ndarray:
        m = self.m
        a = np.zeros((m, m))
        for i in range(m):
            for j in range(i + 1, m):
                a[i, j] = a[j, i] = geodesic_distance(self.points[i], self.points[j], self.space)
        return a


def realization_from_witness(witness: np.ndarray, space: CurvedSpace) -> SimplexRealization:
    pts = np.asarray(witness, dtype=float)
    if space.k == 0.0 and pts.shape[1] < space.dim:
        pts = np.hstack([pts, np.zeros((pts.shape[0], space.dim - pts.shape[1]))])
    return SimplexRealization(pts, space)


@dataclass(frozen=True)
class Classification:
    kind: str  # "floating" | "absorbed"
    vertex: int | None = None
    violating: tuple[int, ...] = ()

    @property
    def floating(self) -> bool:
        return self.kind == "floating"


@dataclass
class FermatTree:
    point: np.ndarray
    branches: np.ndarray
    classification: Classification
    objective: float
    residual: float
    iterations: int = 0


def check_spherical_admissibility(edges: np.ndarray, space: CurvedSpace) -> None:
    """Convexity-radius bound for k > 0: max edge <= pi / (4 kappa)."""
    if space.k > 0.0:
        bound = math.pi / (4.0 * space.kappa)
        ell = float(edges.max())
        if ell > bound * (1 + 1e-12):
            raise InfeasibleError(
                f"spherical convexity radius violated: max edge {ell} > pi/(4 kappa) = {bound}")


def classify_edges(edges, weights, space: CurvedSpace,
                   enforce_convexity_radius: bool = True) -> Classification:
    """Floating/absorbed decision from edge lengths and weights alone."""
    edges = check_edge_matrix(edges)
    m = edges.shape[0]
    w = validate_weights(weights, m)
    if enforce_convexity_radius:
        check_spherical_admissibility(edges, space)
    violating = []
    for k in range(m):
        others = [i for i in range(m) if i != k]
        lhs = 0.0
        for a_pos, i in enumerate(others):
            for j in others[a_pos + 1 :]:
                lhs += w[i] * w[j] * cos_vertex_angle(edges[i, k], edges[j, k], edges[i, j], space)
        rhs = (w[k] ** 2 - float(np.sum(w[others] ** 2))) / 2.0
        if lhs <= rhs:
            violating.append(k)
    if violating:
        return Classification("absorbed", violating[0], tuple(violating))
    return Classification("floating")


def classify(realization: SimplexRealization, weights, space: CurvedSpace | None = None,
             enforce_convexity_radius: bool = True) -> Classification:
    space = space or realization.space
    return classify_edges(realization.edge_matrix(), weights, space, enforce_convexity_radius)


def _objective(x, points, w, space) -> float:
    return float(np.dot(w, distances_to(x, points, space)))


def _descent_direction(x, points, w, space):
    """(sum of weighted unit tangents toward the vertices, min vertex distance)."""
    v, d = logs_to(x, points, space)
    imin = int(np.argmin(d))
    dmin = float(d[imin])
    coef = np.divide(w, d, out=np.zeros_like(d), where=d > 0)
    return coef @ v, dmin, imin


def _absorbed_tree(realization: SimplexRealization, w, k: int,
                   cls: Classification | None = None) -> FermatTree:
    space = realization.space
    pts = realization.points
    branches = np.array([geodesic_distance(pts[k], p, space) for p in pts])
    others = [i for i in range(len(pts)) if i != k]
    g = np.zeros(pts.shape[1])
    for i in others:
        v = log_map(pts[k], pts[i], space)
        g = g + w[i] * v / tangent_norm(v, space)
    margin = max(0.0, tangent_norm(g, space) - w[k])
    cls = cls or Classification("absorbed", k, (k,))
    return FermatTree(pts[k].copy(), branches, cls, float(np.dot(w, branches)), margin)


def _initial_point(realization: SimplexRealization, w) -> np.ndarray:
    space = realization.space
    mean = (w[:, None] * realization.points).sum(axis=0) / w.sum()
    if space.k == 0.0:
        return mean
    return project_to_model(mean, space)


def _tangent_basis(x, space: CurvedSpace) -> np.ndarray:
    """Orthonormal tangent basis at x, rows of shape (dim, ambient)."""
    from .geometry import ambient_inner, tangent_inner as t_inner

    if space.k == 0.0:
        return np.eye(space.dim)
    amb = space.dim + 1
    basis: list[np.ndarray] = []
    for i in range(amb):
        e = np.zeros(amb)
        e[i] = 1.0
        v = e - (ambient_inner(e, x, space) * space.k) * x
        for b in basis:
            v = v - t_inner(v, b, space) * b
        n = tangent_norm(v, space)
        if n > 1e-8:
            basis.append(v / n)
        if len(basis) == space.dim:
            break
    return np.array(basis)


def _tangent_coords(vectors: np.ndarray, basis: np.ndarray, space: CurvedSpace) -> np.ndarray:
    if space.k < 0.0:
        return vectors[:, 1:] @ basis[:, 1:].T - np.outer(vectors[:, 0], basis[:, 0])
    return vectors @ basis.T


def _newton_polish(x, pts, w, space, tol, budget):
    """Newton iteration on sum B_i u_i = 0 in tangent coordinates.

    The Hessian of d(., A_i) orthogonal to the branch direction is 1/d_i for
    k = 0, kappa cot(kappa d_i) for k > 0 and kappa coth(kappa d_i) for k < 0
    (zero along the branch), so H = sum B_i c_i (I - u_i u_i^T) exactly.
    """
    g, _, _ = _descent_direction(x, pts, w, space)
    gn = tangent_norm(g, space)
    it = 0
    kap = space.kappa
    while gn > tol and it < min(budget, 100):
        it += 1
        basis = _tangent_basis(x, space)
        v, d = logs_to(x, pts, space)
        u = v / d[:, None]
        uc = _tangent_coords(u, basis, space)
        if space.k == 0.0:
            c = 1.0 / d
        elif space.k > 0.0:
            c = kap / np.tan(kap * d)
        else:
            c = kap / np.tanh(kap * d)
        h = np.zeros((space.dim, space.dim))
        for wi, ci, ui in zip(w, c, uc):
            h += wi * ci * (np.eye(space.dim) - np.outer(ui, ui))
        gc = _tangent_coords(g[None, :], basis, space)[0]
        try:
            sc = np.linalg.solve(h, gc)
        except np.linalg.LinAlgError:
            break
        s = sc @ basis
        improved = False
        for _ in range(12):
            try:
                xt = exp_map(x, s, space)
            except HemisphereError:
                s = 0.5 * s
                continue
            gt, _, _ = _descent_direction(xt, pts, w, space)
            gnt = tangent_norm(gt, space)
            if gnt < gn:
                x, g, gn = xt, gt, gnt
                improved = True
                break
            s = 0.5 * s
        if not improved:
            break
    return x, gn, it


def solve_fermat(realization: SimplexRealization, weights, tol: float | None = None,
                 max_iter: int = DEFAULT_MAX_ITER,
                 enforce_convexity_radius: bool = True) -> FermatTree:
    """Minimize sum B_i d(X, A_i) by geodesic gradient descent.

    Returns the absorbed tree immediately when classification says so.  The
    objective is nonincreasing across accepted steps; termination is on the
    weighted-unit-tangent residual |sum B_i u_i| <= tol
    (default 1e-9 * sum B_i).
    """
    space = realization.space
    pts = realization.points
    m = realization.m
    w = validate_weights(weights, m)
    edges = realization.edge_matrix()
    cls = classify_edges(edges, w, space, enforce_convexity_radius)
    if not cls.floating:
        return _absorbed_tree(realization, w, cls.vertex, cls)
    if tol is None:
        tol = STATIONARY_TOL_FACTOR * float(w.sum())

    scale = float(edges.max())
    x = _initial_point(realization, w)
    f = _objective(x, pts, w, space)
    eta = 0.25 * scale / float(w.sum())
    g, _, _ = _descent_direction(x, pts, w, space)
    gn = tangent_norm(g, space)
    it = 0

    # Phase 1: Armijo backtracking on the objective, until the demanded
    # decrease falls below the evaluation noise of f.
    while it < max_iter:
        it += 1
        g, dmin, imin = _descent_direction(x, pts, w, space)
        gn = tangent_norm(g, space)
        if gn <= tol:
            break
        if dmin < 1e-9 * scale:
            sub = g.copy()
            v = log_map(x, pts[imin], space)
            nv = tangent_norm(v, space)
            if nv > 0:
                sub = sub - w[imin] * v / nv
            if tangent_norm(sub, space) <= w[imin]:
                # converged onto a vertex that absorbs: genuine vertex solution
                return _absorbed_tree(realization, w, imin)
        noise = 8.0 * np.finfo(float).eps * (1.0 + abs(f))
        step = eta / ARMIJO_FACTOR
        accepted = False
        exhausted = False
        for _ in range(80):
            step *= ARMIJO_FACTOR
            if ARMIJO_C1 * step * gn * gn < noise:
                exhausted = True
                break
            try:
                xt = exp_map(x, step * g, space)
            except HemisphereError:
                continue
            ft = _objective(xt, pts, w, space)
            if ft <= f - ARMIJO_C1 * step * gn * gn:
                accepted = True
                break
        if accepted:
            x, f, eta = xt, ft, step
            continue
        if exhausted:
            break
        raise NumericalError(f"line search stalled at iteration {it} (|g| = {gn})")

    # Phase 2: the objective is flat to machine precision; polish with Newton
    # steps on the stationarity field (the constant-curvature Hessian of the
    # distance function is available in closed form), monitored on the
    # gradient norm, which stays reliable below the f noise.
    if gn > tol:
        x, gn, it2 = _newton_polish(x, pts, w, space, tol, max_iter - it)
        it += it2
        f = _objective(x, pts, w, space)

    if gn > tol:
        raise NumericalError(f"no convergence within {max_iter} iterations (|g| = {gn})")

    branches = np.array([geodesic_distance(x, p, space) for p in pts])
    return FermatTree(x, branches, cls, float(np.dot(w, branches)), gn, it)


def first_order_residual(tree: FermatTree, edges, weights, space: CurvedSpace) -> float:
    """Maximum violation of the subtracted stationarity identities.

    In every geometry the projection of the weighted unit-tangent sum on the
    direction of branch j vanishes at a floating tree:
        P_j = B_j + sum_{i != j} B_i cos(angle A_i A_0 A_j) = 0,
    so P_1 - P_j = 0 for j = 2..m.  For k = 0 this subtraction is evaluated in
    the polynomial form (each P scaled by 2 a_{0 j}), whose right-hand side
    carries the -2 (B_1 a_01 - B_j a_0j) weight terms.
    """
    if not tree.classification.floating:
        raise InfeasibleError("first-order identities apply to floating trees only")
    edges = check_edge_matrix(edges)
    m = edges.shape[0]
    w = validate_weights(weights, m)
    b = np.asarray(tree.branches, dtype=float)
    if space.k == 0.0:
        worst = 0.0
        for j in range(1, m):
            s1 = sum(w[i] / b[i] * (b[0] ** 2 + b[i] ** 2 - edges[0, i] ** 2)
                     for i in range(1, m))
            s2 = sum(w[i] / b[i] * (b[j] ** 2 + b[i] ** 2 - edges[j, i] ** 2)
                     for i in range(m) if i != j)
            worst = max(worst, abs(s1 - s2 + 2.0 * (w[0] * b[0] - w[j] * b[j])))
        return worst
    proj = np.empty(m)
    for j in range(m):
        proj[j] = w[j] + sum(
            w[i] * cos_vertex_angle(b[j], b[i], edges[j, i], space) for i in range(m) if i != j)
    return float(np.abs(proj[0] - proj[1:]).max())


def volume_additivity_check(tree: FermatTree, edges, space: CurvedSpace) -> float:
    """Relative gap of Vol(simplex) = sum of the vertex-replaced sub-volumes (k = 0)."""
    if space.k != 0.0:
        raise InfeasibleError("volume additivity decomposition is Euclidean only")
    if not tree.classification.floating:
        raise InfeasibleError("volume additivity applies to floating trees only")
    edges = check_edge_matrix(edges)
    m = edges.shape[0]
    vol = euclidean_volume(edges)
    if vol <= 0.0:
        raise InfeasibleError("degenerate simplex")
    total = 0.0
    for j in range(m):
        total += euclidean_volume(replace_vertex_edges(edges, tree.branches, j))
    return abs(vol - total) / vol


def replace_vertex_edges(edges: np.ndarray, branches, j: int) -> np.ndarray:
    """Edge matrix of the simplex with vertex j replaced by the tree point."""
    b = np.asarray(branches, dtype=float)
    sub = edges.copy()
    sub[j, :] = b
    sub[:, j] = b
    sub[j, j] = 0.0
    return sub


def regular_circumdiameter(mean_edge: float, n: int) -> float:
    """Circumscribed-sphere diameter of the regular n-simplex with given edge."""
    return mean_edge * math.sqrt(2.0 * n / (n + 1.0))


def branch_bound_check(tree: FermatTree, edges, n: int, use_printed_form: bool = False) -> bool:
    """Every branch below the circumdiameter of the regular mean-edge simplex.

    use_printed_form evaluates the alternative bound 2 sqrt(n / (a (n+1)))
    instead (dimensionally odd; kept for comparison only).
    """
    edges = check_edge_matrix(edges)
    mean_edge = float(edges[np.triu_indices(edges.shape[0], 1)].mean())
    if use_printed_form:
        bound = 2.0 * math.sqrt(n / (mean_edge * (n + 1.0)))
    else:
        bound = regular_circumdiameter(mean_edge, n)
    return bool(np.all(np.asarray(tree.branches) < bound))


def kplane_triangle_equations_residual(tree: FermatTree, edges, weights,
                                       space: CurvedSpace) -> float:
    """Residual of the two closed-form triangle conditions on the K-plane.

    First: the angle at the tree point between branches 1 and 2 equals the
    weight angle arccos((B_3^2 - B_1^2 - B_2^2) / (2 B_1 B_2)), compared in the
    squared form of the law of cosines.  Second: the branch length a_03
    computed from the sine law through the weight angle at the tree point
    matches the law-of-cosines expansion at vertex 1, compared as squared
    cosines (squared hyperbolic cosines for k < 0, squared lengths for k = 0).
    """
    edges = check_edge_matrix(edges)
    if edges.shape[0] != 3:
        raise ValueError("triangle conditions need exactly 3 vertices")
    w = validate_weights(weights, 3)
    if not tree.classification.floating:
        raise InfeasibleError("triangle conditions apply to floating trees only")
    for (i, j, k) in ((0, 1, 2), (0, 2, 1), (1, 2, 0)):
        if abs((w[k] ** 2 - w[i] ** 2 - w[j] ** 2) / (2.0 * w[i] * w[j])) > 1.0:
            raise InfeasibleError("weight triple admits no floating angle system")
    b = np.asarray(tree.branches, dtype=float)
    kap = space.kappa
    k = space.k

    w_ang_12 = math.acos((w[2] ** 2 - w[0] ** 2 - w[1] ** 2) / (2.0 * w[0] * w[1]))
    w_ang_13 = math.acos((w[1] ** 2 - w[0] ** 2 - w[2] ** 2) / (2.0 * w[0] * w[2]))
    alpha_213 = math.acos(cos_vertex_angle(edges[0, 1], edges[0, 2], edges[1, 2], space))
    ang_012 = math.acos(cos_vertex_angle(b[0], edges[0, 1], b[1], space))
    ang_013 = alpha_213 - ang_012

    if k == 0.0:
        r1 = (b[0] ** 2 + b[1] ** 2 - edges[0, 1] ** 2) ** 2 - (
            2.0 * b[0] * b[1] * math.cos(w_ang_12)) ** 2
        lhs = (edges[0, 2] * math.sin(ang_013) / math.sin(w_ang_13)) ** 2
        rhs = b[0] ** 2 + edges[0, 2] ** 2 - 2.0 * b[0] * edges[0, 2] * math.cos(ang_013)
        r2 = lhs - rhs
        scale = max(1.0, float(edges.max()) ** 4)
        return max(abs(r1), abs(r2) * scale ** 0.5) / scale
    if k > 0.0:
        r1 = (math.cos(kap * edges[0, 1]) - math.cos(kap * b[0]) * math.cos(kap * b[1])) ** 2 - (
            math.sin(kap * b[0]) * math.sin(kap * b[1]) * math.cos(w_ang_12)) ** 2
        lhs = 1.0 - (math.sin(kap * edges[0, 2]) / math.sin(w_ang_13) * math.sin(ang_013)) ** 2
        rhs = (math.cos(kap * b[0]) * math.cos(kap * edges[0, 2])
               + math.sin(kap * b[0]) * math.sin(kap * edges[0, 2]) * math.cos(ang_013)) ** 2
        return max(abs(r1), abs(lhs - rhs))
    r1 = (math.cosh(kap * edges[0, 1]) - math.cosh(kap * b[0]) * math.cosh(kap * b[1])) ** 2 - (
        math.sinh(kap * b[0]) * math.sinh(kap * b[1]) * math.cos(w_ang_12)) ** 2
    lhs = 1.0 + (math.sinh(kap * edges[0, 2]) / math.sin(w_ang_13) * math.sin(ang_013)) ** 2
    rhs = (math.cosh(kap * b[0]) * math.cosh(kap * edges[0, 2])
           - math.sinh(kap * b[0]) * math.sinh(kap * edges[0, 2]) * math.cos(ang_013)) ** 2
    return max(abs(r1), abs(lhs - rhs))


@dataclass
class MultitreeEntry:
    member: Member
    realization: SimplexRealization
    tree: FermatTree
    first_order: float | None = None
    volume_additivity: float | None = None
    branch_bound_ok: bool | None = None


@dataclass
class MultitreeSolution:
    entries: list[MultitreeEntry]
    multisimplex: FrechetMultisimplex
    weights: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return len(self.entries)


def _solve_member(member: Member, w, space: CurvedSpace, tol, max_iter,
                  enforce_convexity_radius: bool) -> MultitreeEntry:
    realization = realization_from_witness(member.report.witness, space)
    tree = solve_fermat(realization, w, tol, max_iter, enforce_convexity_radius)
    entry = MultitreeEntry(member, realization, tree)
    edges = member.assignment.edges
    if tree.classification.floating:
        entry.first_order = first_order_residual(tree, edges, w, space)
        if space.k == 0.0:
            entry.volume_additivity = volume_additivity_check(tree, edges, space)
            entry.branch_bound_ok = branch_bound_check(tree, edges, space.dim)
    return entry


def multitree_solve(lengths, weights, space: CurvedSpace,
                    opts: EnumerationOptions = EnumerationOptions(),
                    tol: float | None = None, max_iter: int = DEFAULT_MAX_ITER,
                    enforce_convexity_radius: bool = True) -> MultitreeSolution:
    """Fermat tree of every incongruent simplex from one length multiset."""
    ms = enumerate_incongruent(lengths, space, opts)
    w = validate_weights(weights, space.dim + 1)
    nw = worker_count()
    if nw > 1 and len(ms.members) > 1:
        with ThreadPoolExecutor(max_workers=nw) as ex:
            entries = list(ex.map(
                lambda mb: _solve_member(mb, w, space, tol, max_iter, enforce_convexity_radius),
                ms.members))
    else:
        entries = [_solve_member(mb, w, space, tol, max_iter, enforce_convexity_radius)
                   for mb in ms.members]
    return MultitreeSolution(entries, ms, w)
