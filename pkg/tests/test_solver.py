import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fermat_frechet.enumeration import EnumerationOptions
from fermat_frechet.errors import InfeasibleError
from fermat_frechet.geometry import CurvedSpace, geodesic_distance, project_to_model
from fermat_frechet.solver import (SimplexRealization, branch_bound_check, classify,
                                   classify_edges, first_order_residual,
                                   kplane_triangle_equations_residual, multitree_solve,
                                   solve_fermat, volume_additivity_check)

from conftest import measure_edges, random_model_points, well_shaped_simplex
import oracles


def equilateral_triangle():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]])
    return SimplexRealization(pts, CurvedSpace(0.0, 2))


def floating_instance(rng, space, m, min_branch=0.02):
    """Well-shaped floating instance away from the absorb threshold."""
    while True:
        pts, e = well_shaped_simplex(rng, space, m)
        w = rng.uniform(0.7, 2.2, size=m)
        r = SimplexRealization(pts, space)
        if not classify(r, w).floating:
            continue
        tree = solve_fermat(r, w)
        if tree.branches.min() >= min_branch * e.max():
            return r, w, tree


def test_equilateral_equal_weights_120_degrees():
    r = equilateral_triangle()
    tree = solve_fermat(r, [1.0, 1.0, 1.0])
    assert tree.classification.floating
    assert np.allclose(tree.point, [0.5, math.sqrt(3) / 6], atol=1e-9)
    u = [(p - tree.point) / np.linalg.norm(p - tree.point) for p in r.points]
    for i, j in ((0, 1), (0, 2), (1, 2)):
        ang = math.degrees(math.acos(np.clip(u[i] @ u[j], -1, 1)))
        assert ang == pytest.approx(120.0, abs=1e-8)


def test_dominant_weight_absorbs():
    r = equilateral_triangle()
    tree = solve_fermat(r, [10.0, 1.0, 1.0])
    assert tree.classification.kind == "absorbed"
    assert tree.classification.vertex == 0
    assert tree.branches[0] == 0.0
    assert np.allclose(tree.point, r.points[0])


def test_absorbed_agrees_with_grid_oracle(rng):
    r = equilateral_triangle()
    got = classify(r, [10.0, 1.0, 1.0])
    orc = oracles.bruteforce_classification(CurvedSpace(0.0, 2), r.points, [10, 1, 1], rng)
    assert orc == ("absorbed", 0)
    assert got.kind == "absorbed" and got.vertex == 0


def test_weight_dominance_always_absorbs(rng, space3):
    pts, e = well_shaped_simplex(rng, space3, 4)
    w = np.array([1.0, 1.0, 1.0, 3.5])  # exceeds the sum of the others
    cls = classify_edges(e, w, space3)
    assert cls.kind == "absorbed" and cls.vertex == 3


def test_classification_matches_bruteforce(rng, space3):
    matched = 0
    trials = 0
    while matched < 12 and trials < 120:
        trials += 1
        pts, e = well_shaped_simplex(rng, space3, 4)
        w = rng.uniform(0.6, 2.5, size=4)
        orc = oracles.bruteforce_classification(space3, pts, w, rng)
        if orc is None:
            continue
        cls = classify_edges(e, w, space3)
        assert cls.kind == orc[0]
        if cls.kind == "absorbed":
            assert cls.vertex == orc[1]
        matched += 1
    assert matched >= 12


def test_solver_matches_weiszfeld(rng, space3):
    for _ in range(10):
        r, w, tree = floating_instance(rng, space3, 4)
        _, fw = oracles.weiszfeld(space3, r.points, w)
        assert abs(tree.objective - fw) / fw <= 1e-6


def test_spherical_pi_half_equilateral():
    space = CurvedSpace(1.0, 2)
    r = SimplexRealization(np.eye(3), space)
    with pytest.raises(InfeasibleError):
        solve_fermat(r, [1.0, 1.0, 1.0])  # beyond the convexity radius bound
    tree = solve_fermat(r, [1.0, 1.0, 1.0], enforce_convexity_radius=False)
    assert tree.residual <= 1e-8
    assert np.allclose(tree.branches, math.acos(1 / math.sqrt(3)), atol=1e-9)


def test_first_order_residual_converged_and_sensitive(rng, space3):
    r, w, tree = floating_instance(rng, space3, 4)
    e = r.edge_matrix()
    assert first_order_residual(tree, e, w, space3) <= 1e-7
    # perturb the tree point by 1e-3: the residual must react
    bad_point = project_to_model(
        tree.point + 1e-3 * np.ones_like(tree.point), space3) if space3.k else tree.point + 1e-3
    bad_branches = np.array([geodesic_distance(bad_point, p, space3) for p in r.points])
    from fermat_frechet.solver import FermatTree
    bad = FermatTree(bad_point, bad_branches, tree.classification, tree.objective, 0.0)
    assert first_order_residual(bad, e, w, space3) >= 1e-4


def test_first_order_rejects_absorbed():
    r = equilateral_triangle()
    tree = solve_fermat(r, [10.0, 1.0, 1.0])
    with pytest.raises(InfeasibleError):
        first_order_residual(tree, r.edge_matrix(), [10, 1, 1], CurvedSpace(0.0, 2))


def test_volume_additivity(rng):
    space = CurvedSpace(0.0, 3)
    r, w, tree = floating_instance(rng, space, 4)
    e = r.edge_matrix()
    assert volume_additivity_check(tree, e, space) <= 1e-9
    # test point outside the simplex: decomposition must fail
    from fermat_frechet.solver import FermatTree
    outside = r.points.mean(axis=0) + 3.0 * (r.points[0] - r.points.mean(axis=0))
    ob = np.array([geodesic_distance(outside, p, space) for p in r.points])
    fake = FermatTree(outside, ob, tree.classification, 0.0, 0.0)
    assert volume_additivity_check(fake, e, space) > 1e-6


def test_volume_additivity_rejects_curved(rng):
    space = CurvedSpace(1.0, 3)
    r, w, tree = floating_instance(rng, space, 4)
    with pytest.raises(InfeasibleError):
        volume_additivity_check(tree, r.edge_matrix(), space)


def test_branch_bound(rng):
    space = CurvedSpace(0.0, 3)
    r, w, tree = floating_instance(rng, space, 4)
    assert branch_bound_check(tree, r.edge_matrix(), 3)


@given(lam=st.floats(0.2, 5.0))
@settings(max_examples=20, deadline=None)
def test_branch_bound_scale_invariant(lam):
    rng = np.random.default_rng(99)
    space = CurvedSpace(0.0, 3)
    pts, e = well_shaped_simplex(rng, space, 4)
    w = np.array([1.0, 1.2, 0.9, 1.1])
    r = SimplexRealization(pts, space)
    tree = solve_fermat(r, w)
    r2 = SimplexRealization(pts * lam, space)
    tree2 = solve_fermat(r2, w)
    assert branch_bound_check(tree, e, 3) == branch_bound_check(tree2, e * lam, 3)


def test_scale_equivariance(rng):
    space = CurvedSpace(0.0, 3)
    r, w, tree = floating_instance(rng, space, 4)
    lam = 2.7
    r2 = SimplexRealization(r.points * lam, space)
    tree2 = solve_fermat(r2, w)
    assert np.allclose(tree2.branches, lam * tree.branches, rtol=1e-6)
    assert tree2.objective == pytest.approx(lam * tree.objective, rel=1e-8)
    assert tree2.classification.kind == tree.classification.kind


@given(c=st.floats(0.1, 10.0))
@settings(max_examples=20, deadline=None)
def test_weight_scale_invariance(c):
    rng = np.random.default_rng(3)
    space = CurvedSpace(0.0, 3)
    pts, e = well_shaped_simplex(rng, space, 4)
    w = np.array([1.0, 1.3, 0.8, 1.1])
    r = SimplexRealization(pts, space)
    t1 = solve_fermat(r, w)
    t2 = solve_fermat(r, c * w)
    assert np.linalg.norm(t1.point - t2.point) <= 1e-6
    assert t2.objective == pytest.approx(c * t1.objective, rel=1e-7)


def test_objective_is_global_min_probe(rng, space3):
    r, w, tree = floating_instance(rng, space3, 4)
    for p in r.points:
        assert tree.objective <= oracles.objective(space3, p, r.points, w) + 1e-9
    for _ in range(1000):
        lam = rng.dirichlet(np.ones(4))
        x = oracles.proj(space3, (lam[:, None] * r.points).sum(axis=0))
        assert tree.objective <= oracles.objective(space3, x, r.points, w) + 1e-9


def test_stationarity_iff_first_order_small(rng, space3):
    # both residuals small together on converged floating instances
    for _ in range(5):
        r, w, tree = floating_instance(rng, space3, 4)
        fo = first_order_residual(tree, r.edge_matrix(), w, space3)
        assert tree.residual <= 1e-8 and fo <= 1e-7


def test_kplane_triangle_residuals(rng, space2):
    for _ in range(5):
        r, w, tree = floating_instance(rng, space2, 3, min_branch=0.05)
        res = kplane_triangle_equations_residual(tree, r.edge_matrix(), w, space2)
        assert res <= 1e-7


def test_kplane_equal_weights_equilateral():
    r = equilateral_triangle()
    tree = solve_fermat(r, [1.0, 1.0, 1.0])
    res = kplane_triangle_equations_residual(tree, r.edge_matrix(), [1, 1, 1],
                                             CurvedSpace(0.0, 2))
    assert res <= 1e-12


def test_multitree_all_equal_single_entry():
    sol = multitree_solve([1.0] * 6, [1.0, 1.0, 1.0, 1.0], CurvedSpace(0.0, 3))
    assert len(sol) == 1
    assert sol.entries[0].tree.classification.floating


def test_multitree_generic(rng):
    lengths = rng.uniform(0.78, 1.0, size=6)
    w = [1.1, 0.9, 1.0, 1.05]
    sol = multitree_solve(lengths, w, CurvedSpace(0.0, 3))
    assert len(sol) == len(sol.multisimplex.members)
    for e in sol.entries:
        if e.tree.classification.floating:
            assert e.first_order <= 1e-7
            assert e.volume_additivity <= 1e-9


def test_multitree_dominant_weight_all_absorbed(rng):
    lengths = rng.uniform(0.78, 1.0, size=6)
    w = [5.0, 1.0, 1.0, 1.0]
    sol = multitree_solve(lengths, w, CurvedSpace(0.0, 3))
    for e in sol.entries:
        assert e.tree.classification.kind == "absorbed"
        assert e.tree.classification.vertex == 0


def test_multitree_deterministic_order(rng):
    lengths = rng.uniform(0.78, 1.0, size=6)
    w = [1.0, 1.0, 1.0, 1.0]
    a = multitree_solve(lengths, w, CurvedSpace(0.0, 3))
    b = multitree_solve(lengths, w, CurvedSpace(0.0, 3))
    ka = [e.member.assignment.key for e in a.entries]
    kb = [e.member.assignment.key for e in b.entries]
    assert ka == kb


def test_objective_monotone_under_weight_increase(rng):
    # simple sanity: raising one weight cannot lower the optimum value
    space = CurvedSpace(0.0, 3)
    r, w, tree = floating_instance(rng, space, 4)
    w2 = w.copy()
    w2[0] *= 1.5
    t2 = solve_fermat(r, w2)
    assert t2.objective >= tree.objective
