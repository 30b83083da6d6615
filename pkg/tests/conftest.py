import numpy as np
import pytest

from fermat_frechet.geometry import CurvedSpace, basepoint, exp_map, geodesic_distance

# Admissible sampling radii per curvature: spherical points must stay within
# pairwise distance pi/4 (convexity radius), hyperbolic/flat just well scaled.
SAMPLE_RADIUS = {0.0: (0.25, 0.9), 1.0: (0.12, 0.35), -1.0: (0.2, 0.8)}


def random_model_points(rng, space, m, lo=None, hi=None):
    """m random points in a ball around the basepoint of the space."""
    lo0, hi0 = SAMPLE_RADIUS.get(space.k, (0.2, 0.6))
    lo = lo0 if lo is None else lo
    hi = hi0 if hi is None else hi
    p0 = basepoint(space)
    pts = []
    for _ in range(m):
        t = rng.normal(size=space.dim)
        t = t / np.linalg.norm(t) * rng.uniform(lo, hi)
        if space.k == 0.0:
            v = t
        else:
            v = np.concatenate([[0.0], t])
        pts.append(exp_map(p0, v, space))
    return np.array(pts)


def measure_edges(points, space):
    m = len(points)
    a = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            a[i, j] = a[j, i] = geodesic_distance(points[i], points[j], space)
    return a


def well_shaped_simplex(rng, space, m, min_ratio=0.25, tries=200):
    """Random simplex whose smallest edge is at least min_ratio of the largest."""
    for _ in range(tries):
        pts = random_model_points(rng, space, m)
        e = measure_edges(pts, space)
        off = e[~np.eye(m, dtype=bool)]
        if off.min() >= min_ratio * off.max():
            return pts, e
    raise RuntimeError("could not sample a well-shaped simplex")


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)


@pytest.fixture(params=[0.0, 1.0, -1.0], ids=["flat", "spherical", "hyperbolic"])
def space3(request):
    return CurvedSpace(request.param, 3)


@pytest.fixture(params=[0.0, 1.0, -1.0], ids=["flat", "spherical", "hyperbolic"])
def space2(request):
    return CurvedSpace(request.param, 2)
