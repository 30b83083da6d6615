"""Enumerate the incongruent simplexes a length multiset can realize.

An assignment of the N(N+1)/2 lengths to the edges of the complete graph on
N+1 vertices determines a simplex up to ambient isometry (reflections
included), so congruence classes are orbits of vertex relabeling.  Each class
is keyed by the lexicographically minimal row-major upper triangle over all
(N+1)! relabelings, with lengths quantized to 12 significant digits.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .dekster_wilker import in_dw_euclidean, in_dw_hyperbolic, in_dw_spherical
from .geometry import CurvedSpace
from .realizability import RealizabilityReport, realize_in_space

KEY_DIGITS = 12


def worker_count() -> int:
    """Worker cap from FERMAT_FRECHET_THREADS (default 1)."""
    raw = os.environ.get("FERMAT_FRECHET_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, min(n, os.cpu_count() or 1))


def max_count(n: int) -> int:
    """Maximum number of incongruent n-simplexes from one length multiset."""
    if n < 2:
        raise ValueError("dimension must be >= 2")
    return math.factorial(n * (n + 1) // 2) // math.factorial(n + 1)


def stirling_bound(n: int) -> float:
    """Closed-form upper bound for max_count from Stirling's formula.

    Uses x! <= sqrt(2 pi) x^(x+1/2) exp(-x + 1/(12x)) in the numerator and
    the theta = 0 lower form in the denominator, so the ratio is a true bound.
    """
    if n < 2:
        raise ValueError("dimension must be >= 2")
    x = n * (n + 1) / 2.0
    y = n + 1.0
    log_b = (
        (x + 0.5) * math.log(x)
        - (y + 0.5) * math.log(y)
        - (n + 1) * (n / 2.0 - 1.0)
        + 1.0 / (12.0 * x)
    )
    return math.exp(log_b)


def _quantize(x: float) -> float:
    return float(f"{x:.{KEY_DIGITS}g}")


def canonical_key(edges: np.ndarray) -> tuple[float, ...]:
    """Lexicographically minimal quantized upper triangle over vertex relabelings."""
    m = edges.shape[0]
    q = np.vectorize(_quantize)(edges)
    best = None
    for perm in itertools.permutations(range(m)):
        p = np.array(perm)
        key = tuple(q[p[i], p[j]] for i in range(m) for j in range(i + 1, m))
        if best is None or key < best:
            best = key
    return best


def key_string(key: tuple[float, ...]) -> str:
    return ",".join(f"{v:.{KEY_DIGITS}g}" for v in key)


@dataclass(frozen=True)
class CanonicalAssignment:
    """One congruence class: representative edge matrix plus its canonical key."""

    edges: np.ndarray
    key: tuple[float, ...]

    def __eq__(self, other):
        return isinstance(other, CanonicalAssignment) and self.key == other.key

    def __hash__(self):
        return hash(self.key)


@dataclass
class Member:
    assignment: CanonicalAssignment
    report: RealizabilityReport


@dataclass
class FrechetMultisimplex:
    members: list[Member]
    space: CurvedSpace
    dw_member: bool
    tried: int = 0

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class EnumerationOptions:
    require_dw: bool = False
    sampling: int | None = None
    seed: int = 0


def _distinct_permutations(values: tuple[float, ...]):
    """Distinct permutations of a multiset, in lexicographic order."""
    pool = sorted(values)
    n = len(pool)

    def rec(remaining: list[float], prefix: list[float]):
        if not remaining:
            yield tuple(prefix)
            return
        prev = None
        for i, v in enumerate(remaining):
            if v == prev:
                continue
            prev = v
            yield from rec(remaining[:i] + remaining[i + 1 :], prefix + [v])

    yield from rec(pool, [])


def edges_from_vector(vec, m: int) -> np.ndarray:
    """Fill the row-major upper triangle (a_01, a_02, ..., a_{m-2,m-1})."""
    a = np.zeros((m, m))
    it = iter(vec)
    for i in range(m):
        for j in range(i + 1, m):
            a[i, j] = a[j, i] = next(it)
    return a


def in_dw(a, n: int, space: CurvedSpace) -> bool:
    if space.k == 0.0:
        return in_dw_euclidean(a, n)
    if space.k > 0.0:
        return in_dw_spherical(a, n, space.k)
    return in_dw_hyperbolic(a, n, space.k)


def enumerate_incongruent(lengths, space: CurvedSpace,
                          opts: EnumerationOptions = EnumerationOptions()) -> FrechetMultisimplex:
    """All permutation-inequivalent realizable assignments of the multiset.

    Exhaustive for n <= 4; larger n requires opts.sampling (uniform random
    placements, deduplicated, count reported is then a lower bound).
    Output is sorted by canonical key, so identical inputs give identical
    ordered output.
    """
    n = space.dim
    lengths = tuple(float(x) for x in lengths)
    need = n * (n + 1) // 2
    if len(lengths) != need:
        raise ValueError(f"need {need} lengths for dimension {n}, got {len(lengths)}")
    if any(x <= 0 for x in lengths):
        raise ValueError("lengths must be positive")
    m = n + 1

    if opts.sampling is None:
        if n > 4:
            raise ValueError("exhaustive enumeration limited to n <= 4; set opts.sampling")
        placements = _distinct_permutations(lengths)
    else:
        rng = np.random.default_rng(opts.seed)
        base = np.array(lengths)
        placements = (tuple(base[rng.permutation(need)]) for _ in range(opts.sampling))

    dw_ok = in_dw(edges_from_vector(lengths, m), n, space)

    reps: dict[tuple[float, ...], np.ndarray] = {}
    tried = 0
    for vec in placements:
        tried += 1
        edges = edges_from_vector(vec, m)
        key = canonical_key(edges)
        if key not in reps:
            reps[key] = edges

    members: list[Member] = []
    for key in sorted(reps):
        edges = reps[key]
        if opts.require_dw and not dw_ok:
            continue
        report = realize_in_space(edges, space)
        if report.realizable:
            members.append(Member(CanonicalAssignment(edges, key), report))

    if len(members) > max_count(n):
        raise AssertionError("enumeration produced more classes than the maximum")
    return FrechetMultisimplex(members, space, dw_ok, tried)
