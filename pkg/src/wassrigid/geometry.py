"""Geometry of the Wasserstein space over a base space.

Geodesics between atomic measures are represented by an optimal plan plus
a branch choice per coupled pair; evaluating at time ``t`` slides every
coupled mass along its base geodesic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import AmbiguousGeodesic, PreconditionError
from .measures import AtomicMeasure, mixture
from .spaces import Circle, GeodesicSegment, Interval, Point, ProjectivePlane, Space, Sphere2
from .transport import UNIQUE, OptResult, TransportPlan, solve_kantorovich, wasserstein_pp

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class WassersteinGeodesic:
    plan: TransportPlan
    branches: dict = field(default_factory=dict)
    p: float = 2.0
    unique: str = UNIQUE
    wp: float = 0.0

    @classmethod
    def from_result(cls, result: OptResult, branches=None) -> "WassersteinGeodesic":
        return cls(result.plan, dict(branches or {}), result.p, result.unique, result.wp)

    def __call__(self, t: float) -> AtomicMeasure:
        plan = self.plan
        if t == 0.0:
            return plan.source
        if t == 1.0:
            return plan.target
        space = plan.source.space
        atoms, weights = [], []
        for i, j, m in plan.entries:
            seg = space.geodesic(plan.source.atoms[i], plan.target.atoms[j], self.branches.get((i, j)))
            atoms.append(space.interpolate(seg, t))
            weights.append(m)
        total = math.fsum(weights)
        return AtomicMeasure(space, atoms, [w / total for w in weights])


def displacement_interpolation(result: OptResult, t: float, branches=None) -> AtomicMeasure:
    """Measure at time ``t`` on the geodesic carried by ``result.plan``."""
    return WassersteinGeodesic.from_result(result, branches)(t)


def geodesic_speed_residual(geodesic: WassersteinGeodesic, samples: Sequence[tuple], tol: Tolerances = DEFAULT) -> float:
    if geodesic.unique != UNIQUE:
        raise PreconditionError("speed residual needs a unique optimal plan")
    p = geodesic.p
    worst = 0.0
    for s, t in samples:
        w = solve_kantorovich(geodesic(s), geodesic(t), p, check_unique=False, tol=tol).wp
        worst = max(worst, abs(w - abs(s - t) * geodesic.wp))
    return worst


@dataclass(frozen=True)
class MidpointLocus:
    x: Point
    y: Point
    locus: tuple
    exact: bool


def _great_circle(space, u, n):
    u = np.asarray(u, dtype=float)
    e1 = np.cross(u, [1.0, 0.0, 0.0]) if abs(u[0]) < 0.9 else np.cross(u, [0.0, 1.0, 0.0])
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(u, e1)
    phis = 2.0 * np.pi * np.arange(n) / n
    return [space.point(math.cos(a) * e1 + math.sin(a) * e2) for a in phis]


def midpoint_locus(space: Space, x: Point, y: Point, mesh: Sequence[Point] | None = None, n_samples: int = 64) -> MidpointLocus:
    """Base-space midpoints of ``x`` and ``y``; these carry ``Mid(delta_x, delta_y)``."""
    D = space.distance(x, y)
    if D == 0.0:
        raise ValueError("midpoint locus needs distinct points")
    if isinstance(space, (Interval, Circle, Sphere2, ProjectivePlane)):
        seg = space.geodesic(x, y)
        if not seg.ambiguous:
            return MidpointLocus(x, y, (space.interpolate(seg, 0.5),), True)
        if isinstance(space, Circle):
            pts = tuple(space.interpolate(space.geodesic(x, y, b), 0.5) for b in (1, -1))
            return MidpointLocus(x, y, pts, True)
        if isinstance(space, Sphere2):
            return MidpointLocus(x, y, tuple(_great_circle(space, space.unit(x), n_samples)), False)
        u, v = space.unit(x), space.unit(y)
        return MidpointLocus(x, y, (space.point(u + v), space.point(u - v)), True)
    pts = space.mesh_points(None) if mesh is None else list(mesh)
    P = space.as_array(pts)
    dx = space.pairwise(P, space.as_array([x]))[:, 0]
    dy = space.pairwise(P, space.as_array([y]))[:, 0]
    eps = space.tol.distance
    hits = tuple(p for p, a, b in zip(pts, dx, dy) if abs(a - D / 2) <= eps and abs(b - D / 2) <= eps)
    return MidpointLocus(x, y, hits, False)


def strict_convexity_residual(mu, nu0, nu1, t: float, p: float, tol: Tolerances = DEFAULT) -> float:
    """``W_p^p(mu, mix) - [(1-t) W_p^p(mu, nu0) + t W_p^p(mu, nu1)]``; never above ~0."""
    if not 0.0 < t < 1.0:
        raise ValueError("t must lie in (0, 1)")
    mix = mixture([1.0 - t, t], [nu0, nu1])
    lhs = wasserstein_pp(mu, mix, p, tol)
    return lhs - ((1.0 - t) * wasserstein_pp(mu, nu0, p, tol) + t * wasserstein_pp(mu, nu1, p, tol))


def functional_values(mu: AtomicMeasure, p: float, candidates: Sequence[AtomicMeasure], tol: Tolerances = DEFAULT) -> np.ndarray:
    return np.array([wasserstein_pp(mu, nu, p, tol) for nu in candidates])


def argmax_functional(mu, p, candidates, tie_tol: float = 1e-9, tol: Tolerances = DEFAULT) -> list[AtomicMeasure]:
    if not candidates:
        raise ValueError("no candidates")
    vals = functional_values(mu, p, candidates, tol)
    top = vals.max()
    return [c for c, v in zip(candidates, vals) if v >= top - tie_tol]


def flatness_residual(space: Space, x: Point, gamma: GeodesicSegment, t: float) -> float:
    d0 = space.distance(x, gamma.start)
    d1 = space.distance(x, gamma.end)
    dt = space.distance(x, space.interpolate(gamma, t))
    return dt**2 - ((1.0 - t) * d0**2 + t * d1**2 - (1.0 - t) * t * gamma.length**2)


def _golden(f, lo, hi, xtol=1e-10):
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > xtol:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = f(d)
    return (lo + hi) / 2.0


def nearest_parameter(space: Space, x: Point, gamma: GeodesicSegment, grid: int = 256, tie: float = 1e-12) -> float:
    """Parameter of a nearest point to ``x`` on ``gamma`` (smallest on ties)."""
    return _nearest_parameters(space, [x], gamma, grid, tie)[0]


def _nearest_parameters(space, xs, gamma, grid, tie):
    if grid < 2:
        raise ValueError("grid must have at least two nodes")
    s = np.linspace(0.0, 1.0, grid)
    nodes = [space.interpolate(gamma, float(v)) for v in s]
    D = space.pairwise(space.as_array(xs), space.as_array(nodes))
    out = []
    for x, row in zip(xs, D):
        k = int(np.flatnonzero(row <= row.min() + tie)[0])
        best_s, best_d = float(s[k]), float(row[k])
        lo, hi = float(s[max(k - 1, 0)]), float(s[min(k + 1, grid - 1)])

        def f(v, x=x):
            return space.distance(x, space.interpolate(gamma, min(max(v, 0.0), 1.0)))

        r = _golden(f, lo, hi)
        if f(r) < best_d - tie:
            best_s = r
        out.append(best_s)
    return out


def project_onto_geodesic(mu: AtomicMeasure, gamma: GeodesicSegment, grid: int = 256) -> AtomicMeasure:
    """Send each atom to a nearest point of ``gamma``, keeping its weight."""
    space = mu.space
    params = _nearest_parameters(space, list(mu.atoms), gamma, grid, 1e-12)
    return AtomicMeasure(space, [space.interpolate(gamma, s) for s in params], mu.weights)


def random_measure_on_geodesic(gamma: GeodesicSegment, rng: np.random.Generator, max_atoms: int = 4) -> AtomicMeasure:
    space = gamma.space
    k = int(rng.integers(1, max_atoms + 1))
    params = rng.uniform(0.0, 1.0, size=k)
    w = rng.dirichlet(np.ones(k))
    return AtomicMeasure(space, [space.interpolate(gamma, float(s)) for s in params], w / w.sum())


def projection_optimality_check(
    mu: AtomicMeasure,
    gamma: GeodesicSegment,
    candidate: AtomicMeasure,
    trials: int = 100,
    p: float = 2.0,
    seed: int = 0,
    tol: Tolerances = DEFAULT,
) -> bool:
    """No random measure on ``gamma`` beats ``candidate`` by more than 1e-9."""
    rng = np.random.Generator(np.random.PCG64(seed))
    best = wasserstein_pp(mu, candidate, p, tol)
    for _ in range(trials):
        nu = random_measure_on_geodesic(gamma, rng, max(2, len(mu) + 1))
        if best > wasserstein_pp(mu, nu, p, tol) + 1e-9:
            return False
    return True


@dataclass(frozen=True)
class HullSample:
    points: tuple
    skipped_ambiguous: int


def geodesic_hull(space: Space, seeds: Sequence[Point], rounds: int, max_pairs: int = 2000, seed: int = 0) -> HullSample:
    """Close ``seeds`` under geodesic midpoints for ``rounds`` rounds.

    All pairs are used while there are at most ``max_pairs`` of them,
    otherwise a seeded random sample.  Cut pairs (ambiguous geodesics) are
    skipped and counted.
    """
    if not seeds:
        raise ValueError("need at least one seed")
    rng = np.random.Generator(np.random.PCG64(seed))
    pts = _dedupe(space, list(seeds))
    skipped = 0
    for _ in range(rounds):
        n = len(pts)
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        if len(pairs) > max_pairs:
            pick = rng.choice(len(pairs), size=max_pairs, replace=False)
            pairs = [pairs[int(k)] for k in np.sort(pick)]
        new = []
        for i, j in pairs:
            try:
                new.append(space.interpolate(space.geodesic(pts[i], pts[j]), 0.5))
            except AmbiguousGeodesic:
                skipped += 1
        pts = _dedupe(space, pts + new)
    return HullSample(tuple(pts), skipped)


def _dedupe(space, pts):
    eps = space.tol.distance
    X = space.as_array(pts)
    keep = []
    for k in range(len(pts)):
        if keep and space.pairwise(X[k : k + 1], X[keep]).min() <= eps:
            continue
        keep.append(k)
    return [pts[k] for k in keep]
