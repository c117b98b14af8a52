"""Reproducible numerical experiments with pass/fail reports.

Each experiment returns an :class:`ExperimentReport` whose margins state
the inequality they were checked against.  When an output directory is
given, the report is written as ``report.json`` next to the instance files
(measure format) and optional CSV sweeps, all under relative names so that
reruns produce byte-identical files.

Random numbers come from numpy's PCG64 bit generator seeded with the
64-bit experiment seed; random mixtures draw their atom count uniformly
from {2, 3, 4}, atoms uniformly from the candidate grid and weights from a
flat Dirichlet distribution.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import IsotropyViolation, Unsupported
from .formats import format_measure, write_csv
from .geometry import displacement_interpolation, flatness_residual, functional_values, midpoint_locus, nearest_parameter
from .measures import AtomicMeasure, dirac, pushforward, random_measure, shell_decomposition, uniform_mesh_measure
from .spaces import (
    Circle,
    FiniteMetric,
    Identity,
    Interval,
    Isometry,
    Point,
    ProjectivePlane,
    Rotation,
    Space,
    Sphere2,
    _RoundSpace,
)
from .transport import UNIQUE, is_induced_by_map, solve_kantorovich, wasserstein_distance

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"

_RELATIONS: dict[str, Callable[[float, float], bool]] = {
    "<=": lambda v, b: v <= b,
    "<": lambda v, b: v < b,
    ">=": lambda v, b: v >= b,
    ">": lambda v, b: v > b,
}


@dataclass
class Margin:
    name: str
    value: float
    relation: str
    bound: float

    def holds(self) -> bool:
        return bool(_RELATIONS[self.relation](self.value, self.bound))


@dataclass
class ExperimentReport:
    name: str
    space: str
    parameters: dict
    status: str
    margins: list = field(default_factory=list)
    artifacts: list = field(default_factory=list)
    seed: int = 0

    def margin(self, name: str) -> Margin:
        for m in self.margins:
            if m.name == name:
                return m
        raise KeyError(name)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


class _Recorder:
    """Collects margins and artifacts, then settles the status."""

    def __init__(self, name, space, params, seed, out):
        self.report = ExperimentReport(name, space.describe() if space is not None else "", params, PASS, [], [], int(seed))
        self.out = Path(out) if out is not None else None
        if self.out is not None:
            self.out.mkdir(parents=True, exist_ok=True)
        self.inconclusive = False

    def margin(self, name, value, relation, bound):
        self.report.margins.append(Margin(name, float(value), relation, float(bound)))

    def measure(self, fname, mu):
        if self.out is not None:
            (self.out / fname).write_text(format_measure(mu))
            self.report.artifacts.append(fname)

    def csv(self, fname, header, rows):
        if self.out is not None:
            write_csv(self.out / fname, header, rows)
            self.report.artifacts.append(fname)

    def finish(self) -> ExperimentReport:
        r = self.report
        if self.inconclusive:
            r.status = INCONCLUSIVE
        else:
            r.status = PASS if all(m.holds() for m in r.margins) else FAIL
        if self.out is not None:
            r.artifacts.append("report.json")
            (self.out / "report.json").write_text(r.to_json())
        return r


def _point_record(x: Point) -> list:
    return list(x.coords)


# ---------------------------------------------------------------------------
# shared constructions


def candidate_grid(space: Space, n: int) -> list[Point]:
    """Points for candidate deltas; includes endpoints and poles so that extremal points are reachable."""
    if isinstance(space, Interval):
        return [space.point(v) for v in np.linspace(0.0, space.length, n)]
    if isinstance(space, FiniteMetric):
        return space.mesh_points()
    pts = list(space.mesh_points(n))
    if isinstance(space, Sphere2):
        pts += [space.point(0, 0, 1), space.point(0, 0, -1)]
    elif isinstance(space, ProjectivePlane):
        pts += [space.point(0, 0, 1)]
    return pts


def hemisphere_mesh(space: Space, n: int, pole: Point) -> AtomicMeasure:
    """Uniform weights on roughly ``n`` quasi-uniform points within half the diameter of ``pole``."""
    if isinstance(space, (Interval, Circle)):
        base = space.mesh_points(2 * n)
    elif isinstance(space, _RoundSpace):
        base = space.from_array(space.fibonacci(2 * n if isinstance(space, Sphere2) else 4 * n))
    else:
        base = space.mesh_points()
    d = space.pairwise(space.as_array(base), space.as_array([pole]))[:, 0]
    pts = [x for x, dx in zip(base, d) if dx < space.diameter() / 2.0]
    return AtomicMeasure(space, pts, [1.0 / len(pts)] * len(pts))


def default_pair(space: Space) -> tuple[Point, Point]:
    """A cut pair: endpoints, opposite circle points, poles, or orthogonal lines."""
    if isinstance(space, Interval):
        return space.point(0.0), space.point(space.length)
    if isinstance(space, Circle):
        return space.point(0.0), space.point(space.circumference / 2.0)
    if isinstance(space, Sphere2):
        return space.point(0, 0, 1), space.point(0, 0, -1)
    if isinstance(space, ProjectivePlane):
        return space.point(0, 0, 1), space.point(1, 0, 0)
    return space.point(0), space.point(int(np.argmax(space.table[0])))


def random_mixture(space: Space, rng: np.random.Generator, support) -> AtomicMeasure:
    k = int(rng.integers(2, 5))
    return random_measure(space, rng, k, support)


def _mesh(space, mesh_n, weighting, pole):
    if weighting == "uniform":
        return uniform_mesh_measure(space, mesh_n)
    if weighting == "hemisphere":
        return hemisphere_mesh(space, mesh_n, pole)
    raise ValueError(f"unknown mesh weighting {weighting!r}")


# ---------------------------------------------------------------------------
# experiments


def exp_delta_maximality(
    space: Space | None = None,
    mesh_n: int = 101,
    candidate_n: int = 50,
    p: float = 2.0,
    seed: int = 0,
    weighting: str = "uniform",
    pole: Point | None = None,
    candidates: list | None = None,
    out=None,
    tol: Tolerances = DEFAULT,
) -> ExperimentReport:
    """Maximizers of ``nu -> W_p^p(mesh, nu)`` over deltas and random mixtures are deltas."""
    space = space or Interval(1.0)
    if mesh_n < 10:
        raise ValueError("mesh_n must be at least 10")
    if pole is None and isinstance(space, _RoundSpace):
        pole = space.point(0, 0, 1)
    rec = _Recorder(
        "exp_delta_maximality",
        space,
        {"mesh_n": mesh_n, "candidate_n": candidate_n, "p": p, "weighting": weighting},
        seed,
        out,
    )
    rng = make_rng(seed)
    mu = _mesh(space, mesh_n, weighting, pole)
    grid = candidate_grid(space, mesh_n)
    if candidates is None:
        candidates = [dirac(space, x) for x in grid]
        candidates += [random_mixture(space, rng, grid) for _ in range(candidate_n)]
    vals = functional_values(mu, p, candidates, tol)
    top = float(vals.max())
    is_delta = np.array([c.is_dirac() for c in candidates])
    maxi = vals >= top - 1e-9
    rec.margin("non_delta_maximizers", int(np.sum(maxi & ~is_delta)), "<=", 0)
    if (~is_delta).any():
        rec.margin("delta_lead", top - float(vals[~is_delta].max()), ">", 0.0)
    if isinstance(space, Interval) and weighting == "uniform":
        L = space.length
        rec.margin("max_value_error", abs(top - L**p / (p + 1.0)), "<=", 2e-3)
        ends = {(0.0,), (L,)}
        odd = sum(1 for c, m in zip(candidates, maxi) if m and c.atoms[0].coords not in ends)
        rec.margin("maximizers_off_endpoints", odd, "<=", 0)
    rec.measure("mesh.txt", mu)
    rec.csv(
        "candidates.csv",
        ["index", "n_atoms", "value", "maximizer", "first_atom"],
        [[k, len(c), float(v), int(m), " ".join(repr(x) for x in c.atoms[0].coords)] for k, (c, v, m) in enumerate(zip(candidates, vals, maxi))],
    )
    return rec.finish()


def exp_interval_rigidity(
    mesh_n: int = 101,
    p: float = 2.0,
    seed: int = 0,
    candidate_n: int = 50,
    lambda_n: int = 99,
    configs: int = 20,
    out=None,
    tol: Tolerances = DEFAULT,
) -> ExperimentReport:
    """Numerical steps behind rigidity of the interval's quadratic Wasserstein space."""
    if mesh_n < 10:
        raise ValueError("mesh_n must be at least 10")
    I = Interval(1.0)
    rng = make_rng(seed)
    rec = _Recorder(
        "exp_interval_rigidity",
        I,
        {"mesh_n": mesh_n, "p": p, "candidate_n": candidate_n, "lambda_n": lambda_n, "configs": configs},
        seed,
        out,
    )
    d0, d1, half = dirac(I, I.point(0.0)), dirac(I, I.point(1.0)), dirac(I, I.point(0.5))

    def endpoint_mix(lam):
        return AtomicMeasure(I, [I.point(0.0), I.point(1.0)], [1.0 - lam, lam])

    # (a) maximizers of W_2^2(delta_1/2, .)
    grid = candidate_grid(I, mesh_n)
    cands = [dirac(I, x) for x in grid]
    cands += [endpoint_mix(lam) for lam in np.linspace(0.1, 0.9, 9)]
    cands += [random_mixture(I, rng, grid) for _ in range(candidate_n)]
    vals = functional_values(half, 2.0, cands, tol)
    top = float(vals.max())
    on_ends = np.array([all(a.coords[0] in (0.0, 1.0) for a in c.atoms) for c in cands])
    maxi = vals >= top - 1e-9
    rec.margin("a_max_value_error", abs(top - 0.25), "<=", 1e-12)
    rec.margin("a_maximizers_off_endpoints", int(np.sum(maxi & ~on_ends)), "<=", 0)
    rec.margin("a_endpoint_mixtures_not_maximal", int(np.sum(on_ends & ~maxi)), "<=", 0)

    # (b) lambda recovery: W_2^2((1-l) d0 + l d1, d0) = l
    lams = np.arange(1, lambda_n + 1) / (lambda_n + 1)
    rows = []
    worst = 0.0
    for lam in lams:
        r = solve_kantorovich(endpoint_mix(lam), d0, 2.0, check_unique=False, tol=tol)
        worst = max(worst, abs(r.total_cost - lam))
        rows.append([float(lam), r.total_cost, r.wp])
    rec.margin("b_lambda_recovery_error", worst, "<=", 1e-12)
    rec.csv("lambda_recovery.csv", ["lambda", "w2_squared", "w2"], rows)

    # (c) (1-l) d_a + l d_b sits at time b-a on the geodesic from d_c, c = a/(1+a-b)
    triples = [(0.2, 0.7, 0.5)]
    while len(triples) < configs:
        a, b = np.sort(rng.uniform(0.0, 1.0, size=2))
        if b - a < 0.05 or b - a > 0.95:
            continue
        triples.append((float(a), float(b), float(rng.uniform(0.05, 0.95))))
    worst = 0.0
    rows = []
    for a, b, lam in triples[:configs]:
        c = a / (1.0 + a - b)
        res = solve_kantorovich(dirac(I, I.point(c)), endpoint_mix(lam), 2.0, check_unique=False, tol=tol)
        got = displacement_interpolation(res, b - a)
        want = AtomicMeasure(I, [I.point(a), I.point(b)], [1.0 - lam, lam])
        err = _measure_gap(got, want)
        worst = max(worst, err)
        rows.append([a, b, lam, c, b - a, err])
    rec.margin("c_interior_point_error", worst, "<=", 1e-9)
    rec.csv("interior_points.csv", ["a", "b", "lambda", "start", "t", "error"], rows)
    return rec.finish()


def _measure_gap(mu: AtomicMeasure, nu: AtomicMeasure) -> float:
    """Largest atom or weight mismatch between two measures with matching atom counts (inf otherwise)."""
    if len(mu) != len(nu):
        return math.inf
    D = mu.space.pairwise(mu.coords, nu.coords)
    j = np.argmin(D, axis=1)
    if len(set(j.tolist())) != len(j):
        return math.inf
    return float(max(np.max(D[np.arange(len(mu)), j]), np.max(np.abs(mu.w - nu.w[j]))))


def exp_flatness_discrimination(p: float = 2.0, n_configs: int = 1000, seed: int = 0, out=None) -> ExperimentReport:
    """The interval satisfies the flatness identity; the sphere departs from it by ``t(1-t)L^2`` along pole/equator triples."""
    if n_configs < 1:
        raise ValueError("n_configs must be positive")
    rng = make_rng(seed)
    rec = _Recorder("exp_flatness_discrimination", None, {"p": p, "n_configs": n_configs}, seed, out)
    I, S = Interval(1.0), Sphere2(1.0)
    rows = []
    worst = 0.0
    for _ in range(n_configs):
        x, a, b = (I.random_point(rng) for _ in range(3))
        t = float(rng.uniform())
        r = flatness_residual(I, x, I.geodesic(a, b), t)
        worst = max(worst, abs(r))
        rows.append(["interval", x[0], a[0], b[0], t, r, 0.0])
    rec.margin("interval_max_abs_residual", worst, "<", 1e-9)

    N = S.point(0, 0, 1)
    worst = 0.0
    for _ in range(n_configs):
        L = float(rng.uniform(0.0, math.pi))
        t = float(rng.uniform())
        g = S.geodesic(S.point(1, 0, 0), S.point(math.cos(L), math.sin(L), 0.0), branch=(0, 1, 0))
        r = flatness_residual(S, N, g, t)
        want = t * (1.0 - t) * L * L
        worst = max(worst, abs(r - want))
        rows.append(["sphere_pole_equator", 0.0, 0.0, L, t, r, want])
    for t in (0.0, 1.0):
        g = S.geodesic(S.point(1, 0, 0), S.point(0, 1, 0))
        worst = max(worst, abs(flatness_residual(S, N, g, t)))
    rec.margin("sphere_pole_family_error", worst, "<=", 1e-9)

    lowest = math.inf
    for _ in range(n_configs):
        x, a, b = (S.random_point(rng) for _ in range(3))
        g = S.geodesic(a, b)
        lowest = min(lowest, flatness_residual(S, x, g, float(rng.uniform())))
    rec.margin("sphere_min_residual", lowest, ">=", -1e-9)
    rec.csv("flatness.csv", ["family", "x", "start", "end_or_length", "t", "residual", "analytic"], rows)
    return rec.finish()


def exp_pushforward_isometry(
    space: Space | None = None,
    g: Isometry | None = None,
    n_pairs: int = 100,
    p: float = 2.0,
    seed: int = 0,
    out=None,
    tol: Tolerances = DEFAULT,
) -> ExperimentReport:
    """``W_p`` is unchanged when both measures are pushed through an isometry of the base."""
    space = space or Circle()
    g = g or Identity()
    g.verify(space, seed=seed)
    rng = make_rng(seed)
    rec = _Recorder("exp_pushforward_isometry", space, {"isometry": repr(g), "n_pairs": n_pairs, "p": p}, seed, out)
    worst = 0.0
    rows = []
    for k in range(n_pairs):
        mu = random_measure(space, rng, int(rng.integers(2, 7)))
        nu = random_measure(space, rng, int(rng.integers(2, 7)))
        w0 = wasserstein_distance(mu, nu, p, tol)
        w1 = wasserstein_distance(pushforward(g, mu, verify=False), pushforward(g, nu, verify=False), p, tol)
        worst = max(worst, abs(w1 - w0))
        rows.append([k, w0, w1, abs(w1 - w0)])
    rec.margin("max_distance_change", worst, "<", 1e-9)
    rec.csv("pairs.csv", ["pair", "wp", "wp_pushed", "difference"], rows)
    return rec.finish()


def exp_midpoint_argmax(
    space: Space | None = None,
    x: Point | None = None,
    y: Point | None = None,
    mesh_n: int = 100,
    p: float = 2.0,
    seed: int = 0,
    candidate_n: int = 30,
    weighting: str = "uniform",
    pole: Point | None = None,
    locus_samples: int = 64,
    out=None,
    tol: Tolerances = DEFAULT,
) -> ExperimentReport:
    """Over the Wasserstein midpoints of two deltas, the mesh functional is maximized at a delta."""
    space = space or Interval(1.0)
    if x is None or y is None:
        x, y = default_pair(space)
    if space.distance(x, y) == 0.0:
        raise ValueError("x and y must differ")
    rng = make_rng(seed)
    locus = midpoint_locus(space, x, y, n_samples=locus_samples)
    pts = list(locus.locus)
    mu = _mesh(space, mesh_n, weighting, pole if pole is not None else x)
    cands = [dirac(space, m) for m in pts]
    if len(pts) > 1:
        cands += [random_mixture(space, rng, pts) for _ in range(candidate_n)]
    vals = functional_values(mu, p, cands, tol)
    is_delta = np.array([c.is_dirac() for c in cands])
    rec = _Recorder(
        "exp_midpoint_argmax",
        space,
        {
            "x": _point_record(x),
            "y": _point_record(y),
            "mesh_n": mesh_n,
            "p": p,
            "candidate_n": candidate_n,
            "weighting": weighting,
            "locus_size": len(pts),
            "locus_exact": locus.exact,
        },
        seed,
        out,
    )
    rec.margin("delta_shortfall", float(vals.max() - vals[is_delta].max()), "<=", 1e-9)
    best = int(np.argmax(np.where(is_delta, vals, -np.inf)))
    rec.measure("mesh.txt", mu)
    rec.measure("best_delta.txt", cands[best])
    rec.csv(
        "locus_values.csv",
        ["index", "n_atoms", "value"],
        [[k, len(c), float(v)] for k, (c, v) in enumerate(zip(cands, vals))],
    )
    return rec.finish()


def exp_shell_invariance(
    space: Space | None = None,
    x: Point | None = None,
    g: Isometry | None = None,
    mu: AtomicMeasure | None = None,
    p: float = 2.0,
    seed: int = 0,
    out=None,
    tol: float = 1e-10,
) -> ExperimentReport:
    """Isometries fixing ``x`` preserve the mass of every distance shell around ``x``."""
    space = space or Sphere2(1.0)
    x = x or space.point(0, 0, 1)
    g = g or Rotation.about_axis([0, 0, 1], 1.0)
    if mu is None:
        mu = AtomicMeasure(space, [space.point(0, 0, 1), space.point(1, 0, 0), space.point(0, 0, -1)], [0.25, 0.5, 0.25])
    moved = space.distance(g.apply(space, x), x)
    if moved >= 1e-9:
        raise IsotropyViolation(f"isometry moves the center by {moved}")
    image = pushforward(g, mu)
    s0 = shell_decomposition(mu, x)
    s1 = shell_decomposition(image, x)
    rec = _Recorder("exp_shell_invariance", space, {"x": _point_record(x), "isometry": repr(g), "p": p, "n_atoms": len(mu)}, seed, out)
    rec.margin("shell_count_change", abs(len(s0.radii) - len(s1.radii)), "<=", 0)
    if len(s0.radii) == len(s1.radii):
        rec.margin("max_radius_change", float(np.max(np.abs(np.subtract(s0.radii, s1.radii)))), "<=", tol)
        rec.margin("max_mass_change", float(np.max(np.abs(np.subtract(s0.masses, s1.masses)))), "<=", tol)
    rec.measure("measure.txt", mu)
    rec.measure("image.txt", image)
    rec.csv("shells.csv", ["radius", "mass", "radius_image", "mass_image"], [list(r) for r in zip(s0.radii, s0.masses, s1.radii, s1.masses)])
    return rec.finish()


def exp_nonbranching_interior(
    space: Space | None = None,
    mu0: AtomicMeasure | None = None,
    mu1: AtomicMeasure | None = None,
    t0: float = 0.5,
    p: float = 2.0,
    seed: int = 0,
    branches=None,
    out=None,
    tol: Tolerances = DEFAULT,
) -> ExperimentReport:
    """From an interior point of a geodesic, the optimal plan back to the start is unique and a map."""
    if mu0 is None:
        space = space or Interval(1.0)
        mu0 = dirac(space, space.point(0.0))
        mu1 = AtomicMeasure(space, [space.point(0.5), space.point(1.0)], [0.5, 0.5])
    space = mu0.space
    if not 0.0 < t0 < 1.0:
        raise ValueError("t0 must lie in (0, 1)")
    rec = _Recorder("exp_nonbranching_interior", space, {"t0": t0, "p": p, "n_source": len(mu0), "n_target": len(mu1)}, seed, out)
    rec.measure("mu0.txt", mu0)
    rec.measure("mu1.txt", mu1)
    outer = solve_kantorovich(mu0, mu1, p, tol=tol, seed=seed)
    rec.report.parameters["outer_unique"] = outer.unique
    if outer.unique != UNIQUE:
        rec.inconclusive = True
        return rec.finish()
    mid = displacement_interpolation(outer, t0, branches)
    inner = solve_kantorovich(mu0, mid, p, tol=tol, seed=seed)
    mc = is_induced_by_map(inner.plan, "from_target", tol.mass)
    rec.measure("mu_t.txt", mid)
    rec.margin("inner_plan_unique", 1.0 if inner.unique == UNIQUE else 0.0, ">=", 1.0)
    rec.margin("inner_map_from_interior", 1.0 if mc.is_map else 0.0, ">=", 1.0)
    rec.margin("inner_split_mass", mc.split_mass, "<", 1e-9)
    return rec.finish()


def exp_tubular_midpoint(
    space: Space | None = None,
    atoms: list | None = None,
    weights: list | None = None,
    gamma=None,
    p: float = 2.0,
    seed: int = 0,
    grid: int = 256,
    out=None,
    tol: Tolerances = DEFAULT,
) -> ExperimentReport:
    """Reflecting atoms through their nearest points on a geodesic makes the projection a Wasserstein midpoint."""
    space = space or Sphere2(1.0)
    if gamma is None:
        gamma = space.geodesic(space.point(1, 0, 0), space.point(0, 1, 0))
    if atoms is None:
        eps = 0.05
        atoms = [space.point(math.cos(0.7) * math.cos(eps), math.sin(0.7) * math.cos(eps), math.sin(eps))]
    if weights is None:
        weights = [1.0 / len(atoms)] * len(atoms)
    ys, zs = [], []
    for x in atoms:
        s = nearest_parameter(space, x, gamma, grid)
        y = space.interpolate(gamma, s)
        ys.append(y)
        zs.append(x if space.distance(x, y) == 0.0 else space.extend(x, y, 2.0))
    mu = AtomicMeasure(space, atoms, weights)
    nu = AtomicMeasure(space, ys, weights)
    zeta = AtomicMeasure(space, zs, weights)
    w_mn = wasserstein_distance(mu, nu, p, tol)
    w_nz = wasserstein_distance(nu, zeta, p, tol)
    res = solve_kantorovich(mu, zeta, p, check_unique=False, tol=tol)
    mid = displacement_interpolation(res, 0.5)
    rec = _Recorder("exp_tubular_midpoint", space, {"n_atoms": len(atoms), "p": p, "grid": grid}, seed, out)
    rec.margin("halves_equal", abs(w_mn - w_nz), "<=", 1e-8)
    rec.margin("half_of_total", abs(w_mn - 0.5 * res.wp), "<=", 1e-8)
    rec.margin("interpolation_gap", _measure_gap(mid, nu), "<=", 1e-8)
    rec.measure("mu.txt", mu)
    rec.measure("nu.txt", nu)
    rec.measure("zeta.txt", zeta)
    return rec.finish()


def exp_cut_locus_diameter(space: Space | None = None, n_points: int = 100, seed: int = 0, n_samples: int = 16, out=None) -> ExperimentReport:
    """On a compact rank-one symmetric space the cut locus sits at distance equal to the diameter."""
    space = space or Sphere2(1.0)
    if not isinstance(space, (Circle, Sphere2, ProjectivePlane)):
        raise Unsupported(f"{space.kind} is not a compact rank-one symmetric space here")
    rng = make_rng(seed)
    rec = _Recorder("exp_cut_locus_diameter", space, {"n_points": n_points, "n_samples": n_samples}, seed, out)
    diam = space.diameter()
    worst = 0.0
    for _ in range(n_points):
        x = space.random_point(rng)
        cuts = space.cut_set(x, n_samples)
        d = space.pairwise(space.as_array([x]), space.as_array(cuts))[0]
        worst = max(worst, float(np.max(np.abs(d - diam))))
    rec.margin("max_cut_distance_error", worst, "<", 1e-9)
    return rec.finish()


def exp_gtb_split_decay(
    space: Space | None = None,
    mesh_sizes=(10, 40, 160),
    target: AtomicMeasure | None = None,
    p: float = 2.0,
    seed: int = 0,
    out=None,
    tol: Tolerances = DEFAULT,
) -> ExperimentReport:
    """Mass split by mesh sources toward a fixed target shrinks as the mesh refines."""
    space = space or Interval(1.0)
    if target is None:
        target = AtomicMeasure(space, [space.point(0.25), space.point(0.75)], [0.5, 0.5])
    sizes = [int(n) for n in mesh_sizes]
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("mesh sizes must increase")
    rec = _Recorder("exp_gtb_split_decay", space, {"mesh_sizes": sizes, "p": p, "n_target": len(target)}, seed, out)
    splits = []
    for n in sizes:
        r = solve_kantorovich(uniform_mesh_measure(space, n), target, p, check_unique=False, tol=tol)
        splits.append(is_induced_by_map(r.plan, "from_source", tol.mass).split_mass)
    for k in range(1, len(sizes)):
        rec.margin(f"increase_{sizes[k - 1]}_to_{sizes[k]}", splits[k] - splits[k - 1], "<=", 0.02)
    rec.margin("final_split", splits[-1], "<", 0.1)
    if isinstance(space, Interval):
        for n, s in zip(sizes, splits):
            rec.margin(f"split_times_n_{n}", s * n, "<=", 1.0 + 1e-9)
    rec.measure("target.txt", target)
    rec.csv("split_decay.csv", ["n", "split_mass"], [[n, s] for n, s in zip(sizes, splits)])
    return rec.finish()


REGISTRY: dict[str, Callable[..., ExperimentReport]] = {
    f.__name__: f
    for f in (
        exp_delta_maximality,
        exp_interval_rigidity,
        exp_flatness_discrimination,
        exp_pushforward_isometry,
        exp_midpoint_argmax,
        exp_shell_invariance,
        exp_nonbranching_interior,
        exp_tubular_midpoint,
        exp_cut_locus_diameter,
        exp_gtb_split_decay,
    )
}
