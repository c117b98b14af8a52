import math

import numpy as np
import pytest

from wassrigid.errors import AmbiguousGeodesic, PreconditionError
from wassrigid.geometry import (
    WassersteinGeodesic,
    argmax_functional,
    displacement_interpolation,
    flatness_residual,
    geodesic_hull,
    geodesic_speed_residual,
    midpoint_locus,
    project_onto_geodesic,
    projection_optimality_check,
    random_measure_on_geodesic,
    strict_convexity_residual,
)
from wassrigid.measures import AtomicMeasure, dirac, mixture, random_measure, uniform_mesh_measure
from wassrigid.spaces import Circle, FiniteMetric, Interval, ProjectivePlane, Sphere2
from wassrigid.transport import product_plan, solve_kantorovich

from conftest import PATH4

I = Interval(1.0)
S = Sphere2(1.0)
C = Circle()
N, SOUTH, E = S.point(0, 0, 1), S.point(0, 0, -1), S.point(1, 0, 0)


def im(pts, ws):
    return AtomicMeasure(I, [I.point(t) for t in pts], ws)


class TestDisplacement:
    def test_product_plan_midpoints(self):
        r = solve_kantorovich(im([0], [1]), im([0.5, 1], [0.5, 0.5]), 2)
        assert displacement_interpolation(r, 0.5) == im([0.25, 0.5], [0.5, 0.5])

    def test_endpoints_exact(self, space, rng):
        for _ in range(10):
            mu, nu = random_measure(space, rng, 3), random_measure(space, rng, 4)
            r = solve_kantorovich(mu, nu, 2)
            try:
                assert displacement_interpolation(r, 0.0) == mu
                assert displacement_interpolation(r, 1.0) == nu
            except AmbiguousGeodesic:
                pytest.fail("endpoints must not need a branch")

    def test_sphere_branch(self):
        r = solve_kantorovich(dirac(S, N), dirac(S, SOUTH), 2)
        out = displacement_interpolation(r, 0.5, {(0, 0): (1, 0, 0)})
        assert out.close_to(dirac(S, E), 1e-15)

    def test_cut_pair_needs_branch(self):
        r = solve_kantorovich(dirac(S, N), dirac(S, SOUTH), 2)
        with pytest.raises(AmbiguousGeodesic):
            displacement_interpolation(r, 0.5)


class TestSpeed:
    def test_delta_to_delta(self, rng):
        for space in (I, C, S):
            x, y = space.random_point(rng), space.random_point(rng)
            g = WassersteinGeodesic.from_result(solve_kantorovich(dirac(space, x), dirac(space, y), 2))
            assert geodesic_speed_residual(g, [(0, 1), (0.2, 0.7), (0.5, 0.5)]) <= 1e-9

    def test_interval_example(self):
        g = WassersteinGeodesic.from_result(solve_kantorovich(im([0], [1]), im([0.5, 1], [0.5, 0.5]), 2))
        assert geodesic_speed_residual(g, [(0, 0.5), (0.5, 1), (0.25, 0.75)]) < 1e-9

    def test_random_unique_plans(self, rng):
        done = 0
        while done < 10:
            r = solve_kantorovich(random_measure(I, rng, 3), random_measure(I, rng, 3), 2)
            if r.unique != "unique":
                continue
            done += 1
            g = WassersteinGeodesic.from_result(r)
            pairs = [tuple(sorted(rng.uniform(size=2))) for _ in range(5)]
            assert geodesic_speed_residual(g, pairs) <= 1e-6

    def test_degenerate_refused(self):
        mu = AtomicMeasure(C, [C.point(0), C.point(math.pi)], [0.5, 0.5])
        nu = AtomicMeasure(C, [C.point(math.pi / 2), C.point(3 * math.pi / 2)], [0.5, 0.5])
        g = WassersteinGeodesic.from_result(solve_kantorovich(mu, nu, 2))
        with pytest.raises(PreconditionError):
            geodesic_speed_residual(g, [(0, 1)])


class TestMidpointLocus:
    def test_interval(self):
        loc = midpoint_locus(I, I.point(0), I.point(1))
        assert loc.locus == (I.point(0.5),) and loc.exact

    def test_circle_antipodal(self):
        loc = midpoint_locus(C, C.point(0), C.point(math.pi))
        assert sorted(p[0] for p in loc.locus) == pytest.approx([math.pi / 2, 3 * math.pi / 2])
        assert loc.exact

    def test_sphere_poles(self):
        loc = midpoint_locus(S, N, SOUTH, n_samples=32)
        assert not loc.exact and len(loc.locus) == 32
        assert all(abs(p[2]) <= 1e-12 for p in loc.locus)

    def test_finite_metric_by_mesh(self):
        F = FiniteMetric(PATH4)
        assert midpoint_locus(F, F.point(0), F.point(2)).locus == (F.point(1),)

    @pytest.mark.parametrize("space", [I, C, S, ProjectivePlane()], ids=lambda s: s.kind)
    def test_two_ball_condition(self, space, rng):
        pairs = [(space.random_point(rng), space.random_point(rng)) for _ in range(50)]
        if space is C:
            pairs.append((C.point(1.0), C.point(1.0 + math.pi)))
        if space is S:
            pairs.append((E, S.point(-1, 0, 0)))
        for x, y in pairs:
            loc = midpoint_locus(space, x, y)
            D = space.distance(x, y)
            for m in loc.locus:
                assert abs(space.distance(x, m) - D / 2) <= 1e-9
                assert abs(space.distance(m, y) - D / 2) <= 1e-9


class TestStrictConvexity:
    def test_equal_targets(self, rng):
        mu, nu = random_measure(S, rng, 4), random_measure(S, rng, 3)
        assert strict_convexity_residual(mu, nu, nu, 0.3, 2) == pytest.approx(0.0, abs=1e-12)

    def test_delta_source_affine(self, rng):
        for _ in range(10):
            x = I.point(float(rng.uniform()))
            nu0, nu1 = random_measure(I, rng, 3), random_measure(I, rng, 2)
            assert abs(strict_convexity_residual(dirac(I, x), nu0, nu1, float(rng.uniform(0.1, 0.9)), 2)) <= 1e-12

    def test_mesh_is_strict(self):
        res = strict_convexity_residual(uniform_mesh_measure(I, 50), dirac(I, I.point(0)), dirac(I, I.point(1)), 0.5, 2)
        assert res < -1e-3

    def test_never_positive(self, space, rng):
        for _ in range(10):
            mu, nu0, nu1 = (random_measure(space, rng, 3) for _ in range(3))
            assert strict_convexity_residual(mu, nu0, nu1, float(rng.uniform(0.05, 0.95)), 2) <= 1e-9


class TestArgmax:
    def test_interval_mesh_prefers_endpoints(self, rng):
        mu = uniform_mesh_measure(I, 101)
        deltas = [dirac(I, I.point(k / 100)) for k in range(101)]
        mixes = []
        for _ in range(50):
            a, b = rng.uniform(size=2)
            lam = float(rng.uniform(0.05, 0.95))
            mixes.append(mixture([lam, 1 - lam], [dirac(I, I.point(a)), dirac(I, I.point(b))]))
        best = argmax_functional(mu, 2, deltas + mixes)
        assert all(b.is_dirac and b.atoms[0][0] in (0.0, 1.0) for b in best)
        val = solve_kantorovich(mu, best[0], 2, check_unique=False).total_cost
        assert val == pytest.approx(1 / 3, abs=2e-3)

    def test_delta_source_farthest_points(self):
        mesh = [C.point(2 * math.pi * k / 12) for k in range(12)]
        best = argmax_functional(dirac(C, C.point(0)), 2, [dirac(C, p) for p in mesh])
        assert [b.atoms[0] for b in best] == [C.point(math.pi)]

    def test_single_candidate(self, rng):
        mu = random_measure(S, rng, 3)
        assert argmax_functional(mu, 2, [mu]) == [mu]


class TestFlatness:
    def test_interval_example(self):
        assert flatness_residual(I, I.point(0), I.geodesic(I.point(0), I.point(1)), 0.5) == pytest.approx(0.0, abs=1e-15)

    def test_pole_to_equator(self):
        g = S.geodesic(E, S.point(0, 1, 0))
        assert flatness_residual(S, N, g, 0.5) == pytest.approx(math.pi**2 / 16, abs=1e-12)

    @pytest.mark.parametrize("space", [I, C, S, ProjectivePlane()], ids=lambda s: s.kind)
    def test_endpoints_zero(self, space, rng):
        for _ in range(20):
            x = space.random_point(rng)
            g = space.geodesic(space.random_point(rng), space.random_point(rng))
            assert abs(flatness_residual(space, x, g, 0.0)) <= 1e-9
            assert abs(flatness_residual(space, x, g, 1.0)) <= 1e-9

    def test_interval_flat(self, rng):
        for _ in range(1000):
            x, a, b = (I.point(float(v)) for v in rng.uniform(size=3))
            assert abs(flatness_residual(I, x, I.geodesic(a, b), float(rng.uniform()))) <= 1e-9

    def test_sphere_nonnegative(self, rng):
        for _ in range(1000):
            x, a, b = S.random_point(rng), S.random_point(rng), S.random_point(rng)
            assert flatness_residual(S, x, S.geodesic(a, b), float(rng.uniform())) >= -1e-9


class TestProjection:
    def test_clamp(self):
        g = I.geodesic(I.point(0), I.point(0.5))
        assert project_onto_geodesic(im([0.25, 0.75], [0.5, 0.5]), g).close_to(im([0.25, 0.5], [0.5, 0.5]), 1e-9)

    def test_supported_on_gamma_fixed(self, rng):
        g = S.geodesic(E, S.point(0, 1, 0))
        for _ in range(10):
            mu = random_measure_on_geodesic(g, rng)
            assert project_onto_geodesic(mu, g).close_to(mu, 1e-9)

    def test_pole_ties_to_start(self):
        g = S.geodesic(E, S.point(0, 1, 0))
        out = project_onto_geodesic(dirac(S, N), g)
        assert out.close_to(dirac(S, E), 1e-12)

    @pytest.mark.parametrize("space", [I, C, S], ids=lambda s: s.kind)
    def test_idempotent(self, space, rng):
        for _ in range(10):
            g = space.geodesic(space.random_point(rng), space.random_point(rng))
            once = project_onto_geodesic(random_measure(space, rng, 4), g)
            assert project_onto_geodesic(once, g).close_to(once, 1e-9)

    def test_projection_is_optimal(self, rng):
        for _ in range(5):
            g = S.geodesic(S.random_point(rng), S.random_point(rng))
            mu = random_measure(S, rng, 3)
            assert projection_optimality_check(mu, g, project_onto_geodesic(mu, g), trials=40)

    def test_far_endpoint_not_optimal(self):
        g = I.geodesic(I.point(0), I.point(1))
        assert not projection_optimality_check(dirac(I, I.point(0.05)), g, dirac(I, I.point(1)), trials=20)

    def test_measure_on_gamma_is_its_own_best(self, rng):
        g = I.geodesic(I.point(0.1), I.point(0.9))
        mu = random_measure_on_geodesic(g, rng)
        assert projection_optimality_check(mu, g, mu, trials=20)


class TestHull:
    def test_dyadic(self):
        h = geodesic_hull(I, [I.point(0), I.point(1)], 6)
        assert len(h.points) == 65
        assert sorted(p[0] for p in h.points) == pytest.approx([k / 64 for k in range(65)])

    def test_single_seed(self):
        assert geodesic_hull(S, [N], 3).points == (N,)

    def test_sphere_triangle_containment(self):
        seeds = [S.point(0, 0.1, 1), S.point(0.1, 0, 1), S.point(-0.1, -0.1, 1)]
        h = geodesic_hull(S, seeds, 4)
        X = S.as_array(list(h.points))
        D = S.pairwise(X, S.as_array(seeds))
        spread = S.pairwise(S.as_array(seeds), S.as_array(seeds)).max()
        assert np.all(D <= spread + 1e-9)
        assert len(h.points) > 3 and h.skipped_ambiguous == 0

    def test_cut_pairs_counted(self):
        h = geodesic_hull(S, [N, SOUTH], 1)
        assert h.skipped_ambiguous == 1


def test_product_plan_is_optimal(space, rng):
    for _ in range(20):
        x = space.random_point(rng)
        mu = random_measure(space, rng, 4)
        d = dirac(space, x)
        for p in (1.5, 2.0, 3.0):
            assert abs(product_plan(d, mu).cost(p) - solve_kantorovich(d, mu, p, check_unique=False).total_cost) <= 1e-12
