import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wassrigid.errors import BadExponent, SpaceMismatch
from wassrigid.formats import format_plan, format_result, parse_plan, parse_record
from wassrigid.measures import AtomicMeasure, dirac, random_measure
from wassrigid.spaces import Circle, Interval, Sphere2
from wassrigid.transport import (
    DEGENERATE,
    UNIQUE,
    UNKNOWN,
    MapCheck,
    TransportPlan,
    check_admissible,
    check_cyclical_monotonicity,
    cost_matrix,
    is_induced_by_map,
    product_plan,
    solve_kantorovich,
    wasserstein_distance,
    wasserstein_pp,
)

from oracles import vertex_minimum

I = Interval(1.0)
C = Circle()


def im(pts, ws):
    return AtomicMeasure(I, [I.point(t) for t in pts], ws)


class TestCostMatrix:
    def test_interval(self):
        assert np.allclose(cost_matrix(im([0, 1], [0.5, 0.5]), im([0.5], [1]), 2), [[0.25], [0.25]])

    def test_same_delta(self):
        d = im([0.3], [1])
        assert cost_matrix(d, d, 2).tolist() == [[0.0]]

    def test_circle_shorter_arc_cubed(self):
        M = cost_matrix(dirac(C, C.point(0)), dirac(C, C.point(3 * math.pi / 2)), 3)
        assert M[0, 0] == pytest.approx((math.pi / 2) ** 3, abs=1e-14)

    @pytest.mark.parametrize("p", [1, 1.0, math.inf, 0.5, -2])
    def test_bad_exponent(self, p):
        with pytest.raises(BadExponent):
            cost_matrix(im([0], [1]), im([1], [1]), p)

    def test_space_mismatch(self):
        with pytest.raises(SpaceMismatch):
            solve_kantorovich(im([0], [1]), dirac(C, C.point(0)), 2)


class TestSolve:
    def test_forced_product_plan(self):
        r = solve_kantorovich(im([0, 1], [0.5, 0.5]), im([0.5], [1]), 2)
        assert r.total_cost == pytest.approx(0.25, abs=1e-15)
        assert r.wp == pytest.approx(0.5, abs=1e-15)
        assert r.unique == UNIQUE

    def test_identity_pairing(self):
        # the only other vertex (crossing) costs 0.5*1 + 0.5*0.01
        r = solve_kantorovich(im([0, 0.6], [0.5, 0.5]), im([0.5, 1], [0.5, 0.5]), 2)
        assert r.total_cost == pytest.approx(0.205, abs=1e-15)
        assert r.wp == pytest.approx(math.sqrt(0.205), abs=1e-15)
        assert r.plan.support() == {(0, 0), (1, 1)}
        assert r.unique == UNIQUE

    def test_degenerate_circle(self):
        mu = AtomicMeasure(C, [C.point(0), C.point(math.pi)], [0.5, 0.5])
        nu = AtomicMeasure(C, [C.point(math.pi / 2), C.point(3 * math.pi / 2)], [0.5, 0.5])
        r = solve_kantorovich(mu, nu, 2)
        assert r.total_cost == pytest.approx((math.pi / 2) ** 2, abs=1e-12)
        assert r.unique == DEGENERATE

    def test_unknown_when_not_checked(self):
        assert solve_kantorovich(im([0], [1]), im([1], [1]), 2, check_unique=False).unique == UNKNOWN

    def test_result_invariants(self, space, rng):
        for _ in range(30):
            mu, nu = random_measure(space, rng, 4), random_measure(space, rng, 5)
            p = float(rng.choice([1.5, 2.0, 3.0]))
            r = solve_kantorovich(mu, nu, p)
            assert check_admissible(r.plan, mu, nu)
            assert len(r.plan.entries) <= len(mu) + len(nu) - 1
            assert abs(r.wp**p - r.total_cost) <= 1e-12 * max(r.total_cost, 1e-300)
            assert check_cyclical_monotonicity(r.plan, p, max_cycle=3).ok


class TestWasserstein:
    def test_deltas(self, space, rng):
        for p in (1.5, 2, 4):
            x, y = space.random_point(rng), space.random_point(rng)
            assert wasserstein_distance(dirac(space, x), dirac(space, y), p) == pytest.approx(space.distance(x, y), abs=1e-12)

    def test_self_distance(self, space, rng):
        mu = random_measure(space, rng, 4)
        assert wasserstein_distance(mu, mu, 2) == pytest.approx(0.0, abs=1e-12)

    def test_delta_against_measure(self):
        assert wasserstein_pp(im([0], [1]), im([0.4, 1], [0.5, 0.5]), 2) == pytest.approx(0.58, abs=1e-15)

    def test_delta_against_measure_random(self, space, rng):
        for _ in range(10):
            x = space.random_point(rng)
            mu = random_measure(space, rng, 4)
            want = sum(w * space.distance(x, y) ** 3 for y, w in mu)
            assert wasserstein_pp(dirac(space, x), mu, 3) == pytest.approx(want, abs=1e-12)

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 4.0])
    def test_p_grid_finite_positive(self, p, rng):
        mu, nu = random_measure(Sphere2(1.0), rng, 4), random_measure(Sphere2(1.0), rng, 4)
        w = wasserstein_distance(mu, nu, p)
        assert math.isfinite(w) and w > 0


@pytest.mark.parametrize("kind", ["interval", "circle", "sphere"])
def test_oracle_equivalence_sample(kind, rng):
    space = {"interval": I, "circle": C, "sphere": Sphere2(1.0)}[kind]
    for _ in range(60):
        n, m = (int(k) for k in rng.integers(1, 5, size=2))
        mu, nu = random_measure(space, rng, n), random_measure(space, rng, m)
        r = solve_kantorovich(mu, nu, 2, check_unique=False)
        want = vertex_minimum(mu.w, nu.w, cost_matrix(mu, nu, 2))
        assert abs(r.total_cost - want) <= 1e-9


class TestAdmissible:
    def test_halved_entry_rejected(self):
        mu, nu = im([0, 0.6], [0.5, 0.5]), im([0.5, 1], [0.5, 0.5])
        plan = solve_kantorovich(mu, nu, 2).plan
        i, j, m = plan.entries[0]
        bad = TransportPlan(mu, nu, ((i, j, m / 2),) + plan.entries[1:])
        assert not check_admissible(bad, mu, nu)

    def test_product_plan(self, rng):
        mu = random_measure(I, rng, 3)
        d = dirac(I, I.point(0.2))
        assert check_admissible(product_plan(d, mu), d, mu)


class TestMonotonicity:
    def test_crossing_swap_violates(self):
        mu = im([0, 1], [0.5, 0.5])
        plan = TransportPlan(mu, mu, ((0, 1, 0.5), (1, 0, 0.5)))
        rep = check_cyclical_monotonicity(plan, 2)
        assert not rep.ok and rep.certified_up_to == 1
        v = rep.violations[0]
        assert len(v.cells) == 2
        assert v.cost == pytest.approx(2.0) and v.permuted_cost == pytest.approx(0.0)

    def test_monotone_pairing_certified(self):
        plan = TransportPlan(im([0, 1], [0.5, 0.5]), im([0.5, 1], [0.5, 0.5]), ((0, 0, 0.5), (1, 1, 0.5)))
        rep = check_cyclical_monotonicity(plan, 2, max_cycle=3)
        assert rep.ok and rep.certified_up_to == 3

    def test_three_cycle_detected(self):
        # each source one step to the right, cyclically, on a 3-point line
        mu = im([0, 0.5, 1], [1 / 3] * 3)
        plan = TransportPlan(mu, mu, ((0, 1, 1 / 3), (1, 2, 1 / 3), (2, 0, 1 / 3)))
        assert not check_cyclical_monotonicity(plan, 2).ok

    def test_length_two_violation_is_improvable(self, rng):
        # a plan with a swap violation always has strictly cheaper optimum
        found = 0
        while found < 30:
            mu, nu = random_measure(I, rng, 3), random_measure(I, rng, 3)
            P = np.outer(mu.w, nu.w)
            plan = TransportPlan.from_dense(mu, nu, P)
            rep = check_cyclical_monotonicity(plan, 2, max_cycle=2)
            if rep.ok:
                continue
            found += 1
            assert solve_kantorovich(mu, nu, 2, check_unique=False).total_cost < plan.cost(2) - 1e-12


class TestMapCheck:
    def test_delta_target(self):
        plan = solve_kantorovich(im([0, 1], [0.5, 0.5]), im([0.5], [1]), 2).plan
        assert is_induced_by_map(plan, "from_source") == MapCheck(True, 0.0)
        back = is_induced_by_map(plan, "from_target")
        assert not back.is_map and back.split_mass == pytest.approx(0.5)

    def test_product_from_target(self, rng):
        mu = random_measure(I, rng, 3)
        res = is_induced_by_map(product_plan(dirac(I, I.point(0.1)), mu), "from_target")
        assert res.is_map and res.split_mass == 0.0

    def test_identity_plan(self, rng):
        mu = random_measure(Sphere2(1.0), rng, 4)
        plan = solve_kantorovich(mu, mu, 2).plan
        for d in ("from_source", "from_target"):
            res = is_induced_by_map(plan, d)
            assert res.is_map and res.split_mass <= 1e-15

    def test_tie_goes_to_lowest_index(self):
        mu = im([0.5], [1])
        nu = im([0, 1], [0.5, 0.5])
        res = is_induced_by_map(product_plan(mu, nu), "from_source")
        assert not res.is_map and res.split_mass == 0.5


class TestSerialization:
    def test_plan_roundtrip(self, rng):
        mu, nu = random_measure(Sphere2(2.0), rng, 3), random_measure(Sphere2(2.0), rng, 4)
        plan = solve_kantorovich(mu, nu, 2).plan
        back = parse_plan(format_plan(plan))
        assert back.entries == plan.entries
        assert back.source.close_to(mu, 1e-15) and back.target.close_to(nu, 1e-15)

    def test_result_record(self):
        r = solve_kantorovich(im([0, 0.6], [0.5, 0.5]), im([0.5, 1], [0.5, 0.5]), 2)
        rec = parse_record(format_result(r))
        assert float(rec["cost"]) == r.total_cost
        assert float(rec["wp"]) == r.wp
        assert rec["unique"] == "unique" and rec["entries"] == "2"


# W_p metric axioms on random measures over the interval
pts = st.lists(st.tuples(st.floats(0, 1), st.floats(0.05, 1)), min_size=1, max_size=4)


def _measure(pairs):
    w = np.array([q for _, q in pairs])
    return im([t for t, _ in pairs], w / w.sum())


@settings(max_examples=80, deadline=None)
@given(a=pts, b=pts, c=pts, p=st.sampled_from([1.5, 2.0, 3.0]))
def test_w_metric_axioms(a, b, c, p):
    mu, nu, rho = _measure(a), _measure(b), _measure(c)
    d_mn, d_nm = wasserstein_distance(mu, nu, p), wasserstein_distance(nu, mu, p)
    assert abs(d_mn - d_nm) <= 1e-9
    assert d_mn <= wasserstein_distance(mu, rho, p) + wasserstein_distance(rho, nu, p) + 1e-9
    if mu == nu:
        assert d_mn <= 1e-9
    else:
        assert d_mn > 0
