import math
import random

from hypothesis import given, settings, strategies as st

from helpers import brute_force_dominance, random_routes
from routeautomata.automaton import FINAL, RouteAutomaton
from routeautomata.dominance import (
    AsDelta, DominanceReport, assess_leak, diff, dominance, format_movers, format_verdict, reach_sets, top_movers,
)
from routeautomata.frl import IpPrefix, Route
from routeautomata.synth import Leak, ScenarioSpec, gen_leak, gen_leak_base

P1, P2, P3 = (IpPrefix.parse(f"10.0.{i}.0/24") for i in (1, 2, 3))
R_TOY = [Route.from_asns([1, 2, 3], P1), Route.from_asns([1, 2, 3], P2), Route.from_asns([1, 4, 3], P3)]


def leak_spec(seed=7, count=150):
    return ScenarioSpec(victim=0, victim_prefixes=[], transit=[3356, 174, 2914, 1299, 3257], peers=8,
                        seed=seed, leak=Leak(4788, 3549, count, 200))


def test_toy_dominance():
    assert dominance(RouteAutomaton(R_TOY)).per_as == {1: 5, 2: 2, 3: 2, 4: 2}
    assert dominance(RouteAutomaton(R_TOY)).ranking(1) == [(1, 5)]


def test_single_route_and_empty():
    assert dominance(RouteAutomaton([Route.from_asns([7], P1)])).per_as == {7: 1}
    assert dominance(RouteAutomaton()).per_as == {}


def test_prepends_aggregate():
    a = RouteAutomaton([Route.from_asns([7, 7, 8], P1)])
    # AS7 reaches the states after 7#1, 7#2 and 8
    assert dominance(a).per_as == {7: 3, 8: 1}


def test_brute_force_oracle_random():
    rng = random.Random(11)
    for _ in range(20):
        a = RouteAutomaton(random_routes(rng, rng.randint(1, 200)))
        assert dominance(a).per_as == brute_force_dominance(a)
        for u, states in reach_sets(a).items():
            assert FINAL not in states


def test_diff_identical_is_zero():
    r = dominance(RouteAutomaton(R_TOY))
    d = diff(r, r)
    assert d.changed_as_count == 0 and d.total_state_churn == 0
    assert not assess_leak(d).triggered


def test_newcomer_convention():
    d = diff(DominanceReport("a", {}), DominanceReport("b", {9: 4}))
    assert d.per_as[9] == AsDelta(0, 4)
    assert d.per_as[9].delta == 4
    assert math.isinf(d.per_as[9].delta_pct)


def test_top_movers_edges():
    d = diff(DominanceReport("a", {1: 1, 2: 5}), DominanceReport("b", {1: 4, 2: 2, 3: 3}))
    assert top_movers(d, 0) == []
    assert [u for u, _ in top_movers(d, 10)] == [1, 2, 3]


def test_leak_fixture_signature():
    before, after = gen_leak(leak_spec(), gen_leak_base(leak_spec()))
    d = diff(dominance(RouteAutomaton(before), "t0"), dominance(RouteAutomaton(after), "t1"))
    assert d.per_as[4788].delta_pct > 500
    assert d.changed_as_fraction > 0.05
    top3 = [u for u, _ in top_movers(d, 3)]
    assert 4788 in top3 and 3549 in top3
    assert min(x.delta for x in d.per_as.values()) < -20  # a displaced transit loses heavily
    v = assess_leak(d)
    assert v.triggered and v.suspected_originator == 4788
    assert v.interval == ("t0", "t1")
    assert "TRIGGERED" in format_verdict(v)
    assert "AS4788" in format_movers(d, 5)


def test_gain_without_churn_not_triggered():
    rng = random.Random(4)
    routes = random_routes(rng, 300, asn_pool=60)
    before = dominance(RouteAutomaton(routes))
    after = dominance(RouteAutomaton(routes | {Route.from_asns([64512], P1)}))
    d = diff(before, after)
    assert d.per_as[64512].delta == 1
    assert d.changed_as_fraction < 0.05
    assert not assess_leak(d).triggered


def test_disjoint_addition_leaves_dominance():
    a = RouteAutomaton(R_TOY)
    before = dominance(a).per_as
    a.add(Route.from_asns([100, 200], IpPrefix.parse("192.0.2.0/24")))
    after = dominance(a).per_as
    assert all(after[u] == before[u] for u in before)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_diff_antisymmetric(seed):
    rng = random.Random(seed)
    x = dominance(RouteAutomaton(random_routes(rng, 60, asn_pool=30)))
    y = dominance(RouteAutomaton(random_routes(rng, 60, asn_pool=30)))
    fwd, back = diff(x, y), diff(y, x)
    assert all(fwd.per_as[u].delta == -back.per_as[u].delta for u in fwd.per_as)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.floats(0, 5000), st.floats(0, 1))
def test_triggered_implies_thresholds(seed, gain, churn):
    rng = random.Random(seed)
    x = dominance(RouteAutomaton(random_routes(rng, 80, asn_pool=40)))
    y = dominance(RouteAutomaton(random_routes(rng, 80, asn_pool=40)))
    d = diff(x, y)
    v = assess_leak(d, gain, churn)
    if v.triggered:
        assert v.originator_gain_pct >= gain and d.changed_as_fraction >= churn
