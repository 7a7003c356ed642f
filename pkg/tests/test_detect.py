import dataclasses
import random

import pytest
from hypothesis import given, settings, strategies as st

from routeautomata.automaton import FINAL, RouteAutomaton
from routeautomata.detect import (
    DetectorConfig, check_nonuniformity, detect, find_artificial_segments, format_alert, raise_alerts,
)
from routeautomata.frl import IpPrefix, Route
from routeautomata.synth import DEFCON_SPEC, Interception, ScenarioSpec, gen_benign, gen_interception

P1, P2, P3 = (IpPrefix.parse(f"10.0.{i}.0/24") for i in (1, 2, 3))
R_TOY = [Route.from_asns([1, 2, 3], P1), Route.from_asns([1, 2, 3], P2), Route.from_asns([1, 4, 3], P3)]


def defcon():
    routes, expected = gen_interception(DEFCON_SPEC)
    return RouteAutomaton(routes), expected


def test_defcon_single_segment():
    a, _ = defcon()
    segs = find_artificial_segments(a)
    assert len(segs) == 1
    assert segs[0].asns == (4436, 22822, 23005, 20195)
    assert segs[0].length == 3


def test_segments_are_literal_chains():
    a, _ = defcon()
    for seg in find_artificial_segments(a):
        q = seg.entry_state
        for sym, nxt in zip(seg.chain_labels, seg.chain_states):
            assert len(a.transitions(q)) == 1
            assert a.transitions(q)[sym] == nxt
            q = nxt
        assert all(isinstance(s, IpPrefix) for s in a.transitions(q))


def test_toy_has_no_segments():
    assert find_artificial_segments(RouteAutomaton(R_TOY)) == []


def test_defcon_nonuniformity_context():
    a, _ = defcon()
    seg = find_artificial_segments(a)[0]
    ctx = check_nonuniformity(a, seg)
    assert ctx is not None
    assert ctx.state != seg.terminal_state
    assert [s.asn for s in ctx.witness][-3:] == [22822, 23005, 20195]
    assert IpPrefix.parse("24.120.56.0/22") in ctx.prefixes


def test_nonuniformity_none_when_victim_unique():
    routes = [Route.from_asns([1, 2, 3, 4, 5], P1), Route.from_asns([6, 7], P2), Route.from_asns([6, 8], P2)]
    a = RouteAutomaton(routes)
    segs = find_artificial_segments(a)
    assert segs and segs[0].victim_as == 5
    assert check_nonuniformity(a, segs[0]) is None


def test_defcon_alert():
    a, expected = defcon()
    alerts = raise_alerts(a)
    assert len(alerts) == 1
    al = alerts[0]
    assert expected.matches(al)
    assert (al.victim_as, str(al.p_v), str(al.p_prime_v), al.s, al.t) == (
        20195, "24.120.56.0/22", "24.120.56.0/24", 26627, 4436)
    # both prefix transitions land on the final state
    assert a.transitions(al.contradicting_state)[al.p_v] == FINAL
    assert a.transitions(al.segment.terminal_state)[al.p_prime_v] == FINAL
    assert al.contradicting_state != al.segment.terminal_state
    assert "AS4436" in format_alert(al)


def test_visible_attacker_is_localized():
    spec = dataclasses.replace(
        DEFCON_SPEC, attack=Interception(IpPrefix.parse("24.120.56.0/24"), 26627, 4436, attacker=64600, hide_attacker=False)
    )
    routes, expected = gen_interception(spec)
    alerts = raise_alerts(RouteAutomaton(routes))
    assert len(alerts) == 1 and expected.matches(alerts[0])
    assert alerts[0].t == 64600 and alerts[0].s == 26627


def test_sibling_group_suppresses():
    a, _ = defcon()
    cfg = DetectorConfig(sibling_groups=[{22822, 23005, 20195}])
    assert raise_alerts(a, cfg) == []


def test_equal_prefix_is_not_an_alert():
    # forged chain carries the victim's own /22: nonuniform, but not a subprefix
    benign = gen_benign(DEFCON_SPEC)
    forged = Route.from_asns([64500, 26627, 4436, 22822, 23005, 20195], IpPrefix.parse("24.120.56.0/22"))
    extra = Route.from_asns([64500, 3356, 22822, 23005, 20195], IpPrefix.parse("64.57.96.0/20"))
    a = RouteAutomaton(benign | {forged, extra})
    res = detect(a)
    assert res.segments and res.nonuniform
    assert res.alerts == []
    loose = DetectorConfig(require_strict_subprefix=False)
    assert raise_alerts(a, loose)


def test_benign_has_no_alerts():
    assert raise_alerts(RouteAutomaton(gen_benign(DEFCON_SPEC))) == []


def test_min_segment_length_validation():
    with pytest.raises(ValueError):
        DetectorConfig(min_segment_length=0)


def test_records_are_tab_separated():
    a, _ = defcon()
    rec = raise_alerts(a)[0].record().split("\t")
    assert rec[:5] == ["20195", "24.120.56.0/22", "24.120.56.0/24", "26627", "4436"]


# -- properties ----------------------------------------------------------------

specs = st.builds(
    lambda seed, peers, hops, transit: ScenarioSpec(
        victim=65000,
        victim_prefixes=[IpPrefix.parse("100.64.0.0/16"), IpPrefix.parse("100.80.0.0/20")],
        backhaul=list(range(65100, 65100 + hops)),
        transit=transit,
        peers=peers,
        seed=seed,
        attack=Interception(IpPrefix.parse("100.64.128.0/24"), s=65200, t=65201),
    ),
    st.integers(0, 10_000), st.integers(1, 8), st.integers(2, 5),
    st.lists(st.integers(65300, 65310), unique=True, max_size=3),
)


@settings(max_examples=60, deadline=None)
@given(specs)
def test_ground_truth_recovered(spec):
    routes, expected = gen_interception(spec)
    alerts = raise_alerts(RouteAutomaton(routes))
    assert len(alerts) == 1 and expected.matches(alerts[0])


@settings(max_examples=60, deadline=None)
@given(specs, st.integers(1, 6))
def test_uniform_policy_never_alerts(spec, k):
    assert raise_alerts(RouteAutomaton(gen_benign(spec)), DetectorConfig(min_segment_length=k)) == []


@settings(max_examples=40, deadline=None)
@given(specs, st.integers(1, 5))
def test_raising_min_length_is_monotone(spec, k):
    routes, _ = gen_interception(spec)
    rng = random.Random(spec.seed)
    noise = {Route.from_asns(rng.sample(range(1, 40), rng.randint(1, 5)), IpPrefix(rng.getrandbits(32), rng.randint(8, 24)))
             for _ in range(30)}
    a = RouteAutomaton(routes | noise)
    assert len(raise_alerts(a, DetectorConfig(k + 1))) <= len(raise_alerts(a, DetectorConfig(k)))


@settings(max_examples=30, deadline=None)
@given(specs, st.randoms(use_true_random=False))
def test_alerts_independent_of_input_order(spec, rnd):
    routes, _ = gen_interception(spec)
    order = sorted(routes, key=lambda r: r.sort_key)
    rnd.shuffle(order)
    a = [al.key for al in raise_alerts(RouteAutomaton(routes))]
    b = [al.key for al in raise_alerts(RouteAutomaton(order))]
    assert a == b
