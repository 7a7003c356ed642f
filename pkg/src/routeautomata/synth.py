"""Deterministic route scenarios: benign baselines, interceptions, leaks.

Randomness only picks filler ASNs and which transit each observation peer
uses; the attack structure itself is fixed by the scenario so tests can state
the exact alert they expect.

Scenario files are plain ``key=value`` lines (``#`` comments allowed)::

    scenario=interception          # benign | interception | leak
    seed=1
    victim=20195
    victim_prefixes=24.120.56.0/22 24.120.60.0/23
    backhaul=22822 23005           # victim's upstream chain, far end first
    transit=3356 174
    n_peers=4                      # or peers=701 1239 ... for explicit ASNs
    hijacked_subprefix=24.120.56.0/24
    s=26627
    t=4436
    attacker=64600                 # optional
    hide_attacker=true
    originator=4788                # leak scenarios
    leak_upstream=3549
    leak_count=150
    base_routes=200
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .frl import IpPrefix, Route, is_strict_subprefix

FILLER_ASNS = range(1000, 60000)


class InvalidSpec(ValueError):
    pass


@dataclass
class Interception:
    hijacked_subprefix: IpPrefix
    s: int
    t: int
    attacker: Optional[int] = None
    hide_attacker: bool = True


@dataclass
class Leak:
    originator: int
    upstream: int
    count: int
    base_routes: int = 200


@dataclass
class ScenarioSpec:
    victim: int
    victim_prefixes: list
    backhaul: list = field(default_factory=list)
    transit: list = field(default_factory=list)
    peers: object = 4  # int count or list of ASNs
    seed: int = 0
    attack: Optional[Interception] = None
    leak: Optional[Leak] = None


@dataclass(frozen=True)
class ExpectedAlert:
    victim_as: int
    p_v: IpPrefix
    p_prime_v: IpPrefix
    s: Optional[int]
    t: int
    chain: tuple  # AS numbers: t, segment..., victim

    def matches(self, alert) -> bool:
        return (
            alert.victim_as == self.victim_as
            and alert.p_v == self.p_v
            and alert.p_prime_v == self.p_prime_v
            and alert.s == self.s
            and alert.t == self.t
            and tuple(alert.segment.asns) == self.chain
        )

    def record(self) -> str:
        return "\t".join(
            [str(self.victim_as), str(self.p_v), str(self.p_prime_v),
             "-" if self.s is None else str(self.s), str(self.t), " ".join(map(str, self.chain))]
        )


def _fillers(rng: random.Random, n: int, exclude: set) -> list[int]:
    out = []
    while len(out) < n:
        a = rng.choice(FILLER_ASNS)
        if a not in exclude:
            exclude.add(a)
            out.append(a)
    return out


def _role_asns(spec: ScenarioSpec) -> set:
    roles = {spec.victim, *spec.backhaul, *spec.transit}
    if isinstance(spec.peers, (list, tuple)):
        roles.update(spec.peers)
    if spec.attack:
        roles.update(x for x in (spec.attack.s, spec.attack.t, spec.attack.attacker) if x is not None)
    if spec.leak:
        roles.update((spec.leak.originator, spec.leak.upstream))
    return roles


def _peers(spec: ScenarioSpec, rng: random.Random) -> list[int]:
    if isinstance(spec.peers, (list, tuple)):
        return list(spec.peers)
    if spec.peers < 1:
        raise InvalidSpec("need at least one observation peer")
    return _fillers(rng, spec.peers, _role_asns(spec))


def _check_benign(spec: ScenarioSpec) -> None:
    if not spec.victim_prefixes:
        raise InvalidSpec("victim needs at least one prefix")
    chain = [*spec.backhaul, spec.victim]
    if len(set(chain)) != len(chain):
        raise InvalidSpec("backhaul repeats an AS")
    if set(spec.transit) & set(chain):
        raise InvalidSpec("transit overlaps the backhaul")
    if isinstance(spec.peers, (list, tuple)) and set(spec.peers) & (set(chain) | set(spec.transit)):
        raise InvalidSpec("peers overlap transit or backhaul")


def _benign_paths(spec: ScenarioSpec, rng: random.Random) -> list[list[int]]:
    paths = []
    for peer in _peers(spec, rng):
        via = [rng.choice(spec.transit)] if spec.transit else []
        paths.append([peer, *via, *spec.backhaul, spec.victim])
    return paths


def gen_benign(spec: ScenarioSpec) -> set:
    """Every victim prefix announced along the same paths from every peer."""
    _check_benign(spec)
    rng = random.Random(spec.seed)
    routes = set()
    for path in _benign_paths(spec, rng):
        for p in spec.victim_prefixes:
            routes.add(Route.from_asns(path, p))
    return routes


def gen_interception(spec: ScenarioSpec) -> tuple[set, ExpectedAlert]:
    """Benign routes plus forged subprefix routes carrying the backhaul path.

    Forged paths read ``peer s [attacker] t backhaul... victim``; with a
    hidden attacker the alert names ``s`` and ``t``, otherwise the attacker
    shows up as the first label of the artificial chain.
    """
    attack = spec.attack
    if attack is None:
        raise InvalidSpec("scenario has no attack")
    _check_benign(spec)
    if attack.s == attack.t:
        raise InvalidSpec("s and t must differ")
    if len(spec.backhaul) + 1 < 3:
        raise InvalidSpec("backhaul plus victim must span at least 3 ASes")
    hijacked = attack.hijacked_subprefix
    covering = [p for p in spec.victim_prefixes if is_strict_subprefix(hijacked, p)]
    if len(covering) != 1:
        raise InvalidSpec("hijacked subprefix must lie strictly inside exactly one victim prefix")
    if any(p == hijacked or is_strict_subprefix(p, hijacked) for p in spec.victim_prefixes):
        raise InvalidSpec("hijacked subprefix must be more specific than every victim prefix")
    attackers = [attack.s, attack.t] + ([] if attack.hide_attacker or attack.attacker is None else [attack.attacker])
    if not attack.hide_attacker and attack.attacker is None:
        raise InvalidSpec("hide_attacker=false needs an attacker AS")
    legit = {spec.victim, *spec.backhaul, *spec.transit}
    if set(attackers) & legit or len(set(attackers)) != len(attackers):
        raise InvalidSpec("attacker-side ASes must be distinct and outside the victim's paths")

    rng = random.Random(spec.seed)
    routes = set()
    paths = _benign_paths(spec, rng)
    for path in paths:
        for p in spec.victim_prefixes:
            routes.add(Route.from_asns(path, p))
    middle = [attack.s] if attack.hide_attacker else [attack.s, attack.attacker]
    for path in paths:
        peer = path[0]
        if peer in attackers:
            raise InvalidSpec("an observation peer coincides with an attacker upstream")
        routes.add(Route.from_asns([peer, *middle, attack.t, *spec.backhaul, spec.victim], hijacked))

    if attack.hide_attacker:
        expected = ExpectedAlert(spec.victim, covering[0], hijacked, attack.s, attack.t,
                                 (attack.t, *spec.backhaul, spec.victim))
    else:
        expected = ExpectedAlert(spec.victim, covering[0], hijacked, attack.s, attack.attacker,
                                 (attack.attacker, attack.t, *spec.backhaul, spec.victim))
    return routes, expected


def gen_leak_base(spec: ScenarioSpec) -> set:
    """A background table: peers, transit providers, regional ASes and stub origins.

    The originator is a stub behind the leak upstream announcing two prefixes.
    """
    leak = spec.leak
    if leak is None:
        raise InvalidSpec("scenario has no leak")
    rng = random.Random(spec.seed)
    used = _role_asns(spec)
    peers = _peers(spec, rng)
    used.update(peers)
    # the leak upstream only serves the originator before the leak
    tier1 = [t for t in spec.transit if t != leak.upstream] or _fillers(rng, 5, used)
    if leak.originator in tier1 or leak.originator in peers:
        raise InvalidSpec("originator must be a stub customer")
    regional = _fillers(rng, 12, used)
    per_peer = max(1, leak.base_routes // len(peers))
    n_prefixes = max(1, per_peer - 2)
    routes = set()
    for i in range(n_prefixes):
        prefix = IpPrefix((10 << 24) | (i << 8), 24)
        origin = _fillers(rng, 1, used)[0]
        region = rng.choice(regional)
        for peer in peers:
            up = rng.choice(tier1)
            mid = [region] if rng.random() < 0.9 else []
            routes.add(Route.from_asns([peer, up, *mid, origin], prefix))
    for j in range(2):
        prefix = IpPrefix((172 << 24) | (16 << 16) | (j << 8), 24)
        for peer in peers:
            routes.add(Route.from_asns([peer, leak.upstream, leak.originator], prefix))
    return routes


def gen_leak(spec: ScenarioSpec, base: set) -> tuple[set, set]:
    """Re-announce ``count`` foreign routes through the leak upstream and originator.

    A leaked route keeps the observation peer and everything behind the
    original first transit hop; that hop is replaced by ``upstream
    originator``, so the old transit loses the traffic the leak attracts.
    """
    leak = spec.leak
    if leak is None:
        raise InvalidSpec("scenario has no leak")
    if not any(leak.originator in r.collapsed_asns for r in base):
        raise InvalidSpec(f"originator AS{leak.originator} does not appear in the base table")
    if leak.count == 0:
        return set(base), set(base)
    candidates = sorted(
        (r for r in base
         if len(r.collapsed_asns) >= 3
         and leak.originator not in r.collapsed_asns
         and leak.upstream not in r.collapsed_asns),
        key=lambda r: r.sort_key,
    )
    if leak.count > len(candidates):
        raise InvalidSpec(f"only {len(candidates)} routes can be leaked, asked for {leak.count}")
    rng = random.Random(spec.seed + 1)
    chosen = rng.sample(candidates, leak.count)
    after = set(base)
    for r in chosen:
        after.discard(r)
        asns = list(r.asns)
        hop = asns[1]
        rest = asns[1:]
        while rest[0] == hop:
            rest.pop(0)
        after.add(Route.from_asns([asns[0], leak.upstream, leak.originator, *rest], r.prefix))
    return set(base), after


def gen_suffix_heavy(seed: int = 0, n_routes: int = 1000, n_suffixes: int = 10) -> set:
    """Many distinct heads funnelling into a handful of shared tails."""
    rng = random.Random(seed)
    used: set = set()
    suffixes = []
    for i in range(n_suffixes):
        tail = _fillers(rng, 4, used)
        suffixes.append((tail, IpPrefix((100 << 24) | (i << 16), 16)))
    heads = _fillers(rng, 60, used)
    routes = set()
    while len(routes) < n_routes:
        tail, prefix = rng.choice(suffixes)
        head = rng.sample(heads, rng.randint(1, 3))
        routes.add(Route.from_asns([*head, *tail], prefix))
    return routes


def gen_self_adaptive(n_peers: int = 6, n_prefixes: int = 3) -> list[Route]:
    """An insertion order whose last route shrinks the automaton.

    Every peer reaches every prefix over the same tail except the last
    peer, which is missing one prefix until the final insertion; completing
    the cross product lets its private chain merge into the shared one.
    """
    peers = [64700 + i for i in range(n_peers)]
    tail = [3356, 174, 20940]
    prefixes = [IpPrefix((192 << 24) | (168 << 16) | (i << 8), 24) for i in range(n_prefixes)]
    order = [Route.from_asns([p, *tail], pfx) for p in peers for pfx in prefixes]
    last = order.pop(len(prefixes) * (n_peers - 1))
    order.append(last)
    return order


DEFCON_SPEC = ScenarioSpec(
    victim=20195,
    victim_prefixes=[
        IpPrefix.parse("24.120.56.0/22"),
        IpPrefix.parse("24.120.60.0/23"),
        IpPrefix.parse("64.57.96.0/20"),
        IpPrefix.parse("207.228.224.0/19"),
    ],
    backhaul=[22822, 23005],
    transit=[3356, 174, 2914],
    peers=6,
    seed=2008,
    attack=Interception(IpPrefix.parse("24.120.56.0/24"), s=26627, t=4436, hide_attacker=True),
)


# -- scenario files --------------------------------------------------------

def _ints(value: str) -> list[int]:
    return [int(x) for x in value.replace(",", " ").split()]


def _bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise InvalidSpec(f"not a boolean: {value!r}")


def parse_spec(text: str) -> tuple[str, ScenarioSpec]:
    """Parse a scenario file; returns (scenario kind, spec)."""
    kv = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InvalidSpec(f"line {lineno}: expected key=value")
        kv[key.strip()] = value.strip()
    try:
        kind = kv.pop("scenario", "interception" if "hijacked_subprefix" in kv else "benign")
        if kind not in ("benign", "interception", "leak"):
            raise InvalidSpec(f"unknown scenario {kind!r}")
        peers = _ints(kv.pop("peers")) if "peers" in kv else int(kv.pop("n_peers", "4"))
        spec = ScenarioSpec(
            victim=int(kv.pop("victim", "0")),
            victim_prefixes=[IpPrefix.parse(p) for p in kv.pop("victim_prefixes", "").replace(",", " ").split()],
            backhaul=_ints(kv.pop("backhaul", "")),
            transit=_ints(kv.pop("transit", "")),
            peers=peers,
            seed=int(kv.pop("seed", "0")),
        )
        attack_keys = ("hijacked_subprefix", "s", "t", "attacker", "hide_attacker")
        if kind == "interception":
            attacker = kv.pop("attacker", "")
            spec.attack = Interception(
                IpPrefix.parse(kv.pop("hijacked_subprefix")),
                s=int(kv.pop("s")),
                t=int(kv.pop("t")),
                attacker=int(attacker) if attacker else None,
                hide_attacker=_bool(kv.pop("hide_attacker", "true")),
            )
        elif kind == "leak":
            spec.leak = Leak(
                originator=int(kv.pop("originator")),
                upstream=int(kv.pop("leak_upstream")),
                count=int(kv.pop("leak_count")),
                base_routes=int(kv.pop("base_routes", "200")),
            )
        else:
            for k in attack_keys:
                kv.pop(k, None)
    except KeyError as exc:
        raise InvalidSpec(f"missing key {exc.args[0]!r}") from exc
    except ValueError as exc:
        if isinstance(exc, InvalidSpec):
            raise
        raise InvalidSpec(str(exc)) from exc
    if kv:
        raise InvalidSpec(f"unknown keys: {', '.join(sorted(kv))}")
    return kind, spec
