"""Random route corpora and brute-force oracles shared by the test modules."""

from routeautomata.automaton import FINAL
from routeautomata.frl import AsSymbol, IpPrefix, Route


def random_prefixes(rng, n):
    out = set()
    while len(out) < n:
        length = rng.randint(8, 24)
        out.add(IpPrefix(rng.getrandbits(32), length))
    return sorted(out)


def random_routes(rng, n_routes, asn_pool=200, n_prefixes=50, max_len=6, prepend_prob=0.1):
    """Routes with realistic sharing: every prefix has a fixed origin and a few upstreams."""
    asns = rng.sample(range(1, 70000), asn_pool)
    prefixes = random_prefixes(rng, rng.randint(1, n_prefixes))
    origin = {p: rng.choice(asns) for p in prefixes}
    upstreams = {a: rng.sample(asns, 3) for a in asns}
    routes = set()
    for _ in range(n_routes):
        p = rng.choice(prefixes)
        path = [origin[p]]
        for _ in range(rng.randint(0, max_len - 1)):
            nxt = rng.choice(upstreams[path[-1]])
            if nxt in path:
                break
            path.append(nxt)
        path.reverse()
        raw = []
        for a in path:
            raw.append(a)
            while rng.random() < prepend_prob:
                raw.append(a)
        routes.add(Route.from_asns(raw, p))
    return routes


def brute_force_dominance(automaton):
    """|Q(u)| by enumerating every AS-only walk from every non-final state."""
    reach = {}
    for q in automaton.states():
        if q == FINAL:
            continue
        stack = [(q, None)]
        while stack:
            s, first = stack.pop()
            for sym, t in automaton.transitions(s).items():
                if not isinstance(sym, AsSymbol):
                    continue
                u = sym.asn if first is None else first
                reach.setdefault(u, set()).add(t)
                stack.append((t, u))
    return {u: len(states) for u, states in reach.items()}
