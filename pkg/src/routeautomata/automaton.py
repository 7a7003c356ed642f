"""Minimal acyclic route automaton with incremental add and remove.

Every mutation keeps the automaton minimal.  Insertion follows the usual
three steps for unsorted input: walk the longest common prefix (cloning
confluence states so no unobserved route leaks in), append fresh states for
the rest of the word, then walk back along the word replacing each state by
an equivalent registered one where possible.  Because the walk back proceeds
from the final state towards the start, comparing outgoing transitions is
enough to decide equivalence, so the register is keyed by the transition
set of a state.

All routes end with a prefix, and every prefix transition targets the single
accepting state ``FINAL``.  Missing transitions stand for the dead state.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .frl import AsSymbol, IpPrefix, Route, Symbol

START = 0
FINAL = 1


class UnknownState(KeyError):
    pass


@dataclass
class Mutation:
    """What a single add or remove changed."""

    changed: bool = False
    states_added: int = 0
    states_removed: int = 0
    cloned: int = 0


@dataclass(frozen=True)
class AutomatonStats:
    states: int
    transitions: int
    routes: int
    prefixes: int
    asns: int


class RouteAutomaton:
    def __init__(self, routes=()):
        self._out: list[Optional[dict]] = [{}, {}]
        self._indeg: list[int] = [0, 0]
        self._key: list[Optional[frozenset]] = [None, None]
        self._register: dict[frozenset, int] = {}
        self._free: list[int] = []
        self._n_states = 2
        self._n_trans = 0
        self._n_routes = 0
        for r in routes:
            self.add(r)

    # -- bookkeeping -------------------------------------------------------

    def _new_state(self, out: dict, m: Mutation) -> int:
        if self._free:
            q = self._free.pop()
            self._out[q] = out
            self._indeg[q] = 0
            self._key[q] = None
        else:
            q = len(self._out)
            self._out.append(out)
            self._indeg.append(0)
            self._key.append(None)
        indeg = self._indeg
        for child in out.values():
            indeg[child] += 1
        self._n_trans += len(out)
        self._n_states += 1
        m.states_added += 1
        return q

    def _delete_state(self, q: int, m: Mutation) -> None:
        out = self._out[q]
        indeg = self._indeg
        for child in out.values():
            indeg[child] -= 1
        self._n_trans -= len(out)
        self._out[q] = None
        self._key[q] = None
        self._free.append(q)
        self._n_states -= 1
        m.states_removed += 1

    def _unregister(self, q: int) -> None:
        key = self._key[q]
        if key is not None:
            if self._register.get(key) == q:
                del self._register[key]
            self._key[q] = None

    def _walk_path(self, word: Sequence[Symbol]) -> list[int]:
        out = self._out
        path = [START]
        q = START
        for sym in word:
            q = out[q].get(sym)
            if q is None:
                break
            path.append(q)
        return path

    def _make_private(self, path: list[int], word, upto: int, m: Mutation) -> None:
        """Unregister path[1..upto] and clone everything from the first confluence on."""
        indeg = self._indeg
        out = self._out
        first = None
        for i in range(1, upto + 1):
            if indeg[path[i]] > 1:
                first = i
                break
            self._unregister(path[i])
        if first is None:
            return
        for i in range(first, upto + 1):
            orig = path[i]
            clone = self._new_state(dict(out[orig]), m)
            out[path[i - 1]][word[i - 1]] = clone
            indeg[clone] += 1
            indeg[orig] -= 1
            path[i] = clone
            m.cloned += 1

    def _replace_or_register(self, path: list[int], word, m: Mutation) -> None:
        out = self._out
        register = self._register
        for i in range(len(path) - 1, 0, -1):
            q = path[i]
            parent = path[i - 1]
            if not out[q]:
                # dead end left behind by a removal
                del out[parent][word[i - 1]]
                self._n_trans -= 1
                self._delete_state(q, m)
                continue
            key = frozenset(out[q].items())
            twin = register.get(key)
            if twin is None:
                register[key] = q
                self._key[q] = key
            elif twin != q:
                out[parent][word[i - 1]] = twin
                self._indeg[twin] += 1
                self._indeg[q] -= 1
                self._delete_state(q, m)

    # -- mutations ---------------------------------------------------------

    def add(self, route: Route) -> Mutation:
        """Add one route; no-op if it is already accepted."""
        if not isinstance(route, Route):
            raise TypeError(f"expected Route, got {type(route).__name__}")
        word = route.symbols
        m = Mutation()
        path = self._walk_path(word)
        k = len(path) - 1
        if k == len(word):
            return m
        m.changed = True
        self._make_private(path, word, k, m)
        out = self._out
        q = path[-1]
        for sym in word[k:-1]:
            new = self._new_state({}, m)
            out[q][sym] = new
            self._indeg[new] += 1
            self._n_trans += 1
            path.append(new)
            q = new
        out[q][word[-1]] = FINAL
        self._indeg[FINAL] += 1
        self._n_trans += 1
        self._replace_or_register(path, word, m)
        self._n_routes += 1
        return m

    def remove(self, route: Route) -> Mutation:
        """Remove one route; no-op if it is not accepted."""
        if not isinstance(route, Route):
            raise TypeError(f"expected Route, got {type(route).__name__}")
        word = route.symbols
        m = Mutation()
        path = self._walk_path(word)
        if len(path) != len(word) + 1:
            return m
        m.changed = True
        path.pop()  # FINAL
        self._make_private(path, word, len(path) - 1, m)
        del self._out[path[-1]][word[-1]]
        self._indeg[FINAL] -= 1
        self._n_trans -= 1
        self._replace_or_register(path, word, m)
        self._n_routes -= 1
        return m

    def update(self, routes) -> None:
        for r in routes:
            self.add(r)

    def copy(self) -> "RouteAutomaton":
        new = RouteAutomaton.__new__(RouteAutomaton)
        new._out = [dict(o) if o is not None else None for o in self._out]
        new._indeg = list(self._indeg)
        new._key = list(self._key)
        new._register = dict(self._register)
        new._free = list(self._free)
        new._n_states = self._n_states
        new._n_trans = self._n_trans
        new._n_routes = self._n_routes
        return new

    # -- queries -----------------------------------------------------------

    start = START
    final = FINAL

    def __len__(self):
        return self._n_routes

    def __contains__(self, route: Route) -> bool:
        return self.accepts(route)

    def states(self) -> list[int]:
        return [q for q, o in enumerate(self._out) if o is not None]

    def transitions(self, q: int) -> dict:
        """Outgoing transitions of ``q`` as ``{symbol: target}`` (read-only view)."""
        out = self._out[q] if 0 <= q < len(self._out) else None
        if out is None:
            raise UnknownState(q)
        return out

    def in_degree(self, q: int) -> int:
        self.transitions(q)
        return self._indeg[q]

    def edges(self) -> Iterator[tuple[int, Symbol, int]]:
        for q, out in enumerate(self._out):
            if out:
                for sym, t in out.items():
                    yield q, sym, t

    def walk(self, partial: Sequence[Symbol]) -> Optional[int]:
        """Extended transition function from the start state; None for the dead state."""
        out = self._out
        q = START
        for sym in partial:
            q = out[q].get(sym)
            if q is None:
                return None
        return q

    def accepts(self, route: Route) -> bool:
        return self.walk(route.symbols) == FINAL

    def topological_order(self) -> list[int]:
        indeg = {q: self._indeg[q] for q in self.states()}
        order = []
        stack = [q for q, d in indeg.items() if d == 0]
        while stack:
            q = stack.pop()
            order.append(q)
            for t in self._out[q].values():
                indeg[t] -= 1
                if indeg[t] == 0:
                    stack.append(t)
        if len(order) != self._n_states:
            raise AssertionError("automaton contains a cycle")
        return order

    def path_counts(self) -> dict[int, int]:
        """Number of accepted suffix words per state (FINAL counts the empty word)."""
        counts = {}
        for q in reversed(self.topological_order()):
            out = self._out[q]
            counts[q] = 1 if q == FINAL else sum(counts[t] for t in out.values())
        return counts

    def right_language_size(self, q: int) -> int:
        self.transitions(q)
        memo = {FINAL: 1}
        out = self._out
        stack = [q]
        while stack:
            s = stack[-1]
            if s in memo:
                stack.pop()
                continue
            pending = [t for t in out[s].values() if t not in memo]
            if pending:
                stack.extend(pending)
            else:
                memo[s] = sum(memo[t] for t in out[s].values())
                stack.pop()
        return memo[q]

    def enumerate_routes(self) -> Iterator[Route]:
        """Yield every accepted route once, in lexicographic symbol order."""
        out = self._out
        stack = [(START, ())]
        while stack:
            q, word = stack.pop()
            for sym in sorted(out[q], key=_key, reverse=True):
                stack.append((out[q][sym], word + (sym,)))
            if q == FINAL:
                yield Route(word[:-1], word[-1])

    def stats(self) -> AutomatonStats:
        prefixes = set()
        asns = set()
        for _, sym, _ in self.edges():
            if isinstance(sym, IpPrefix):
                prefixes.add(sym)
            else:
                asns.add(sym.asn)
        return AutomatonStats(self._n_states, self._n_trans, self._n_routes, len(prefixes), len(asns))

    # -- canonical form ----------------------------------------------------

    def canonical_order(self) -> list[int]:
        """States in a topological order that depends only on structure.

        A state becomes ready once all its predecessors are numbered; among
        ready states the one with the smallest (incoming label, predecessor
        number) goes first.
        """
        out = self._out
        remaining = {q: self._indeg[q] for q in self.states()}
        best: dict[int, tuple] = {}
        number: dict[int, int] = {}
        order = []
        heap = [((), START)]
        while heap:
            _, q = heapq.heappop(heap)
            number[q] = len(order)
            order.append(q)
            for sym, t in out[q].items():
                cand = (sym.sort_key, number[q])
                if t not in best or cand < best[t]:
                    best[t] = cand
                remaining[t] -= 1
                if remaining[t] == 0:
                    heapq.heappush(heap, (best[t], t))
        # FINAL may be unreachable in an empty automaton
        if FINAL not in number:
            number[FINAL] = len(order)
            order.append(FINAL)
        if len(order) != self._n_states:
            raise AssertionError("automaton has unreachable states or a cycle")
        return order

    def canonical_edges(self) -> tuple:
        """Edge list under canonical numbering; equal iff the automata are isomorphic."""
        number = {q: i for i, q in enumerate(self.canonical_order())}
        edges = sorted((number[q], sym.sort_key, number[t]) for q, sym, t in self.edges())
        return (number[FINAL], tuple(edges))

    def isomorphic(self, other: "RouteAutomaton") -> bool:
        return self.canonical_edges() == other.canonical_edges()

    # -- validation ----------------------------------------------------------

    def check_invariants(self) -> None:
        """Raise AssertionError unless every structural invariant holds."""
        live = self.states()
        assert START in live and FINAL in live
        assert len(live) == self._n_states, "state counter drift"
        assert not self._out[FINAL], "final state has outgoing transitions"
        indeg = {q: 0 for q in live}
        n_trans = 0
        for q, sym, t in self.edges():
            assert self._out[t] is not None, f"transition into freed state {t}"
            if isinstance(sym, IpPrefix):
                assert t == FINAL, "prefix transition must target the final state"
            else:
                assert isinstance(sym, AsSymbol)
                assert t != FINAL, "AS transition must not target the final state"
            indeg[t] += 1
            n_trans += 1
        assert n_trans == self._n_trans, "transition counter drift"
        for q in live:
            assert indeg[q] == self._indeg[q], f"in-degree drift at {q}"
            if q not in (START, FINAL):
                assert indeg[q] > 0, f"orphan state {q}"
                assert self._out[q], f"dead-end state {q}"
        self.topological_order()
        seen = {}
        for q in live:
            if q in (START, FINAL):
                continue
            key = frozenset(self._out[q].items())
            assert key not in seen, f"states {seen.get(key)} and {q} are equivalent"
            seen[key] = q
            assert self._register.get(key) == q, f"state {q} missing from register"
        assert len(self._register) == len(seen), "stale register entries"
        assert self.path_counts()[START] == self._n_routes, "route counter drift"


def _key(sym):
    return sym.sort_key


def build(routes) -> RouteAutomaton:
    return RouteAutomaton(routes)
