"""Trie and AS-graph representations of a route set, for size comparison.

The trie is what incremental construction yields without the minimization
step; :func:`minimize_trie` minimizes it after the fact with classical
partition refinement, which gives an independent check on the incremental
engine.  The graph keeps only adjacency and therefore over-approximates the
observed routes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .automaton import RouteAutomaton
from .frl import IpPrefix, Route


class RouteTrie:
    """Prefix tree over route words; node 0 is the root."""

    def __init__(self, routes=()):
        self.children: list[dict] = [{}]
        self.leaf: list[bool] = [False]
        for r in routes:
            self.add(r)

    def add(self, route: Route) -> bool:
        node = 0
        grew = False
        for sym in route.symbols:
            nxt = self.children[node].get(sym)
            if nxt is None:
                nxt = len(self.children)
                self.children.append({})
                self.leaf.append(False)
                self.children[node][sym] = nxt
                grew = True
            node = nxt
        self.leaf[node] = True
        return grew

    def accepts(self, route: Route) -> bool:
        node = 0
        for sym in route.symbols:
            node = self.children[node].get(sym)
            if node is None:
                return False
        return self.leaf[node]

    @property
    def node_count(self) -> int:
        """Nodes including the root."""
        return len(self.children)

    @property
    def edge_count(self) -> int:
        return len(self.children) - 1


def build_trie(routes) -> RouteTrie:
    return RouteTrie(routes)


def minimize_trie(trie: RouteTrie) -> tuple[int, int]:
    """(states, transitions) of the minimal DFA for the trie's language.

    Moore-style refinement: start from the accepting / non-accepting split
    and split blocks by (block, outgoing (label, target block)) until the
    number of blocks stops growing.  A lone accepting state is counted even
    when the language is empty, matching the automaton's fixed q0/q_f pair.
    """
    children = trie.children
    n = len(children)
    block = [1 if trie.leaf[i] else 0 for i in range(n)]
    count = len(set(block))
    while True:
        sigs = {}
        new_block = [0] * n
        for i in range(n):
            sig = (block[i], frozenset((s, block[c]) for s, c in children[i].items()))
            new_block[i] = sigs.setdefault(sig, len(sigs))
        block = new_block
        if len(sigs) == count:
            break
        count = len(sigs)
    reps = {}
    for i in range(n):
        reps.setdefault(block[i], i)
    transitions = sum(len(children[i]) for i in reps.values())
    states = len(reps) + (0 if any(trie.leaf) else 1)
    return states, transitions


@dataclass
class AsGraph:
    """Undirected adjacency of ASes and prefixes."""

    nodes: set
    links: set

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def link_count(self) -> int:
        return len(self.links)


def _route_pairs(route: Route):
    asns = route.collapsed_asns
    for a, b in zip(asns, asns[1:]):
        yield a, b
    yield asns[-1], route.prefix


def build_graph(routes) -> AsGraph:
    nodes = set()
    links = set()
    for r in routes:
        nodes.update(r.collapsed_asns)
        nodes.add(r.prefix)
        for a, b in _route_pairs(r):
            if a != b:
                links.add(frozenset((a, b)))
    return AsGraph(nodes, links)


def graph_implies(graph: AsGraph, route: Route) -> bool:
    """True if every hop of ``route`` is a link, i.e. the graph would admit it."""
    return all(frozenset(pair) in graph.links for pair in _route_pairs(route))


def graph_to_dot(graph: AsGraph) -> str:
    def name(node):
        return f"AS{node}" if isinstance(node, int) else str(node)

    def key(node):
        return (0, node) if isinstance(node, int) else node.sort_key

    lines = ["graph as_graph {"]
    for node in sorted(graph.nodes, key=key):
        shape = "box" if isinstance(node, IpPrefix) else "ellipse"
        lines.append(f'  "{name(node)}" [shape={shape}];')
    for link in sorted((tuple(sorted(l, key=key)) for l in graph.links), key=lambda l: (key(l[0]), key(l[1]))):
        lines.append(f'  "{name(link[0])}" -- "{name(link[1])}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SizeComparison:
    automaton_states: int
    automaton_transitions: int
    trie_nodes: int
    trie_edges: int
    graph_nodes: int
    graph_links: int

    @property
    def ratios(self) -> dict[str, float]:
        def div(a, b):
            return a / b if b else float("nan")

        return {
            "trie_nodes_per_state": div(self.trie_nodes, self.automaton_states),
            "trie_edges_per_transition": div(self.trie_edges, self.automaton_transitions),
            "states_per_graph_node": div(self.automaton_states, self.graph_nodes),
            "transitions_per_graph_link": div(self.automaton_transitions, self.graph_links),
        }


def compare_sizes(routes, automaton: RouteAutomaton | None = None) -> SizeComparison:
    routes = list(routes)
    if automaton is None:
        automaton = RouteAutomaton(routes)
    trie = build_trie(routes)
    graph = build_graph(routes)
    st = automaton.stats()
    return SizeComparison(
        st.states, st.transitions, trie.node_count, trie.edge_count, graph.node_count, graph.link_count
    )
