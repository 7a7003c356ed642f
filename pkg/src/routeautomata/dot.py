"""Graphviz rendering of route automata."""

from __future__ import annotations

from .automaton import FINAL, START, RouteAutomaton
from .frl import AsSymbol, IpPrefix


def _label(sym) -> str:
    return str(sym)


def restrict_to_prefix(automaton: RouteAutomaton, prefix: IpPrefix) -> set:
    """Edges lying on some accepted route that ends with ``prefix``."""
    preds: dict[int, list] = {}
    for q, sym, t in automaton.edges():
        preds.setdefault(t, []).append((q, sym))
    keep = set()
    frontier = [q for q, sym in preds.get(FINAL, []) if sym == prefix]
    for q in frontier:
        keep.add((q, prefix, FINAL))
    seen = set(frontier)
    while frontier:
        t = frontier.pop()
        for q, sym in preds.get(t, []):
            keep.add((q, sym, t))
            if q not in seen:
                seen.add(q)
                frontier.append(q)
    return keep


def restrict_to_asn(automaton: RouteAutomaton, asn: int) -> set:
    """Edges lying on some accepted route that passes through ``asn``."""
    preds: dict[int, list] = {}
    edges = list(automaton.edges())
    for q, sym, t in edges:
        preds.setdefault(t, []).append((q, sym))
    hits = [(q, sym, t) for q, sym, t in edges if isinstance(sym, AsSymbol) and sym.asn == asn]
    before = set()
    stack = [q for q, _, _ in hits]
    while stack:
        t = stack.pop()
        if t in before:
            continue
        before.add(t)
        stack.extend(q for q, _ in preds.get(t, []))
    after = set()
    stack = [t for _, _, t in hits]
    while stack:
        q = stack.pop()
        if q in after:
            continue
        after.add(q)
        stack.extend(automaton.transitions(q).values())
    return {
        (q, sym, t)
        for q, sym, t in edges
        if t in before or q in after or (isinstance(sym, AsSymbol) and sym.asn == asn)
    }


def export_dot(automaton: RouteAutomaton, prefix: IpPrefix | None = None, asn: int | None = None,
               name: str = "route_automaton") -> str:
    """DOT text for the automaton, optionally cut down to one prefix and/or one AS.

    Node names follow the canonical state order, so the output is stable for
    a given language regardless of construction history.
    """
    keep = None
    if prefix is not None:
        keep = restrict_to_prefix(automaton, prefix)
    if asn is not None:
        by_asn = restrict_to_asn(automaton, asn)
        keep = by_asn if keep is None else keep & by_asn

    order = automaton.canonical_order()
    number = {q: i for i, q in enumerate(o for o in order if o != FINAL)}

    def node(q):
        return "qf" if q == FINAL else f"q{number[q]}"

    edges = []
    for q in order:
        out = automaton.transitions(q)
        for sym in sorted(out, key=lambda s: s.sort_key):
            if keep is None or (q, sym, out[sym]) in keep:
                edges.append((q, sym, out[sym]))
    shown = {START, FINAL}
    for q, _, t in edges:
        shown.update((q, t))

    lines = [f"digraph {name} {{", "  rankdir=LR;", "  node [shape=circle];"]
    for q in order:
        if q not in shown:
            continue
        if q == FINAL:
            lines.append('  qf [shape=doublecircle, label="qf"];')
        else:
            lines.append(f'  {node(q)} [label="{node(q)}"];')
    for q, sym, t in edges:
        style = ", style=bold" if isinstance(sym, IpPrefix) else ""
        lines.append(f'  {node(q)} -> {node(t)} [label="{_label(sym)}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
