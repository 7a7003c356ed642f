"""Interception search over a route automaton.

The pattern has three stages:

1. *Artificiality*: a chain ``q_a -t-> ... -v-> q'_v`` in which every state
   before ``q'_v`` has exactly one outgoing transition and ``q'_v`` carries
   only prefix transitions.  The AS labels after ``t`` form the segment
   ``w`` that ends at the victim ``v``.
2. *Nonuniformity*: some other state ``q_v`` is entered by a ``v``-labelled
   transition and also carries prefixes of ``v``, i.e. ``v``'s routes are
   redistributed differently elsewhere.
3. *Alert*: a prefix ``p'_v`` on ``q'_v`` is a strict subprefix of a prefix
   ``p_v`` on ``q_v``.

Chains stop at confluence states, so each terminal state yields at most one
maximal chain and reported chains never overlap.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .automaton import FINAL, START, RouteAutomaton
from .frl import AsSymbol, IpPrefix, is_strict_subprefix


@dataclass(frozen=True)
class DetectorConfig:
    min_segment_length: int = 3
    sibling_groups: tuple = ()
    require_strict_subprefix: bool = True

    def __post_init__(self):
        if self.min_segment_length < 1:
            raise ValueError("min_segment_length must be >= 1")
        object.__setattr__(self, "sibling_groups", tuple(frozenset(g) for g in self.sibling_groups))


@dataclass(frozen=True)
class ArtificialSegment:
    entry_state: int
    chain_labels: tuple  # AsSymbols: t followed by the segment, ending at v
    chain_states: tuple  # state after each label; the last one is q'_v
    terminal_prefixes: tuple

    @property
    def terminal_state(self) -> int:
        return self.chain_states[-1]

    @property
    def asns(self) -> tuple:
        """Chain AS numbers with prepend repeats collapsed."""
        out = []
        for sym in self.chain_labels:
            if not out or out[-1] != sym.asn:
                out.append(sym.asn)
        return tuple(out)

    @property
    def victim_as(self) -> int:
        return self.chain_labels[-1].asn

    @property
    def upstream_t(self) -> int:
        return self.chain_labels[0].asn

    @property
    def length(self) -> int:
        """|w|, the segment without ``t``, counting each AS once."""
        return len(self.asns) - 1


@dataclass(frozen=True)
class NonuniformContext:
    state: int  # q_v
    witness: tuple  # AS symbols leading from the start state to q_v
    prefixes: tuple


@dataclass(frozen=True)
class InterceptionAlert:
    victim_as: int
    p_v: IpPrefix
    p_prime_v: IpPrefix
    segment: ArtificialSegment
    contradicting_state: int
    witness: tuple
    s: Optional[int]
    t: int

    @property
    def key(self) -> tuple:
        """Identity of the alert independent of state numbering."""
        return (
            self.victim_as,
            self.p_v.sort_key,
            self.p_prime_v.sort_key,
            tuple(a.sort_key for a in self.segment.chain_labels),
            tuple(a.sort_key for a in self.witness),
            self.s,
            self.t,
        )

    def record(self) -> str:
        """One tab-separated line: victim, p_v, p'_v, s, t, chain, witness."""
        return "\t".join(
            [
                str(self.victim_as),
                str(self.p_v),
                str(self.p_prime_v),
                "-" if self.s is None else str(self.s),
                str(self.t),
                " ".join(str(a.asn) for a in self.segment.chain_labels),
                " ".join(str(a.asn) for a in self.witness),
            ]
        )


@dataclass
class DetectionResult:
    segments: list = field(default_factory=list)
    nonuniform: list = field(default_factory=list)  # (segment, context) pairs
    alerts: list = field(default_factory=list)


class _Index:
    """Reverse adjacency and canonical shortest words for one frozen automaton."""

    def __init__(self, automaton: RouteAutomaton):
        self.automaton = automaton
        self.preds: dict[int, list] = {}
        self.entered_by: dict[int, set] = {}  # asn -> states entered by that AS
        for q, sym, t in automaton.edges():
            self.preds.setdefault(t, []).append((q, sym))
            if isinstance(sym, AsSymbol):
                self.entered_by.setdefault(sym.asn, set()).add(t)
        self._words = None

    @property
    def words(self) -> dict:
        """Shortest, then lexicographically smallest, word reaching each state."""
        if self._words is None:
            words = {START: ()}
            queue = deque([START])
            a = self.automaton
            while queue:
                q = queue.popleft()
                out = a.transitions(q)
                for sym in sorted(out, key=lambda s: s.sort_key):
                    t = out[sym]
                    if t not in words:
                        words[t] = words[q] + (sym,)
                        queue.append(t)
            self._words = words
        return self._words


def _prefixes(out: dict) -> tuple:
    return tuple(sorted((s for s in out if isinstance(s, IpPrefix)), key=lambda s: s.sort_key))


def _segments(index: _Index, config: DetectorConfig) -> list[ArtificialSegment]:
    a = index.automaton
    found = []
    for q in a.states():
        if q in (START, FINAL):
            continue
        out = a.transitions(q)
        if not out or not all(isinstance(s, IpPrefix) for s in out):
            continue
        labels = []
        states = [q]
        cur = q
        while True:
            preds = index.preds.get(cur, [])
            if len(preds) != 1:
                break
            p, sym = preds[0]
            if len(a.transitions(p)) != 1:
                break
            labels.append(sym)
            states.append(p)
            cur = p
        if not labels:
            continue
        labels.reverse()
        states.reverse()
        seg = ArtificialSegment(
            entry_state=states[0],
            chain_labels=tuple(labels),
            chain_states=tuple(states[1:]),
            terminal_prefixes=_prefixes(out),
        )
        if seg.length >= config.min_segment_length:
            found.append(seg)
    found.sort(key=lambda s: (s.victim_as, [p.sort_key for p in s.terminal_prefixes],
                              [l.sort_key for l in s.chain_labels]))
    return found


def find_artificial_segments(automaton: RouteAutomaton, config: DetectorConfig = DetectorConfig()):
    return _segments(_Index(automaton), config)


def _contexts(index: _Index, segment: ArtificialSegment) -> list[NonuniformContext]:
    a = index.automaton
    found = []
    for t in index.entered_by.get(segment.victim_as, ()):
        if t == segment.terminal_state:
            continue
        prefixes = _prefixes(a.transitions(t))
        if prefixes:
            found.append(NonuniformContext(t, index.words[t], prefixes))
    found.sort(key=lambda c: (len(c.witness), [s.sort_key for s in c.witness]))
    return found


def check_nonuniformity(automaton: RouteAutomaton, segment: ArtificialSegment) -> Optional[NonuniformContext]:
    """The contradicting context with the shortest (then smallest) witness, if any."""
    found = _contexts(_Index(automaton), segment)
    return found[0] if found else None


def _neighbor(asns, v):
    """The AS just before ``v`` at the tail of ``asns``, skipping prepends."""
    for a in reversed(asns):
        if a != v:
            return a
    return None


def _is_sibling_case(config: DetectorConfig, segment: ArtificialSegment, witness: tuple) -> bool:
    v = segment.victim_as
    members = {v}
    forged = _neighbor(segment.asns, v)
    legit = _neighbor([s.asn for s in witness], v)
    members.update(x for x in (forged, legit) if x is not None)
    return any(members <= group for group in config.sibling_groups)


def _upstream_s(index: _Index, segment: ArtificialSegment) -> Optional[int]:
    labels = {sym.asn for _, sym in index.preds.get(segment.entry_state, [])}
    return labels.pop() if len(labels) == 1 else None


def detect(automaton: RouteAutomaton, config: DetectorConfig = DetectorConfig()) -> DetectionResult:
    """Run the full pipeline and keep the per-stage results."""
    index = _Index(automaton)
    result = DetectionResult()
    result.segments = _segments(index, config)
    alerts = {}
    for seg in result.segments:
        contexts = _contexts(index, seg)
        if not contexts:
            continue
        result.nonuniform.append((seg, contexts[0]))
        for ctx in contexts:
            for p_v in ctx.prefixes:
                for p_prime in seg.terminal_prefixes:
                    if config.require_strict_subprefix:
                        if not is_strict_subprefix(p_prime, p_v):
                            continue
                    elif not p_v.covers(p_prime):
                        continue
                    if _is_sibling_case(config, seg, ctx.witness):
                        continue
                    key = (seg.victim_as, p_v, p_prime)
                    if key in alerts:
                        continue
                    alerts[key] = InterceptionAlert(
                        victim_as=seg.victim_as,
                        p_v=p_v,
                        p_prime_v=p_prime,
                        segment=seg,
                        contradicting_state=ctx.state,
                        witness=ctx.witness,
                        s=_upstream_s(index, seg),
                        t=seg.upstream_t,
                    )
    result.alerts = sorted(alerts.values(), key=lambda al: (al.victim_as, al.p_prime_v.sort_key, al.p_v.sort_key))
    return result


def raise_alerts(automaton: RouteAutomaton, config: DetectorConfig = DetectorConfig()) -> list[InterceptionAlert]:
    return detect(automaton, config).alerts


def format_alert(alert: InterceptionAlert) -> str:
    seg = alert.segment
    chain = " ".join(f"AS{a}" for a in seg.asns)
    s = "unknown" if alert.s is None else f"AS{alert.s}"
    return "\n".join(
        [
            f"interception alert: victim AS{alert.victim_as}",
            f"  legitimate prefix  {alert.p_v}",
            f"  hijacked subprefix {alert.p_prime_v}",
            f"  artificial chain   {chain}  (|w| = {seg.length})",
            f"  benign context     {' '.join(str(a) for a in alert.witness)}",
            f"  attacker upstreams s={s} t=AS{alert.t}",
        ]
    )
