"""Routing dominance per AS and route-leak assessment between snapshots.

The dominance of an AS ``u`` is the number of states reachable by a walk
that starts with a ``u``-labelled transition and continues over AS labels
only.  Prepend instances of ``u`` count as the same AS.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .automaton import RouteAutomaton
from .frl import AsSymbol


@dataclass
class DominanceReport:
    snapshot_label: str
    per_as: dict  # asn -> |Q(u)|

    def ranking(self, n: Optional[int] = None) -> list[tuple[int, int]]:
        ranked = sorted(self.per_as.items(), key=lambda kv: (-kv[1], kv[0]))
        return ranked if n is None else ranked[:n]


@dataclass(frozen=True)
class AsDelta:
    before: int
    after: int

    @property
    def delta(self) -> int:
        return self.after - self.before

    @property
    def delta_pct(self) -> float:
        """Change relative to ``before``; newcomers get +inf."""
        if self.before == 0:
            return math.inf if self.after else 0.0
        return 100.0 * self.delta / self.before


@dataclass
class DominanceDiff:
    per_as: dict  # asn -> AsDelta
    before_label: str = ""
    after_label: str = ""

    @property
    def changed_as_count(self) -> int:
        return sum(1 for d in self.per_as.values() if d.delta)

    @property
    def changed_as_fraction(self) -> float:
        return self.changed_as_count / len(self.per_as) if self.per_as else 0.0

    @property
    def total_state_churn(self) -> int:
        return sum(abs(d.delta) for d in self.per_as.values())


@dataclass
class LeakVerdict:
    suspected_originator: Optional[int]
    originator_gain_pct: float
    catalysts: list = field(default_factory=list)  # (asn, gain)
    victims: list = field(default_factory=list)  # (asn, loss)
    triggered: bool = False
    gain_threshold_pct: float = 500.0
    churn_threshold: float = 0.05
    changed_as_fraction: float = 0.0
    interval: tuple = ("", "")


def _iter_reach(automaton: RouteAutomaton):
    seeds: dict[int, set] = {}
    for _, sym, t in automaton.edges():
        if isinstance(sym, AsSymbol):
            seeds.setdefault(sym.asn, set()).add(t)
    for asn, start in seeds.items():
        seen = set(start)
        stack = list(start)
        while stack:
            q = stack.pop()
            for sym, t in automaton.transitions(q).items():
                if t not in seen and isinstance(sym, AsSymbol):
                    seen.add(t)
                    stack.append(t)
        yield asn, seen


def dominance(automaton: RouteAutomaton, label: str = "") -> DominanceReport:
    return DominanceReport(label, {asn: len(seen) for asn, seen in _iter_reach(automaton)})


def reach_sets(automaton: RouteAutomaton) -> dict[int, set]:
    """The state sets behind :func:`dominance`."""
    return dict(_iter_reach(automaton))


def diff(before: DominanceReport, after: DominanceReport) -> DominanceDiff:
    asns = set(before.per_as) | set(after.per_as)
    per_as = {u: AsDelta(before.per_as.get(u, 0), after.per_as.get(u, 0)) for u in asns}
    return DominanceDiff(per_as, before.snapshot_label, after.snapshot_label)


def top_movers(d: DominanceDiff, n: int) -> list[tuple[int, AsDelta]]:
    ranked = sorted(d.per_as.items(), key=lambda kv: (-abs(kv[1].delta), kv[0]))
    return ranked[: max(n, 0)]


def assess_leak(d: DominanceDiff, gain_threshold_pct: float = 500.0, churn_threshold: float = 0.05,
                k: int = 5) -> LeakVerdict:
    """Flag a leak when a top gainer grows sharply while many ASes change.

    The originator is the AS with the largest relative gain among the ``k``
    largest absolute gainers; the remaining gainers are catalysts.
    """
    gainers = sorted(((u, x) for u, x in d.per_as.items() if x.delta > 0), key=lambda kv: (-kv[1].delta, kv[0]))[:k]
    losers = sorted(((u, x) for u, x in d.per_as.items() if x.delta < 0), key=lambda kv: (kv[1].delta, kv[0]))[:k]
    verdict = LeakVerdict(
        suspected_originator=None,
        originator_gain_pct=0.0,
        victims=[(u, x.delta) for u, x in losers],
        gain_threshold_pct=gain_threshold_pct,
        churn_threshold=churn_threshold,
        changed_as_fraction=d.changed_as_fraction,
        interval=(d.before_label, d.after_label),
    )
    if not gainers:
        return verdict
    orig, od = max(gainers, key=lambda kv: (kv[1].delta_pct, kv[1].delta, -kv[0]))
    verdict.suspected_originator = orig
    verdict.originator_gain_pct = od.delta_pct
    verdict.catalysts = [(u, x.delta) for u, x in gainers if u != orig]
    verdict.triggered = od.delta_pct >= gain_threshold_pct and d.changed_as_fraction >= churn_threshold
    return verdict


def _pct(x: float) -> str:
    return "new" if math.isinf(x) else f"{x:+.2f}%"


def format_movers(d: DominanceDiff, n: int = 10) -> str:
    rows = [f"{'rank':>4}  {'AS':<10} {'before':>10} {'delta':>10} {'(pct)':>12} {'after':>10}"]
    for i, (u, x) in enumerate(top_movers(d, n), 1):
        rows.append(f"{i:>4}. AS{u:<8} {x.before:>10,} {x.delta:>+10,} {'(' + _pct(x.delta_pct) + ')':>12} {x.after:>10,}")
    return "\n".join(rows)


def format_verdict(v: LeakVerdict) -> str:
    lines = [
        f"route leak: {'TRIGGERED' if v.triggered else 'not triggered'}",
        f"  interval            {v.interval[0] or '?'} -> {v.interval[1] or '?'}",
        f"  changed AS fraction {v.changed_as_fraction:.2%} (threshold {v.churn_threshold:.2%})",
    ]
    if v.suspected_originator is not None:
        lines.append(
            f"  suspected originator AS{v.suspected_originator} gain {_pct(v.originator_gain_pct)}"
            f" (threshold {v.gain_threshold_pct:+.0f}%)"
        )
    if v.catalysts:
        lines.append("  catalysts  " + ", ".join(f"AS{u} {g:+,}" for u, g in v.catalysts))
    if v.victims:
        lines.append("  victims    " + ", ".join(f"AS{u} {g:+,}" for u, g in v.victims))
    return "\n".join(lines)
