"""Minimal route automata for BGP tables: construction, interception search, dominance."""

from .automaton import FINAL, START, RouteAutomaton, build
from .detect import DetectorConfig, InterceptionAlert, detect, raise_alerts
from .dominance import assess_leak, diff, dominance
from .frl import AsSymbol, IpPrefix, Route
from .snapshot import load, save

__all__ = [
    "FINAL", "START", "RouteAutomaton", "build",
    "DetectorConfig", "InterceptionAlert", "detect", "raise_alerts",
    "assess_leak", "diff", "dominance",
    "AsSymbol", "IpPrefix", "Route",
    "load", "save",
]
