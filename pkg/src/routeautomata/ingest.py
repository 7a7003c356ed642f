"""Reading route corpora from text exports.

Two line formats are understood:

``simple``
    ``ASN ASN ... ASN|A.B.C.D/L``; ``#`` starts a comment line, blank lines
    are ignored.

``bgpdump-m``
    The pipe-separated machine-readable table dump (``bgpdump -m``).  Field 6
    is the prefix and field 7 the space-separated AS path.  Only
    ``TABLE_DUMP*`` records of type ``B`` are routes; paths containing an
    ``{...}`` AS_SET are dropped.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, fields

from .frl import FrlError, IpPrefix, LoopDetected, Route, normalize_path

log = logging.getLogger(__name__)

FORMATS = ("simple", "bgpdump-m")


class Malformed(ValueError):
    pass


class AsSetPath(ValueError):
    """The AS path contains an AS_SET; the line is skipped, not an error."""


class UnsupportedFamily(ValueError):
    """An IPv6 route; counted and skipped."""


@dataclass
class IngestReport:
    accepted: int = 0
    dropped_as_set: int = 0
    dropped_loop: int = 0
    dropped_malformed: int = 0
    dropped_ipv6: int = 0
    duplicate_routes: int = 0
    distinct_prefixes: int = 0
    distinct_asns: int = 0
    distinct_paths: int = 0

    @property
    def route_lines(self) -> int:
        return (
            self.accepted
            + self.dropped_as_set
            + self.dropped_loop
            + self.dropped_malformed
            + self.dropped_ipv6
            + self.duplicate_routes
        )

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _parse_asn(token: str) -> int:
    if "." in token:  # asdot notation for 32-bit ASNs
        hi, _, lo = token.partition(".")
        if not (hi.isdigit() and lo.isdigit()):
            raise Malformed(f"bad AS number {token!r}")
        hi, lo = int(hi), int(lo)
        if hi > 0xFFFF or lo > 0xFFFF:
            raise Malformed(f"bad AS number {token!r}")
        value = (hi << 16) | lo
    else:
        if not token.isdigit():
            raise Malformed(f"bad AS number {token!r}")
        value = int(token)
    if value == 0 or value > 0xFFFFFFFF:
        raise Malformed(f"AS number out of range: {token}")
    return value


def _parse_prefix(text: str) -> IpPrefix:
    if ":" in text:
        raise UnsupportedFamily(text)
    try:
        return IpPrefix.parse(text)
    except FrlError as exc:
        raise Malformed(str(exc)) from exc


def _make_route(asns: list[int], prefix: IpPrefix, collapse_prepends: bool) -> Route:
    try:
        return Route(tuple(normalize_path(asns, collapse_prepends)), prefix)
    except LoopDetected:
        raise
    except FrlError as exc:
        raise Malformed(str(exc)) from exc


def parse_simple(line: str, collapse_prepends: bool = False) -> Route:
    path, sep, prefix = line.strip().partition("|")
    if not sep:
        raise Malformed("missing '|' separator")
    if "|" in prefix:
        raise Malformed("more than one '|' separator")
    tokens = path.split()
    if not tokens:
        raise Malformed("empty AS path")
    asns = [_parse_asn(t) for t in tokens]
    return _make_route(asns, _parse_prefix(prefix), collapse_prepends)


def parse_bgpdump_m(line: str, collapse_prepends: bool = False) -> Route | None:
    """Route for a RIB entry line, None for lines that carry no route."""
    parts = line.rstrip("\r\n").split("|")
    if len(parts) < 3:
        raise Malformed(f"expected pipe-separated record, got {len(parts)} field(s)")
    if not parts[0].startswith("TABLE_DUMP") or parts[2] != "B":
        return None
    if len(parts) < 7:
        raise Malformed(f"RIB entry needs at least 7 fields, got {len(parts)}")
    prefix_text, path_text = parts[5], parts[6]
    if "{" in path_text or "}" in path_text:
        raise AsSetPath(path_text)
    tokens = path_text.split()
    if not tokens:
        raise Malformed("empty AS path")
    prefix = _parse_prefix(prefix_text)
    asns = [_parse_asn(t) for t in tokens]
    return _make_route(asns, prefix, collapse_prepends)


def iter_routes(lines, fmt: str = "simple", report: IngestReport | None = None, collapse_prepends=False):
    """Yield parsed routes from ``lines``, counting drops into ``report``.

    Duplicates are yielded too; deduplication is the caller's business.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    if report is None:
        report = IngestReport()
    for lineno, line in enumerate(lines, 1):
        if fmt == "simple":
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
        elif not line.strip():
            continue
        try:
            if fmt == "simple":
                route = parse_simple(line, collapse_prepends)
            else:
                route = parse_bgpdump_m(line, collapse_prepends)
                if route is None:
                    continue
        except AsSetPath:
            report.dropped_as_set += 1
        except LoopDetected as exc:
            report.dropped_loop += 1
            log.debug("line %d: %s", lineno, exc)
        except UnsupportedFamily:
            report.dropped_ipv6 += 1
        except Malformed as exc:
            report.dropped_malformed += 1
            log.debug("line %d: %s", lineno, exc)
        else:
            yield route


def ingest_lines(lines, fmt: str = "simple", collapse_prepends: bool = False) -> tuple[set, IngestReport]:
    report = IngestReport()
    routes: set = set()
    for route in iter_routes(lines, fmt, report, collapse_prepends):
        if route in routes:
            report.duplicate_routes += 1
        else:
            routes.add(route)
            report.accepted += 1
    summarize(routes, report)
    return routes, report


def summarize(routes, report: IngestReport) -> IngestReport:
    report.distinct_prefixes = len({r.prefix for r in routes})
    report.distinct_asns = len({a for r in routes for a in r.collapsed_asns})
    report.distinct_paths = len({r.collapsed_asns for r in routes})
    return report


def ingest_file(path, fmt: str = "simple", collapse_prepends: bool = False) -> tuple[set, IngestReport]:
    """Parse a whole file.  Bad lines are counted, never fatal; OSError propagates."""
    with open(path, encoding="utf-8", errors="replace") as f:
        return ingest_lines(f, fmt, collapse_prepends)


def dump_simple(routes, fp) -> None:
    """Write routes in the simple format, sorted for byte-stable output."""
    for route in sorted(routes, key=lambda r: r.sort_key):
        fp.write(f"{route}\n")
