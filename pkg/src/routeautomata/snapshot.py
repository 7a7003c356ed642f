"""Versioned binary snapshots of a route automaton.

Layout (all little-endian)::

    header      magic b"CAIR", version u16, flags u16,
                states u32, transitions u64, routes u64
    records     from u32, tag u8, payload, to u32   (one per transition)
                  tag 0: AS      payload = asn u32, prepend index u16
                  tag 1: IPv4    payload = base u32, length u8
    trailer     checksum u64 (BLAKE2b, 8-byte digest, over all prior bytes)

States are renumbered on save: 0 is the start state, 1 the accepting state,
the rest follow the canonical order, so equal automata give equal files.
"""

from __future__ import annotations

import hashlib
import struct

from .automaton import FINAL, START, RouteAutomaton
from .frl import AsSymbol, FrlError, IpPrefix

MAGIC = b"CAIR"
VERSION = 1

_HEADER = struct.Struct("<4sHHIQQ")
_EDGE_HEAD = struct.Struct("<IB")
_AS = struct.Struct("<IH")
_PFX = struct.Struct("<IB")
_TO = struct.Struct("<I")
_SUM = struct.Struct("<Q")

TAG_AS = 0
TAG_IPV4 = 1


class SnapshotError(Exception):
    pass


class VersionMismatch(SnapshotError):
    pass


class CorruptFile(SnapshotError):
    pass


def _checksum(data: bytes) -> int:
    return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "little")


def dumps(automaton: RouteAutomaton) -> bytes:
    order = [q for q in automaton.canonical_order() if q not in (START, FINAL)]
    number = {START: 0, FINAL: 1}
    for i, q in enumerate(order, start=2):
        number[q] = i
    st = automaton.stats()
    chunks = [_HEADER.pack(MAGIC, VERSION, 0, st.states, st.transitions, st.routes)]
    for q in [START] + order:
        out = automaton.transitions(q)
        for sym in sorted(out, key=lambda s: s.sort_key):
            if isinstance(sym, AsSymbol):
                chunks.append(_EDGE_HEAD.pack(number[q], TAG_AS) + _AS.pack(sym.asn, sym.index))
            else:
                chunks.append(_EDGE_HEAD.pack(number[q], TAG_IPV4) + _PFX.pack(sym.base, sym.length))
            chunks.append(_TO.pack(number[out[sym]]))
    body = b"".join(chunks)
    return body + _SUM.pack(_checksum(body))


def loads(data: bytes) -> RouteAutomaton:
    if len(data) < _HEADER.size + _SUM.size:
        raise CorruptFile("file too short")
    magic, version, _flags, n_states, n_trans, n_routes = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise CorruptFile("bad magic")
    if version != VERSION:
        raise VersionMismatch(f"snapshot version {version}, this build reads {VERSION}")
    body, (stored,) = data[: -_SUM.size], _SUM.unpack_from(data, len(data) - _SUM.size)
    if _checksum(body) != stored:
        raise CorruptFile("checksum mismatch")
    if n_states < 2:
        raise CorruptFile("fewer than two states")

    out: list[dict] = [{} for _ in range(n_states)]
    pos = _HEADER.size
    try:
        for _ in range(n_trans):
            src, tag = _EDGE_HEAD.unpack_from(body, pos)
            pos += _EDGE_HEAD.size
            if tag == TAG_AS:
                asn, index = _AS.unpack_from(body, pos)
                sym = AsSymbol(asn, index)
                pos += _AS.size
            elif tag == TAG_IPV4:
                base, length = _PFX.unpack_from(body, pos)
                sym = IpPrefix(base, length)
                pos += _PFX.size
            else:
                raise CorruptFile(f"unknown symbol tag {tag}")
            (dst,) = _TO.unpack_from(body, pos)
            pos += _TO.size
            if src >= n_states or dst >= n_states or sym in out[src]:
                raise CorruptFile("bad transition record")
            out[src][sym] = dst
    except (struct.error, FrlError) as exc:
        raise CorruptFile(str(exc)) from exc
    if pos != len(body):
        raise CorruptFile("trailing bytes after transitions")

    automaton = _assemble(out)
    if automaton.stats().routes != n_routes:
        raise CorruptFile("route count mismatch")
    try:
        automaton.check_invariants()
    except AssertionError as exc:
        raise CorruptFile(f"invalid automaton: {exc}") from exc
    return automaton


def _assemble(out: list[dict]) -> RouteAutomaton:
    a = RouteAutomaton()
    a._out = out
    a._indeg = [0] * len(out)
    for o in out:
        for t in o.values():
            a._indeg[t] += 1
    a._key = [None] * len(out)
    a._register = {}
    for q in range(2, len(out)):
        key = frozenset(out[q].items())
        a._key[q] = key
        a._register.setdefault(key, q)
    a._n_states = len(out)
    a._n_trans = sum(len(o) for o in out)
    try:
        a._n_routes = a.path_counts()[START]
    except AssertionError as exc:
        raise CorruptFile(str(exc)) from exc
    return a


def save(automaton: RouteAutomaton, path) -> None:
    with open(path, "wb") as f:
        f.write(dumps(automaton))


def load(path) -> RouteAutomaton:
    with open(path, "rb") as f:
        return loads(f.read())
