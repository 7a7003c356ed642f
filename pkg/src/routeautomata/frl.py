"""Alphabet and words of the finite route language.

A route is a word ``a_1 a_2 ... a_n p``: AS symbols followed by exactly one
IP prefix.  Consecutive repetitions of an AS (path prepending) become
indexed instances ``o_1, o_2, ...`` so that no symbol repeats inside a word.
"""

from __future__ import annotations

import ipaddress
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

MAX_ASN = 2**32 - 1


class FrlError(ValueError):
    """Base class for route validation errors."""


class EmptyPath(FrlError):
    pass


class LoopDetected(FrlError):
    def __init__(self, asn: int):
        super().__init__(f"AS{asn} reappears non-consecutively in path")
        self.asn = asn


class InvalidAsn(FrlError):
    pass


class InvalidPrefix(FrlError):
    pass


def check_asn(value: int) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise InvalidAsn(f"AS number must be an integer, got {value!r}")
    if not 0 <= value <= MAX_ASN:
        raise InvalidAsn(f"AS number out of 32-bit range: {value}")
    return value


@dataclass(frozen=True, slots=True)
class AsSymbol:
    """One occurrence of an AS in a path; ``index`` counts prepend repeats."""

    asn: int
    index: int = 1

    def __post_init__(self):
        check_asn(self.asn)
        if self.index < 1:
            raise FrlError(f"prepend index must be >= 1, got {self.index}")

    @property
    def sort_key(self) -> tuple:
        return (0, self.asn, self.index)

    def __lt__(self, other):
        return self.sort_key < other.sort_key

    def __str__(self):
        return f"AS{self.asn}" if self.index == 1 else f"AS{self.asn}#{self.index}"


@dataclass(frozen=True, slots=True)
class IpPrefix:
    """An IPv4 prefix.  Host bits are cleared on construction."""

    base: int
    length: int
    family: int = field(default=4, compare=False)

    def __post_init__(self):
        if self.family != 4:
            raise InvalidPrefix(f"unsupported address family: {self.family}")
        if not 0 <= self.length <= 32:
            raise InvalidPrefix(f"prefix length out of range: {self.length}")
        if not 0 <= self.base <= 0xFFFFFFFF:
            raise InvalidPrefix(f"address out of range: {self.base}")
        object.__setattr__(self, "base", self.base & _mask(self.length))

    @classmethod
    def parse(cls, text: str) -> "IpPrefix":
        text = text.strip()
        if "/" not in text:
            raise InvalidPrefix(f"missing prefix length: {text!r}")
        try:
            net = ipaddress.IPv4Network(text, strict=False)
        except (ValueError, TypeError) as exc:
            raise InvalidPrefix(f"not an IPv4 prefix: {text!r}") from exc
        return cls(int(net.network_address), net.prefixlen)

    @property
    def sort_key(self) -> tuple:
        return (1, self.base, self.length)

    def __lt__(self, other):
        return self.sort_key < other.sort_key

    def __str__(self):
        return f"{ipaddress.IPv4Address(self.base)}/{self.length}"

    def covers(self, other: "IpPrefix") -> bool:
        """True if ``other`` lies inside this prefix (equality included)."""
        return other.length >= self.length and (other.base & _mask(self.length)) == self.base


def _mask(length: int) -> int:
    return (0xFFFFFFFF << (32 - length)) & 0xFFFFFFFF


Symbol = Union[AsSymbol, IpPrefix]


def symbol_key(sym: Symbol) -> tuple:
    return sym.sort_key


def is_strict_subprefix(p_small: IpPrefix, p_big: IpPrefix) -> bool:
    return p_small.length > p_big.length and p_big.covers(p_small)


def normalize_path(raw_asns: Sequence[int], collapse_prepends: bool = False) -> list[AsSymbol]:
    """Turn a raw AS path into prepend-indexed symbols.

    ``[701, 701, 20195]`` becomes ``[AS701#1, AS701#2, AS20195#1]``; with
    ``collapse_prepends`` runs shrink to a single symbol instead.
    """
    if not raw_asns:
        raise EmptyPath("AS path is empty")
    out: list[AsSymbol] = []
    seen: set[int] = set()
    prev = None
    run = 0
    for asn in raw_asns:
        check_asn(asn)
        if asn == prev:
            run += 1
            if not collapse_prepends:
                out.append(AsSymbol(asn, run))
            continue
        if asn in seen:
            raise LoopDetected(asn)
        seen.add(asn)
        prev = asn
        run = 1
        out.append(AsSymbol(asn, 1))
    return out


@dataclass(frozen=True, slots=True)
class Route:
    """An AS path ending in a prefix.  Immutable and hashable."""

    path: tuple[AsSymbol, ...]
    prefix: IpPrefix

    def __post_init__(self):
        if not self.path:
            raise EmptyPath("route needs at least one AS")
        if not isinstance(self.prefix, IpPrefix):
            raise FrlError("route must end with an IP prefix")
        prev = None
        for sym in self.path:
            if not isinstance(sym, AsSymbol):
                raise FrlError(f"path entries must be AS symbols, got {sym!r}")
            if prev is not None:
                if sym.asn == prev.asn and sym.index != prev.index + 1:
                    raise FrlError(f"bad prepend indexing at {sym}")
                if sym.asn != prev.asn and sym.index != 1:
                    raise FrlError(f"bad prepend indexing at {sym}")
            elif sym.index != 1:
                raise FrlError(f"bad prepend indexing at {sym}")
            prev = sym
        if len(set(self.path)) != len(self.path) or len({s.asn for s in self.path}) != _runs(self.path):
            raise LoopDetected(_first_loop(self.path))

    @classmethod
    def from_asns(cls, asns: Iterable[int], prefix, collapse_prepends: bool = False) -> "Route":
        if isinstance(prefix, str):
            prefix = IpPrefix.parse(prefix)
        return cls(tuple(normalize_path(list(asns), collapse_prepends)), prefix)

    @classmethod
    def parse(cls, text: str) -> "Route":
        """Parse ``"701 3356|24.120.56.0/22"`` (the simple route format)."""
        path, _, prefix = text.partition("|")
        return cls.from_asns([int(t) for t in path.split()], prefix)

    @property
    def symbols(self) -> tuple:
        return self.path + (self.prefix,)

    @property
    def asns(self) -> list[int]:
        """The raw AS path, prepends included."""
        return [s.asn for s in self.path]

    @property
    def collapsed_asns(self) -> tuple[int, ...]:
        return tuple(s.asn for s in self.path if s.index == 1)

    @property
    def origin(self) -> int:
        return self.path[-1].asn

    @property
    def sort_key(self) -> tuple:
        return tuple(s.sort_key for s in self.symbols)

    def __str__(self):
        return " ".join(str(a) for a in self.asns) + "|" + str(self.prefix)


def _runs(path) -> int:
    return sum(1 for s in path if s.index == 1)


def _first_loop(path) -> int:
    seen = set()
    prev = None
    for s in path:
        if s.asn != prev and s.asn in seen:
            return s.asn
        seen.add(s.asn)
        prev = s.asn
    return path[0].asn


RouteSet = set  # a plain set of Route values
