"""Hereditarily finite sets, ranked names and their interpretation.

Both HF sets and names are ``frozenset`` subclasses, so structural equality is
extensional equality and every value is hashable (usable as a dict key or
assignment domain). Canonical text and sort keys are memoised per value.
"""

from __future__ import annotations

from collections.abc import Iterable
from functools import lru_cache
from itertools import combinations

from .errors import ParseError


class HFSet(frozenset):
    """A hereditarily finite set; members are themselves HFSets."""

    __slots__ = ()

    def __repr__(self) -> str:
        return format_hf(self)

    __str__ = __repr__

    @property
    def rank(self) -> int:
        return hf_rank(self)


EMPTY = HFSet()


@lru_cache(maxsize=None)
def format_hf(x: frozenset) -> str:
    return "{" + ",".join(format_hf(y) for y in sorted_hf(x)) + "}"


def hf_key(x: frozenset) -> tuple[int, str]:
    text = format_hf(x)
    return len(text), text


def sorted_hf(items: Iterable[frozenset]) -> list:
    return sorted(items, key=hf_key)


@lru_cache(maxsize=None)
def hf_rank(x: frozenset) -> int:
    return 1 + max(map(hf_rank, x)) if x else 0


def canonicalize_hf(raw) -> HFSet:
    """Convert nested iterables or braces text to canonical HFSet form."""
    if isinstance(raw, str):
        return parse_hf(raw)
    if isinstance(raw, HFSet):
        return raw
    return HFSet(canonicalize_hf(y) for y in raw)


def parse_hf(text: str) -> HFSet:
    """Parse ``HF ::= '{' (HF (',' HF)*)? '}'``, whitespace ignored."""
    src = "".join(text.split())
    pos = 0

    def parse() -> HFSet:
        nonlocal pos
        if pos >= len(src) or src[pos] != "{":
            raise ParseError(f"expected '{{' at offset {pos} in {text!r}")
        pos += 1
        members = []
        if pos < len(src) and src[pos] == "}":
            pos += 1
            return EMPTY
        while True:
            members.append(parse())
            if pos >= len(src):
                raise ParseError(f"unterminated set in {text!r}")
            if src[pos] == ",":
                pos += 1
            elif src[pos] == "}":
                pos += 1
                return HFSet(members)
            else:
                raise ParseError(f"unexpected {src[pos]!r} at offset {pos} in {text!r}")

    value = parse()
    if pos != len(src):
        raise ParseError(f"trailing input at offset {pos} in {text!r}")
    return value


def is_transitive(x: frozenset) -> bool:
    return all(y <= x for y in x)


def non_transitive_witness(x: frozenset):
    """Return ``(member, missing)`` with ``missing in member`` but not in x."""
    for y in sorted_hf(x):
        for z in sorted_hf(y):
            if z not in x:
                return y, z
    return None


def transitive_closure(x: frozenset) -> HFSet:
    seen: set = set()
    stack = list(x)
    while stack:
        y = stack.pop()
        if y not in seen:
            seen.add(y)
            stack.extend(y)
    return HFSet(seen)


def ordinal(n: int) -> HFSet:
    out = EMPTY
    for _ in range(n):
        out = HFSet(out | {out})
    return out


def kpair(a: HFSet, b: HFSet) -> HFSet:
    """Kuratowski ordered pair."""
    return HFSet({HFSet({a}), HFSet({a, b})})


def cumulative_level(n: int) -> list[HFSet]:
    """Members of V_n in canonical order."""
    level: list[HFSet] = []
    for _ in range(n):
        level = [HFSet(c) for k in range(len(level) + 1) for c in combinations(level, k)]
    return sorted_hf(level)


@lru_cache(maxsize=32)
def _transitive_sets(rank_bound: int, max_size: int | None) -> tuple[HFSet, ...]:
    universe = cumulative_level(rank_bound)
    out = []
    limit = len(universe) if max_size is None else min(max_size, len(universe))
    for k in range(limit + 1):
        for combo in combinations(universe, k):
            x = HFSet(combo)
            if is_transitive(x):
                out.append(x)
    return tuple(sorted_hf(out))


def transitive_sets(rank_bound: int, max_size: int | None = None) -> list[HFSet]:
    """All transitive HF sets of rank <= rank_bound, canonical order.

    Brute force over subsets of V_rank_bound, so only rank_bound <= 4.
    """
    if rank_bound > 4:
        raise ValueError("transitive set enumeration supports rank_bound <= 4")
    return list(_transitive_sets(rank_bound, max_size))


class PName(frozenset):
    """A name: a finite set of ``(child_name, condition)`` pairs."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "PName" + format_name(self)

    @property
    def rank(self) -> int:
        return name_rank(self)


EMPTY_NAME = PName()


@lru_cache(maxsize=None)
def format_name(s: frozenset) -> str:
    parts = sorted(f"({format_name(c)},{p})" for c, p in s)
    return "[" + ",".join(parts) + "]"


@lru_cache(maxsize=None)
def name_rank(s: frozenset) -> int:
    return 1 + max(name_rank(c) for c, _ in s) if s else 0


def name_key(s: frozenset) -> tuple[int, int, str]:
    text = format_name(s)
    return name_rank(s), len(text), text


def sorted_names(names: Iterable[PName]) -> list[PName]:
    return sorted(names, key=name_key)


def potential_elements(t: PName) -> list[PName]:
    """First-level constituents of ``t``, deduplicated, in canonical order."""
    return sorted_names({c for c, _ in t})


def subnames(t: PName) -> list[PName]:
    """``t`` and every name occurring in it hereditarily."""
    seen: set = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if s not in seen:
            seen.add(s)
            stack.extend(c for c, _ in s)
    return sorted_names(seen)


def conditions_of(s: PName) -> frozenset:
    """Every condition occurring anywhere inside ``s``."""
    return frozenset(p for u in subnames(s) for _, p in u)


def _top_of(P) -> object:
    return getattr(P, "top", P)


def check_name(x: frozenset, P) -> PName:
    """Canonical name of ``x``; ``P`` is a poset or its top element."""
    return _check_name(canonicalize_hf(x), _top_of(P))


@lru_cache(maxsize=None)
def _check_name(x: HFSet, top) -> PName:
    return PName((_check_name(y, top), top) for y in x)


@lru_cache(maxsize=None)
def _check_value(s: PName, top):
    members = []
    for c, p in s:
        if p != top:
            return None
        v = _check_value(c, top)
        if v is None:
            return None
        members.append(v)
    return HFSet(members)


def check_value(s: PName, P) -> HFSet | None:
    """The x with ``s == check_name(x)``, or None if s is not a check-name."""
    return _check_value(s, _top_of(P))


def interpret(s: PName, G: Iterable) -> HFSet:
    """``s[G]``: interpretations of the children whose condition lies in G."""
    return _interpret(s, frozenset(G))


@lru_cache(maxsize=1 << 18)
def _interpret(s: PName, G: frozenset) -> HFSet:
    return HFSet(_interpret(c, G) for c, p in s if p in G)
