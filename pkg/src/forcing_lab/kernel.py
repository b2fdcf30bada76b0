"""Finite forcing notions: partial orders with a top, filters, dense sets and
generic filters.

A filter is represented as a ``frozenset`` of elements. Elements are any
hashable values; the poset keeps them in a fixed iteration order so every
enumeration below is deterministic.
"""

from __future__ import annotations

from collections.abc import Callable, Hashable, Iterable
from itertools import combinations

from .errors import CycleError, SizeCapExceeded, TopError, UnknownCondition

Filter = frozenset


class Poset:
    """An immutable finite partial order with a designated top.

    ``leq`` holds the full reflexive-transitive relation as ``(a, b)`` pairs
    meaning ``a <= b`` (a is the stronger condition). Use
    :func:`validate_poset` to build one from generating pairs.
    """

    __slots__ = ("elements", "top", "leq", "_down", "_up", "_index", "_hash")

    def __init__(self, elements: Iterable[Hashable], leq: Iterable[tuple], top: Hashable):
        self.elements = tuple(elements)
        self.top = top
        self.leq = frozenset(leq)
        self._index = {p: i for i, p in enumerate(self.elements)}
        down: dict = {p: [] for p in self.elements}
        up: dict = {p: [] for p in self.elements}
        for q in self.elements:
            for p in self.elements:
                if (q, p) in self.leq:
                    down[p].append(q)
                    up[q].append(p)
        self._down = {p: tuple(v) for p, v in down.items()}
        self._up = {p: tuple(v) for p, v in up.items()}
        self._hash = hash((self.elements, self.leq, self.top))

    @classmethod
    def from_relation(cls, elements: Iterable[Hashable], le: Callable[[object, object], bool], top: Hashable) -> Poset:
        """Build from an order predicate already known to be a partial order."""
        elems = tuple(elements)
        return cls(elems, ((a, b) for a in elems for b in elems if le(a, b)), top)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, p) -> bool:
        return p in self._index

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poset):
            return NotImplemented
        return self.elements == other.elements and self.top == other.top and self.leq == other.leq

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Poset({list(self.elements)!r}, top={self.top!r})"

    def le(self, a, b) -> bool:
        return (a, b) in self.leq

    def below(self, p) -> tuple:
        """All q with q <= p, p included, in iteration order."""
        return self._down[p]

    def above(self, p) -> tuple:
        return self._up[p]

    def compatible(self, a, b) -> bool:
        return any(self.le(r, b) for r in self._down[a])

    def sort(self, items: Iterable) -> list:
        return sorted(items, key=self._index.__getitem__)


def validate_poset(pairs: Iterable[tuple], elements: Iterable[Hashable], top: Hashable, *, sort: bool = True) -> Poset:
    """Close ``pairs`` reflexively and transitively and check the result.

    Raises CycleError when two distinct elements end up below each other and
    TopError when some element is not below ``top``.
    """
    elems = list(dict.fromkeys(elements))
    if not elems:
        raise TopError("poset needs at least one element")
    if top not in elems:
        raise TopError(f"top {top!r} is not an element")
    if sort:
        elems.sort()
    known = set(elems)
    succ: dict = {p: {p} for p in elems}
    for a, b in pairs:
        if a not in known or b not in known:
            missing = a if a not in known else b
            raise UnknownCondition(f"order pair mentions unknown element {missing!r}", condition=missing)
        succ[a].add(b)
    # Warshall closure over the successor sets
    for k in elems:
        for i in elems:
            if k in succ[i]:
                succ[i] |= succ[k]
    for a in elems:
        for b in succ[a]:
            if a != b and a in succ[b]:
                raise CycleError(f"{a!r} and {b!r} are below each other", a=a, b=b)
    for a in elems:
        if top not in succ[a]:
            raise TopError(f"{a!r} is not below top {top!r}", element=a)
    return Poset(elems, ((a, b) for a in elems for b in succ[a]), top)


def is_dense(D: Iterable, P: Poset) -> bool:
    D = set(D)
    return all(any(q in D for q in P.below(p)) for p in P.elements)


def dense_below(D, p, P: Poset) -> bool:
    """Every extension of ``p`` has an extension in ``D``."""
    return all(any(r in D for r in P.below(q)) for q in P.below(p))


def minimal_elements(P: Poset) -> list:
    return [p for p in P.elements if len(P.below(p)) == 1]


def upward_closure(p, P: Poset) -> Filter:
    return frozenset(P.above(p))


def is_filter(F: Iterable, P: Poset) -> bool:
    F = set(F)
    if not F:
        return False
    for p in F:
        if any(q not in F for q in P.above(p)):
            return False
    for p in F:
        for q in F:
            if not any(r in F and P.le(r, q) for r in P.below(p)):
                return False
    return True


def meets_every_dense(F: Iterable, P: Poset, cap: int = 12) -> bool:
    """Brute force over all dense subsets; small posets only."""
    F = set(F)
    return all(F & D for D in all_dense_subsets(P, cap))


def all_generic_filters(P: Poset) -> list[Filter]:
    """Filters meeting every dense subset of P: one per minimal element."""
    return [upward_closure(m, P) for m in minimal_elements(P)]


def all_dense_subsets(P: Poset, cap: int = 12) -> list[frozenset]:
    if len(P) > cap:
        raise SizeCapExceeded(f"dense-subset enumeration needs |P| <= {cap}, got {len(P)}", size=len(P), cap=cap)
    out = []
    for k in range(len(P) + 1):
        for combo in combinations(P.elements, k):
            if is_dense(combo, P):
                out.append(frozenset(combo))
    return out
