"""Atomic forcing over a finite poset.

Two independent routes are provided:

* :class:`ForcingRelation` evaluates ``p ⊩ s ∈ t`` and ``p ⊩ s = t`` by the
  usual mutual recursion on name rank, with density below ``p``;
* :func:`semantic_forces` quantifies over all generic filters containing ``p``.

The tests assert the two agree on every instance.
"""

from __future__ import annotations

import enum
import threading
from collections.abc import Iterable
from functools import lru_cache

from .kernel import Poset, all_generic_filters, dense_below
from .names import PName, interpret


class Relation(str, enum.Enum):
    MEM = "mem"
    EQ = "eq"


class Decision(str, enum.Enum):
    FORCES = "forces"
    FORCES_NEGATION = "forces-negation"
    UNDECIDED = "undecided"


class ForcingRelation:
    """Memoised recursive forcing for one poset.

    The memo only ever stores values that are pure functions of their key, so
    concurrent callers see the same answers as isolated evaluation; the lock
    merely keeps dict updates tidy.
    """

    def __init__(self, poset: Poset):
        self.poset = poset
        self._mem: dict = {}
        self._eq: dict = {}
        self._lock = threading.RLock()

    def mem(self, p, s: PName, t: PName) -> bool:
        key = (p, s, t)
        hit = self._mem.get(key)
        if hit is not None:
            return hit
        P = self.poset
        good = {
            q for q in P.below(p)
            if any(P.le(q, r) and self.eq(q, s, u) for u, r in t)
        }
        result = dense_below(good, p, P)
        with self._lock:
            self._mem[key] = result
        return result

    def eq(self, p, s: PName, s2: PName) -> bool:
        key = (p, s, s2)
        hit = self._eq.get(key)
        if hit is not None:
            return hit
        result = self._included(p, s, s2) and self._included(p, s2, s)
        with self._lock:
            self._eq[key] = result
            self._eq[(p, s2, s)] = result
        return result

    def _included(self, p, s: PName, s2: PName) -> bool:
        P = self.poset
        for u, r in s:
            for q in P.below(p):
                if P.le(q, r) and not self.mem(q, u, s2):
                    return False
        return True

    def forces(self, p, rel: Relation | str, s: PName, s2: PName) -> bool:
        rel = Relation(rel)
        return self.mem(p, s, s2) if rel is Relation.MEM else self.eq(p, s, s2)

    def neg_mem(self, p, s: PName, t: PName) -> bool:
        return not any(self.mem(q, s, t) for q in self.poset.below(p))

    def neg_eq(self, p, s: PName, s2: PName) -> bool:
        return not any(self.eq(q, s, s2) for q in self.poset.below(p))

    def forces_negation(self, p, rel: Relation | str, s: PName, s2: PName) -> bool:
        rel = Relation(rel)
        return self.neg_mem(p, s, s2) if rel is Relation.MEM else self.neg_eq(p, s, s2)

    def decides(self, p, rel: Relation | str, s: PName, s2: PName) -> Decision:
        if self.forces(p, rel, s, s2):
            return Decision.FORCES
        if self.forces_negation(p, rel, s, s2):
            return Decision.FORCES_NEGATION
        return Decision.UNDECIDED

    def is_d_complete(self, p, d: Iterable[PName], t: PName) -> bool:
        d = list(d)
        if not all(self.mem(p, s, t) for s in d):
            return False
        for s in d:
            for s2 in d:
                for rel in Relation:
                    if self.decides(p, rel, s, s2) is Decision.UNDECIDED:
                        return False
        return True


@lru_cache(maxsize=64)
def forcing_for(poset: Poset) -> ForcingRelation:
    """Shared relation per poset, so the memo is scoped to that poset."""
    return ForcingRelation(poset)


def forces_mem(P: Poset, p, s: PName, t: PName) -> bool:
    return forcing_for(P).mem(p, s, t)


def forces_eq(P: Poset, p, s: PName, s2: PName) -> bool:
    return forcing_for(P).eq(p, s, s2)


def forces_neg_mem(P: Poset, p, s: PName, t: PName) -> bool:
    return forcing_for(P).neg_mem(p, s, t)


def forces_neg_eq(P: Poset, p, s: PName, s2: PName) -> bool:
    return forcing_for(P).neg_eq(p, s, s2)


def decides(P: Poset, p, rel: Relation | str, s: PName, s2: PName) -> Decision:
    return forcing_for(P).decides(p, rel, s, s2)


def is_d_complete(P: Poset, p, d: Iterable[PName], t: PName) -> bool:
    return forcing_for(P).is_d_complete(p, d, t)


def _holds(rel: Relation, s: PName, s2: PName, G) -> bool:
    a, b = interpret(s, G), interpret(s2, G)
    return a in b if rel is Relation.MEM else a == b


def semantic_forces(P: Poset, p, rel: Relation | str, s: PName, s2: PName) -> bool:
    """Truth in every generic extension by a filter containing p."""
    rel = Relation(rel)
    return all(_holds(rel, s, s2, G) for G in all_generic_filters(P) if p in G)


def semantic_forces_negation(P: Poset, p, rel: Relation | str, s: PName, s2: PName) -> bool:
    rel = Relation(rel)
    return not any(_holds(rel, s, s2, G) for G in all_generic_filters(P) if p in G)
