"""Superconditions and the decreasing hierarchy of their sets.

A supercondition is a pair ``(p, a)`` where ``a`` is a finite assignment of
elements of X to potential elements of the root name t, and p is complete for
``dom a``. Stage 0 keeps the superconditions whose assignment mirrors what p
forces about membership and equality; each later stage keeps those which can
be extended, inside the previous stage, to meet any dense set while putting
any given x in the range and settling any given potential element. The fixed
point is non-empty exactly when some generic G has t[G] = X.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import NamedTuple

from .errors import IncompatibleAssignments, SizeCapExceeded, XMismatch
from .forcing import Relation
from .kernel import Filter, Poset, all_dense_subsets, minimal_elements
from .names import HFSet, PName, check_value, format_hf, hf_key, interpret, name_key


class Strategy(str, enum.Enum):
    MINIMAL_REDUCTION = "minimal-reduction"
    EXHAUSTIVE_DENSE = "exhaustive-dense"


class Assignment(frozenset):
    """A finite partial map from names to HF sets, stored as its graph.

    Extension of maps is inclusion of graphs, so ``b >= a`` reads "b extends a".
    """

    __slots__ = ()

    @classmethod
    def of(cls, mapping: Mapping[PName, HFSet] | Iterable[tuple[PName, HFSet]] = ()) -> Assignment:
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        return cls(items)

    @property
    def dom(self) -> frozenset:
        return frozenset(s for s, _ in self)

    @property
    def ran(self) -> frozenset:
        return frozenset(v for _, v in self)

    def as_dict(self) -> dict[PName, HFSet]:
        return dict(self)

    def is_function(self) -> bool:
        return len(self.dom) == len(self)

    def __repr__(self) -> str:
        inner = ", ".join(f"{s!r}: {v}" for s, v in sorted(self, key=lambda kv: name_key(kv[0])))
        return f"Assignment({{{inner}}})"


EMPTY_ASSIGNMENT = Assignment()


class Supercondition(NamedTuple):
    condition: object
    assignment: Assignment


def sc_sort_key(poset: Poset):
    index = {p: i for i, p in enumerate(poset.elements)}

    def key(sc: Supercondition):
        pairs = sorted((name_key(s), hf_key(v)) for s, v in sc.assignment)
        return index[sc.condition], len(pairs), pairs

    return key


def sort_superconditions(items: Iterable[Supercondition], poset: Poset) -> list[Supercondition]:
    return sorted(items, key=sc_sort_key(poset))


def render_assignment(a: Assignment, instance) -> str:
    parts = sorted((instance.label(s), format_hf(v)) for s, v in a)
    return "{" + ",".join(f"{k}:{v}" for k, v in parts) + "}"


def render_sc(sc: Supercondition, instance) -> str:
    return f"({sc.condition}, {render_assignment(sc.assignment, instance)})"


def sc_leq(sc1: Supercondition, sc2: Supercondition, poset: Poset) -> bool:
    """``sc1`` is stronger: smaller condition and an extending assignment."""
    return poset.le(sc1.condition, sc2.condition) and sc2.assignment <= sc1.assignment


# -- P+ and stage 0 ---------------------------------------------------------

def _value_choices(s: PName, instance) -> list[HFSet]:
    fixed = check_value(s, instance.poset)
    if fixed is not None:
        return [fixed] if fixed in instance.X else []
    return sorted(instance.X, key=hf_key)


def _complete_domains(p, pe: list[PName], t: PName, F) -> list[tuple]:
    """Subsets d of pe (as sorted tuples) for which p is d-complete."""
    found: list[tuple] = [()]
    layer: set = {()}
    for size in range(1, len(pe) + 1):
        # completeness passes to subsets, so only grow complete domains
        nxt = set()
        for d in combinations(pe, size):
            if all(d[:i] + d[i + 1:] in layer for i in range(size)) and F.is_d_complete(p, d, t):
                nxt.add(d)
        if not nxt:
            break
        found.extend(sorted(nxt, key=lambda d: [pe.index(s) for s in d]))
        layer = nxt
    return found


def enumerate_superconditions(instance) -> frozenset:
    """All superconditions over ``instance`` (cached on the instance)."""
    cached = instance.memo.get("plus")
    if cached is not None:
        return cached
    P, t, F = instance.poset, instance.root, instance.forcing
    pe = instance.pe
    cap = instance.caps.superconditions
    choices = {s: _value_choices(s, instance) for s in pe}
    out = []
    for p in P.elements:
        complete_doms = _complete_domains(p, pe, t, F)
        for d in complete_doms:
            for values in product(*(choices[s] for s in d)):
                out.append(Supercondition(p, Assignment(zip(d, values))))
                if len(out) > cap:
                    raise SizeCapExceeded(f"|P+| exceeds cap {cap}", cap=cap)
    result = frozenset(out)
    instance.memo["plus"] = result
    return result


def _mirrors(sc: Supercondition, instance) -> bool:
    F, p = instance.forcing, sc.condition
    a = sc.assignment.as_dict()
    for s, v in a.items():
        for s2, v2 in a.items():
            if F.mem(p, s, s2) != (v in v2):
                return False
            if F.eq(p, s, s2) != (v == v2):
                return False
    return True


def sigma0(instance) -> frozenset:
    cached = instance.memo.get("sigma0")
    if cached is None:
        cached = frozenset(sc for sc in enumerate_superconditions(instance) if _mirrors(sc, instance))
        instance.memo["sigma0"] = cached
    return cached


# -- successor stages -------------------------------------------------------

def _demands(instance) -> list[tuple]:
    # An empty quantifier range is replaced by a single unconstrained slot so
    # that the other half of the demand is still imposed.
    names = list(instance.pe) or [None]
    xs = sorted(instance.X, key=hf_key) or [None]
    return list(product(names, xs))


def _satisfied(w: Supercondition, demands, instance) -> frozenset:
    F, t = instance.forcing, instance.root
    dom, ran = w.assignment.dom, w.assignment.ran
    out = []
    for s, x in demands:
        if x is not None and x not in ran:
            continue
        if s is None or s in dom or F.neg_mem(w.condition, s, t):
            out.append((s, x))
    return frozenset(out)


def sigma_step(current: Iterable[Supercondition], instance,
               strategy: Strategy | str = Strategy.MINIMAL_REDUCTION) -> frozenset:
    """One successor stage computed from ``current`` only."""
    strategy = Strategy(strategy)
    current = frozenset(current)
    if not current:
        return current
    P = instance.poset
    demands = _demands(instance)
    need = frozenset(demands)
    if strategy is Strategy.MINIMAL_REDUCTION:
        dense_sets = [frozenset(minimal_elements(P))]
    else:
        dense_sets = all_dense_subsets(P, instance.caps.dense)
    by_cond: dict = defaultdict(list)
    for w in current:
        by_cond[w.condition].append(w)
    sat_cache: dict = {}

    def sat(w):
        hit = sat_cache.get(w)
        if hit is None:
            hit = sat_cache[w] = _satisfied(w, demands, instance)
        return hit

    keep = []
    for sc in current:
        ok = True
        for D in dense_sets:
            covered: set = set()
            for q in P.below(sc.condition):
                if q not in D:
                    continue
                for w in by_cond.get(q, ()):
                    if sc.assignment <= w.assignment:
                        covered |= sat(w)
            if not need <= covered:
                ok = False
                break
        if ok:
            keep.append(sc)
    return frozenset(keep)


@dataclass
class SigmaTrace:
    """Stages Σ^0 ⊇ Σ^1 ⊇ ... ⊇ Σ^λ with Σ^λ = Σ^(λ+1)."""

    stages: list[frozenset]
    plus: frozenset = field(default=frozenset(), repr=False)

    @property
    def lam(self) -> int:
        return len(self.stages) - 1

    @property
    def fixed_point(self) -> frozenset:
        return self.stages[-1]

    def removed(self, gamma: int) -> frozenset:
        before = self.plus if gamma == 0 else self.stages[gamma - 1]
        return before - self.stages[gamma]

    def lines(self, instance) -> list[str]:
        out = []
        for gamma, stage in enumerate(self.stages):
            gone = sort_superconditions(self.removed(gamma), instance.poset)
            rendered = ",".join(render_sc(sc, instance) for sc in gone)
            out.append(f"gamma={gamma} size={len(stage)} removed=[{rendered}]")
        return out


def sigma_stages(instance, steps: int, strategy: Strategy | str = Strategy.MINIMAL_REDUCTION) -> list[frozenset]:
    """Σ^0 .. Σ^steps without stopping at the fixed point."""
    stages = [sigma0(instance)]
    for _ in range(steps):
        stages.append(sigma_step(stages[-1], instance, strategy))
    return stages


def sigma_plus(instance, strategy: Strategy | str = Strategy.MINIMAL_REDUCTION) -> tuple[frozenset, SigmaTrace]:
    """Iterate to the fixed point; returns (Σ+, trace). Cached per strategy."""
    strategy = Strategy(strategy)
    key = ("sigma_plus", strategy)
    cached = instance.memo.get(key)
    if cached is not None:
        return cached
    stages = [sigma0(instance)]
    while True:
        nxt = sigma_step(stages[-1], instance, strategy)
        if nxt == stages[-1]:
            break
        stages.append(nxt)
    trace = SigmaTrace(stages, enumerate_superconditions(instance))
    result = (stages[-1], trace)
    instance.memo[key] = result
    return result


# -- projections and assignments -------------------------------------------

def projection(gamma: Iterable[Supercondition]) -> frozenset:
    return frozenset(sc.condition for sc in gamma)


def assignments(gamma: Iterable[Supercondition]) -> frozenset:
    return frozenset(sc.assignment for sc in gamma)


def union_assignment(gamma: Iterable[Supercondition]) -> Assignment:
    merged: dict[PName, HFSet] = {}
    for a in assignments(gamma):
        for s, v in a:
            if merged.setdefault(s, v) != v:
                raise IncompatibleAssignments(
                    f"assignments disagree on a name: {merged[s]} vs {v}", name=s)
    return Assignment.of(merged)


def a_of_G(G: Iterable, t: PName) -> Assignment:
    """``s -> s[G]`` on the potential elements of t whose value lands in t[G]."""
    G = frozenset(G)
    value = interpret(t, G)
    return Assignment((s, interpret(s, G)) for s, _ in t if interpret(s, G) in value)


def g_plus(G: Filter, instance) -> frozenset:
    G = frozenset(G)
    if interpret(instance.root, G) != instance.X:
        raise XMismatch(f"t[G] = {interpret(instance.root, G)} differs from X = {instance.X}",
                        generic=sorted(G))
    canonical = a_of_G(G, instance.root)
    plus, _ = sigma_plus(instance)
    return frozenset(sc for sc in plus if sc.condition in G and sc.assignment <= canonical)


def xi(instance) -> frozenset:
    plus, _ = sigma_plus(instance)
    return projection(plus)


def lambda_bar(instance) -> int:
    """1 + the largest stabilisation index over all values t[G]."""
    best = 0
    for G in instance.generics:
        realized = instance.variant(interpret(instance.root, G))
        best = max(best, sigma_plus(realized)[1].lam)
    return best + 1


# -- the poset of Σ+ --------------------------------------------------------

def minimal_superconditions(S: Iterable[Supercondition], poset: Poset) -> list[Supercondition]:
    S = list(S)
    by_cond: dict = defaultdict(list)
    for w in S:
        by_cond[w.condition].append(w)
    out = []
    for sc in S:
        if not any(
            w != sc and sc.assignment <= w.assignment
            for q in poset.below(sc.condition) for w in by_cond.get(q, ())
        ):
            out.append(sc)
    return sort_superconditions(out, poset)


def sc_upward_closure(sc: Supercondition, S: Iterable[Supercondition], poset: Poset) -> frozenset:
    return frozenset(w for w in S if sc_leq(sc, w, poset))


def generic_sets(S: Iterable[Supercondition], poset: Poset) -> list[frozenset]:
    """Generic subsets of the finite poset S: closures of its minimal elements."""
    S = frozenset(S)
    return [sc_upward_closure(m, S, poset) for m in minimal_superconditions(S, poset)]


def sc_poset(S: Iterable[Supercondition], poset: Poset) -> Poset:
    """S as a kernel Poset; top is the weakest element (p_top, ∅)."""
    elems = sort_superconditions(S, poset)
    top = Supercondition(poset.top, EMPTY_ASSIGNMENT)
    return Poset.from_relation(elems, lambda a, b: sc_leq(a, b, poset), top)


__all__ = [
    "Assignment",
    "Relation",
    "SigmaTrace",
    "Strategy",
    "Supercondition",
    "a_of_G",
    "assignments",
    "enumerate_superconditions",
    "g_plus",
    "generic_sets",
    "lambda_bar",
    "minimal_superconditions",
    "projection",
    "sc_leq",
    "sc_poset",
    "sigma0",
    "sigma_plus",
    "sigma_stages",
    "sigma_step",
    "union_assignment",
    "xi",
]
