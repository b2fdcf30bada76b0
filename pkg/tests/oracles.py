"""Brute-force reference implementations used to derive expected values.

Nothing here imports the package's forcing, sigma or kernel algorithms; only
the value types (HFSet, PName) and interpretation are shared.
"""

from __future__ import annotations

from itertools import chain, combinations, product

from forcing_lab.names import HFSet, PName, interpret


def powerset(items):
    items = list(items)
    return [frozenset(c) for c in chain.from_iterable(combinations(items, k) for k in range(len(items) + 1))]


class NaivePoset:
    """Order given as a set of (a, b) pairs meaning a ≤ b, closed by hand."""

    def __init__(self, elements, pairs, top):
        self.elements = list(elements)
        self.top = top
        le = {(a, a) for a in self.elements} | set(pairs)
        changed = True
        while changed:
            changed = False
            for (a, b), (c, d) in product(list(le), list(le)):
                if b == c and (a, d) not in le:
                    le.add((a, d))
                    changed = True
        self.le_pairs = le

    @classmethod
    def of(cls, poset):
        return cls(poset.elements, [(a, b) for a in poset.elements for b in poset.elements if poset.le(a, b)],
                   poset.top)

    def le(self, a, b):
        return (a, b) in self.le_pairs

    def below(self, p):
        return [q for q in self.elements if self.le(q, p)]

    def dense_sets(self):
        return [D for D in powerset(self.elements)
                if all(any(self.le(d, p) for d in D) for p in self.elements)]

    def filters(self):
        out = []
        for F in powerset(self.elements):
            if not F:
                continue
            upward = all(q in F for p in F for q in self.elements if self.le(p, q))
            directed = all(any(self.le(r, p) and self.le(r, q) for r in F) for p in F for q in F)
            if upward and directed:
                out.append(F)
        return out

    def generics(self):
        dense = self.dense_sets()
        return [F for F in self.filters() if all(F & D for D in dense)]


def sem_forces(P: NaivePoset, p, rel, s, s2):
    holds = (lambda a, b: a in b) if rel == "mem" else (lambda a, b: a == b)
    return all(holds(interpret(s, G), interpret(s2, G)) for G in P.generics() if p in G)


def sem_forces_not(P: NaivePoset, p, rel, s, s2):
    holds = (lambda a, b: a in b) if rel == "mem" else (lambda a, b: a == b)
    return not any(holds(interpret(s, G), interpret(s2, G)) for G in P.generics() if p in G)


def check_value(s: PName, top):
    """x when s is built from top-labelled entries all the way down, else None."""
    values = []
    for child, cond in s:
        if cond != top:
            return None
        v = check_value(child, top)
        if v is None:
            return None
        values.append(v)
    return HFSet(values)


def naive_plus(P: NaivePoset, t: PName, X: HFSet):
    """Every (p, a) with a a partial map pe(t) → X meeting the definition."""
    pe = sorted({s for s, _ in t}, key=repr)
    out = set()
    for p in P.elements:
        for dom in powerset(pe):
            dom = sorted(dom, key=repr)
            if not all(sem_forces(P, p, "mem", s, t) for s in dom):
                continue
            if not all(sem_forces(P, p, rel, s, s2) or sem_forces_not(P, p, rel, s, s2)
                       for s in dom for s2 in dom for rel in ("mem", "eq")):
                continue
            for values in product(sorted(X, key=repr), repeat=len(dom)):
                a = dict(zip(dom, values))
                if all(check_value(s, P.top) in (None, a[s]) for s in dom):
                    out.add((p, frozenset(a.items())))
    return out


def naive_sigma0(P, t, plus):
    keep = set()
    for p, a in plus:
        m = dict(a)
        ok = all(
            sem_forces(P, p, "mem", s, s2) == (m[s] in m[s2]) and sem_forces(P, p, "eq", s, s2) == (m[s] == m[s2])
            for s in m for s2 in m
        )
        if ok:
            keep.add((p, a))
    return keep


def naive_leq(P, w, sc):
    return P.le(w[0], sc[0]) and sc[1] <= w[1]


def naive_step(P, t, X, current):
    # an empty pe(t) or X leaves the other half of each demand in force
    pe = sorted({s for s, _ in t}, key=repr) or [None]
    xs = sorted(X, key=repr) or [None]
    dense = P.dense_sets()
    keep = set()
    for sc in current:
        good = True
        for D in dense:
            for s in pe:
                for x in xs:
                    if not any(
                        naive_leq(P, w, sc) and w[0] in D
                        and (x is None or x in {v for _, v in w[1]})
                        and (s is None or s in {k for k, _ in w[1]} or sem_forces_not(P, w[0], "mem", s, t))
                        for w in current
                    ):
                        good = False
                        break
                if not good:
                    break
            if not good:
                break
        if good:
            keep.add(sc)
    return keep


def naive_sigma(P, t, X):
    """(stages Σ⁰ … Σ^λ with Σ^λ = Σ^{λ+1}, P⁺)."""
    plus = naive_plus(P, t, X)
    stages = [naive_sigma0(P, t, plus)]
    while True:
        nxt = naive_step(P, t, X, stages[-1])
        if nxt == stages[-1]:
            return stages, plus
        stages.append(nxt)


def as_pairs(superconditions):
    return {(sc.condition, frozenset(sc.assignment)) for sc in superconditions}
