"""Exhaustive verification of the realizability results on finite instances.

Every check returns a :class:`CheckResult`; failing entries carry a concrete
counterexample (a filter, a supercondition or a name pair) as plain JSON data.
"""

from __future__ import annotations

import json
import random
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import Any

from . import sigma as sg
from .errors import NotGeneric, ParamError, SizeCapExceeded, StartNotInSigma, XMismatch
from .forcing import Relation, semantic_forces, semantic_forces_negation
from .kernel import Filter, all_dense_subsets, all_generic_filters, is_filter, meets_every_dense, minimal_elements, upward_closure
from .names import HFSet, check_name, format_hf, interpret, is_transitive, transitive_sets
from .sigma import Strategy, Supercondition

PASS, FAIL = "pass", "fail"


@dataclass(frozen=True)
class CheckResult:
    id: str
    status: str
    counterexample: Any = None

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.id, "status": self.status, "counterexample": self.counterexample}


@dataclass
class Report:
    checks: list[CheckResult] = field(default_factory=list)
    digest: str = ""

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.ok]

    def to_dict(self) -> dict[str, Any]:
        return {"checks": [c.to_dict() for c in self.checks], "digest": self.digest}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            line = f"{c.status.upper():4} {c.id}"
            if c.counterexample is not None:
                line += " " + json.dumps(c.counterexample, sort_keys=True, ensure_ascii=False)
            out.append(line)
        out.append(f"digest {self.digest}")
        return out


def _entry(check_id: str, counterexample=None) -> CheckResult:
    return CheckResult(check_id, PASS if counterexample is None else FAIL, counterexample)


def _filter_data(G: Iterable) -> list:
    return sorted(G)


def _sc_data(sc: Supercondition, instance) -> str:
    return sg.render_sc(sc, instance)


def _gamma_data(gamma: Iterable[Supercondition], instance) -> list[str]:
    return [_sc_data(sc, instance) for sc in sg.sort_superconditions(gamma, instance.poset)]


# -- Σ+ as a forcing --------------------------------------------------------

def is_generic_over_sigma(gamma: Iterable[Supercondition], instance) -> bool:
    """Γ is a filter of Σ+ meeting every dense subset of Σ+.

    Small Σ+ is checked by brute force over all dense subsets; larger ones by
    the finite characterisation (the closure of a minimal element).
    """
    gamma = frozenset(gamma)
    plus, _ = sg.sigma_plus(instance)
    if not gamma or not gamma <= plus:
        return False
    if len(plus) <= instance.caps.dense:
        Q = sg.sc_poset(plus, instance.poset)
        return is_filter(gamma, Q) and meets_every_dense(gamma, Q, instance.caps.dense)
    return gamma in sg.generic_sets(plus, instance.poset)


def _dense_sets(instance) -> list[frozenset]:
    """All dense subsets of P when affordable, else the minimal-element one."""
    P = instance.poset
    if len(P) <= instance.caps.dense:
        return all_dense_subsets(P, instance.caps.dense)
    return [frozenset(minimal_elements(P))]


# -- checks -----------------------------------------------------------------

def check_sf(instance) -> CheckResult:
    """Realizability by a generic filter ⇔ Σ+ ≠ ∅ ⇔ stage λ̄ is a non-empty fixed point."""
    witnesses = instance.realizing_generics()
    plus, _ = sg.sigma_plus(instance)
    bound = sg.lambda_bar(instance)
    stages = sg.sigma_stages(instance, bound + 1)
    third = stages[bound] == stages[bound + 1] and bool(stages[bound])
    first, second = bool(witnesses), bool(plus)
    if first == second == third:
        return _entry("realizability")
    return _entry("realizability", {
        "realizing_generic": _filter_data(witnesses[0]) if witnesses else None,
        "sigma_plus_nonempty": second,
        "stage_at_bound_nonempty_fixed": third,
        "lambda_bar": bound,
    })


def check_tmain_ss2(instance, G: Filter) -> CheckResult:
    G = frozenset(G)
    if interpret(instance.root, G) != instance.X:
        raise XMismatch(f"t[G] differs from X for G = {sorted(G)}", generic=sorted(G))
    gplus = sg.g_plus(G, instance)
    cid = f"correspondence.forward[G={','.join(_filter_data(G))}]"
    if not is_generic_over_sigma(gplus, instance):
        return _entry(cid, {"generic": _filter_data(G), "g_plus": _gamma_data(gplus, instance),
                            "reason": "G+ is not generic over Σ+"})
    if sg.projection(gplus) != G:
        return _entry(cid, {"generic": _filter_data(G), "projection": sorted(sg.projection(gplus))})
    return _entry(cid)


def check_tmain_ss4(instance, gamma: Iterable[Supercondition]) -> CheckResult:
    gamma = frozenset(gamma)
    if not is_generic_over_sigma(gamma, instance):
        raise NotGeneric("Γ is not a generic subset of Σ+", gamma=_gamma_data(gamma, instance))
    H = sg.projection(gamma)
    cid = f"correspondence.backward[H={','.join(_filter_data(H))}]"
    data = {"gamma": _gamma_data(gamma, instance), "H": _filter_data(H)}
    if H not in all_generic_filters(instance.poset):
        return _entry(cid, {**data, "reason": "H is not generic over P"})
    if interpret(instance.root, H) != instance.X:
        return _entry(cid, {**data, "reason": "t[H] differs from X"})
    if sg.union_assignment(gamma) != sg.a_of_G(H, instance.root):
        return _entry(cid, {**data, "reason": "a[Γ] differs from a[H]"})
    return _entry(cid)


def check_ss3(instance) -> CheckResult:
    """G ↦ G+ and Γ ↦ prj Γ are mutually inverse between the realizing
    generic filters of P and the generic subsets of Σ+."""
    plus, _ = sg.sigma_plus(instance)
    realizing = instance.realizing_generics()
    gammas = sg.generic_sets(plus, instance.poset)
    for G in realizing:
        gplus = sg.g_plus(G, instance)
        if gplus not in gammas or sg.projection(gplus) != G:
            return _entry("correspondence.bijection", {"generic": _filter_data(G)})
    for gamma in gammas:
        H = sg.projection(gamma)
        if H not in realizing or sg.g_plus(H, instance) != gamma:
            return _entry("correspondence.bijection", {"gamma": _gamma_data(gamma, instance)})
    if len(realizing) != len(gammas):
        return _entry("correspondence.bijection", {"realizing": len(realizing), "generic_sets": len(gammas)})
    return _entry("correspondence.bijection")


def check_correspondence(instance) -> list[CheckResult]:
    out = [check_tmain_ss2(instance, G) for G in instance.realizing_generics()]
    plus, _ = sg.sigma_plus(instance)
    out += [check_tmain_ss4(instance, gamma) for gamma in sg.generic_sets(plus, instance.poset)]
    out.append(check_ss3(instance))
    return out


def build_generic(instance, start: Supercondition, seed: int | None = None) -> tuple[Filter, sg.Assignment]:
    """Extend ``start`` through Σ+ until every demand is met.

    Demands are processed round-robin: the dense set of minimal conditions,
    then each (name, element) pair in canonical order. With ``seed`` the
    witness at each step is drawn at random; otherwise the first is taken.
    """
    plus, _ = sg.sigma_plus(instance)
    if start not in plus:
        raise StartNotInSigma(f"{sg.render_sc(start, instance)} is not in Σ+")
    P, F, t = instance.poset, instance.forcing, instance.root
    rng = random.Random(seed) if seed is not None else None
    mins = set(minimal_elements(P))
    # every witness sits on a minimal condition, so only those are searched
    ordered = sg.sort_superconditions((w for w in plus if w.condition in mins), P)
    demands = sg._demands(instance)

    def pick(cands):
        if not cands:
            raise AssertionError("no extending witness in Σ+")
        return rng.choice(cands) if rng else cands[0]

    def settled(chain_end) -> bool:
        a = chain_end.assignment
        return all(s in a.dom or F.neg_mem(chain_end.condition, s, t) for s in instance.pe) \
            and a.ran == frozenset(instance.X) and chain_end.condition in mins

    current = start
    for _round in range(len(demands) + 2):
        if settled(current):
            break
        current = pick([w for w in ordered if sg.sc_leq(w, current, P)])
        for s, x in demands:
            below = [w for w in ordered if sg.sc_leq(w, current, P)]
            current = pick([
                w for w in below
                if (x is None or x in w.assignment.ran)
                and (s is None or s in w.assignment.dom or F.neg_mem(w.condition, s, t))
            ])
    G = upward_closure(current.condition, P)
    phi = current.assignment
    if interpret(t, G) != instance.X or start.condition not in G or not phi.ran == frozenset(instance.X):
        raise AssertionError("constructed filter does not realize X")
    return G, phi


def check_builder(instance, seed: int | None = None) -> CheckResult:
    plus, _ = sg.sigma_plus(instance)
    for sc in sg.sort_superconditions(plus, instance.poset):
        G, _phi = build_generic(instance, sc, seed)
        if not (sc.condition in G and interpret(instance.root, G) == instance.X
                and sc.assignment <= sg.a_of_G(G, instance.root)):
            return _entry("builder", {"start": _sc_data(sc, instance), "generic": _filter_data(G)})
    return _entry("builder")


# -- Borel-style dual evaluation ------------------------------------------

def accepts_existential(instance) -> bool:
    """Some stabilising trace ends in a non-empty fixed point."""
    plus, _ = sg.sigma_plus(instance, Strategy.MINIMAL_REDUCTION)
    return bool(plus)


def _naive_step(current: frozenset, instance, dense_sets) -> frozenset:
    """Direct transcription of the successor clause, no caching or indexing."""
    P, F, t = instance.poset, instance.forcing, instance.root
    names = list(instance.pe) or [None]
    xs = list(instance.X) or [None]
    keep = set()
    for sc in current:
        if all(
            any(
                sg.sc_leq(w, sc, P) and w.condition in D
                and (x is None or x in w.assignment.ran)
                and (s is None or s in w.assignment.dom or F.neg_mem(w.condition, s, t))
                for w in current
            )
            for D in dense_sets for s in names for x in xs
        ):
            keep.add(sc)
    return frozenset(keep)


def accepts_universal(instance) -> bool:
    """Every stage index at which the sequence repeats carries a non-empty stage.

    Evaluated independently of :func:`accepts_existential`: stages come from a
    literal transcription of the successor clause, quantifying over all dense
    subsets when P is small enough. Once the sequence repeats it is constant,
    so later indices need no separate evaluation.
    """
    dense = _dense_sets(instance)
    stage = sg.sigma0(instance)
    for _ in range(len(sg.enumerate_superconditions(instance)) + 1):
        nxt = _naive_step(stage, instance, dense)
        if nxt == stage:
            return bool(stage)
        stage = nxt
    raise AssertionError("stages failed to stabilise within |P+| steps")


def accepts_brute_force(instance) -> bool:
    return bool(instance.realizing_generics())


def accepted_values(family: Iterable) -> list[HFSet]:
    return [inst.X for inst in family if accepts_brute_force(inst)]


def check_zapt(family: Iterable) -> Report:
    family = list(family)
    checks = []
    for inst in family:
        a, b, brute = accepts_existential(inst), accepts_universal(inst), accepts_brute_force(inst)
        cid = f"dual-evaluation[X={format_hf(inst.X)}]"
        checks.append(_entry(cid) if a == b == brute else
                      _entry(cid, {"existential": a, "universal": b, "brute_force": brute}))
    digest = family[0].digest() if family else ""
    return Report(checks, digest)


def rank_bounded_family(instance, rank_bound: int = 3) -> list:
    """The instance's (P, t) against every transitive X of bounded rank."""
    return [instance.with_x(X) for X in transitive_sets(rank_bound, instance.caps.x)]


# -- invariant suite --------------------------------------------------------

def _truth_oracle(instance) -> CheckResult:
    P, F = instance.poset, instance.forcing
    names = instance.all_names()
    for p in P.elements:
        for s in names:
            for s2 in names:
                for rel in Relation:
                    if F.forces(p, rel, s, s2) != semantic_forces(P, p, rel, s, s2):
                        return _entry("forcing.semantic-agreement", {"p": p, "rel": rel.value,
                                                              "s": instance.label(s), "s2": instance.label(s2)})
                    if F.forces_negation(p, rel, s, s2) != semantic_forces_negation(P, p, rel, s, s2):
                        return _entry("forcing.semantic-negation", {
                            "p": p, "rel": rel.value, "s": instance.label(s), "s2": instance.label(s2)})
                    if F.forces(p, rel, s, s2) and F.forces_negation(p, rel, s, s2):
                        return _entry("forcing.never-both", {"p": p, "s": instance.label(s)})
    return _entry("forcing.semantic-agreement")


def _monotone(instance) -> CheckResult:
    P, F = instance.poset, instance.forcing
    names = instance.all_names()
    for p in P.elements:
        for s in names:
            for s2 in names:
                for rel in Relation:
                    pos, neg = F.forces(p, rel, s, s2), F.forces_negation(p, rel, s, s2)
                    for q in P.below(p):
                        if (pos and not F.forces(q, rel, s, s2)) or (neg and not F.forces_negation(q, rel, s, s2)):
                            return _entry("forcing.monotone", {"p": p, "q": q, "rel": rel.value,
                                                               "s": instance.label(s), "s2": instance.label(s2)})
    return _entry("forcing.monotone")


def _display(instance) -> CheckResult:
    F, t = instance.forcing, instance.root
    for G in instance.generics:
        shown = {interpret(s, G) for s in instance.pe if any(F.mem(p, s, t) for p in G)}
        if HFSet(shown) != interpret(t, G):
            return _entry("names.display", {"generic": _filter_data(G)})
    return _entry("names.display")


def _downward_closed(instance) -> CheckResult:
    plus = sg.enumerate_superconditions(instance)
    for sc in plus:
        for q in instance.poset.below(sc.condition):
            if Supercondition(q, sc.assignment) not in plus:
                return _entry("sigma.downward-closed", {"supercondition": _sc_data(sc, instance), "q": q})
    return _entry("sigma.downward-closed")


def _chain(instance) -> CheckResult:
    plus, trace = sg.sigma_plus(instance)
    stages = [sg.enumerate_superconditions(instance)] + trace.stages
    for before, after in zip(stages, stages[1:]):
        if not after <= before:
            return _entry("sigma.antitone", {"extra": _gamma_data(after - before, instance)})
    if sg.sigma_step(trace.fixed_point, instance) != trace.fixed_point:
        return _entry("sigma.antitone", {"reason": "last stage is not a fixed point"})
    if trace.lam > len(stages[0]):
        return _entry("sigma.antitone", {"lambda": trace.lam})
    return _entry("sigma.antitone")


def _extension_witnesses(instance) -> CheckResult:
    """Witnesses inside Σ+ for every dense D, name s and element x."""
    plus, _ = sg.sigma_plus(instance)
    P, F, t = instance.poset, instance.forcing, instance.root
    dense = _dense_sets(instance)
    for sc in sg.sort_superconditions(plus, P):
        below = [w for w in plus if sg.sc_leq(w, sc, P)]
        for D in dense:
            for s, x in sg._demands(instance):
                if not any(
                    w.condition in D
                    and (x is None or x in w.assignment.ran)
                    and (s is None or s in w.assignment.dom or F.neg_mem(w.condition, s, t))
                    for w in below
                ):
                    return _entry("sigma.extension-witness", {"supercondition": _sc_data(sc, instance), "dense": sorted(D),
                                          "s": None if s is None else instance.label(s),
                                          "x": None if x is None else format_hf(x)})
    return _entry("sigma.extension-witness")


def _weakening(instance) -> list[CheckResult]:
    plus, _ = sg.sigma_plus(instance)
    zero = sg.sigma0(instance)
    P = instance.poset
    outside = zero - plus
    first = _entry("sigma.weakening")
    for w in sg.sort_superconditions(outside, P):
        for sc in plus:
            if sg.sc_leq(sc, w, P):
                first = _entry("sigma.weakening", {"strong": _sc_data(sc, instance), "weak": _sc_data(w, instance)})
                break
        if not first.ok:
            break
    second = _entry("sigma.condition-weakening")
    all_plus = sg.enumerate_superconditions(instance)
    for sc in sg.sort_superconditions(plus, P):
        for q in P.above(sc.condition):
            weak = Supercondition(q, sc.assignment)
            if weak in all_plus and weak not in plus:
                second = _entry("sigma.condition-weakening", {"strong": _sc_data(sc, instance), "q": q})
                break
        if not second.ok:
            break
    return [first, second]


def _realizers_inside(instance) -> CheckResult:
    plus, _ = sg.sigma_plus(instance)
    for G in instance.realizing_generics():
        canonical = sg.a_of_G(G, instance.root)
        for sc in sg.enumerate_superconditions(instance):
            if sc.condition in G and sc.assignment <= canonical and sc not in plus:
                return _entry("sigma.realizer-inside", {"generic": _filter_data(G), "supercondition": _sc_data(sc, instance)})
    return _entry("sigma.realizer-inside")


def _assignment_range(instance) -> CheckResult:
    for G in instance.generics:
        if HFSet(sg.a_of_G(G, instance.root).ran) != interpret(instance.root, G):
            return _entry("sigma.assignment-range", {"generic": _filter_data(G)})
    return _entry("sigma.assignment-range")


def _stage_bound(instance) -> CheckResult:
    bound = sg.lambda_bar(instance)
    for G in instance.generics:
        lam = sg.sigma_plus(instance.variant(interpret(instance.root, G)))[1].lam
        if not lam < bound:
            return _entry("sigma.stage-bound", {"generic": _filter_data(G), "lambda": lam, "lambda_bar": bound})
    return _entry("sigma.stage-bound")


def _strategies(instance) -> CheckResult:
    try:
        exhaustive, _ = sg.sigma_plus(instance, Strategy.EXHAUSTIVE_DENSE)
    except SizeCapExceeded:
        return _entry("sigma.strategy-equivalence")
    minimal, _ = sg.sigma_plus(instance, Strategy.MINIMAL_REDUCTION)
    if exhaustive != minimal:
        return _entry("sigma.strategy-equivalence", {"difference": _gamma_data(exhaustive ^ minimal, instance)})
    return _entry("sigma.strategy-equivalence")


def _check_names(instance) -> CheckResult:
    for x in [instance.X, *sorted(instance.X, key=format_hf)]:
        xc = check_name(x, instance.poset)
        for G in instance.generics:
            if interpret(xc, G) != x:
                return _entry("names.check-interpretation", {"x": format_hf(x), "generic": _filter_data(G)})
    return _entry("names.check-interpretation")


def _transitive_values(instance) -> CheckResult:
    if not is_transitive(instance.X):
        return _entry("instance.transitive", {"X": format_hf(instance.X)})
    for G in instance.generics:
        if not is_transitive(interpret(instance.root, G)):
            return _entry("instance.transitive", {"generic": _filter_data(G)})
    return _entry("instance.transitive")


def check_properties(instance) -> Report:
    checks = [
        _transitive_values(instance),
        _check_names(instance),
        _display(instance),
        _truth_oracle(instance),
        _monotone(instance),
        _downward_closed(instance),
        _chain(instance),
        _strategies(instance),
        _extension_witnesses(instance),
        *_weakening(instance),
        _realizers_inside(instance),
        _assignment_range(instance),
        _stage_bound(instance),
    ]
    return Report(checks, instance.digest())


SUITES = ("all", "sf", "tmain", "props", "zapt")


def run_suite(instance, suite: str = "all", family_rank: int = 3) -> Report:
    if suite not in SUITES:
        raise ParamError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    checks: list[CheckResult] = []
    if suite in ("all", "sf"):
        checks.append(check_sf(instance))
    if suite in ("all", "tmain"):
        checks += check_correspondence(instance)
        checks.append(check_builder(instance))
    if suite in ("all", "props"):
        checks += check_properties(instance).checks
    if suite in ("all", "zapt"):
        checks += check_zapt(rank_bounded_family(instance, family_rank)).checks
    return Report(checks, instance.digest())


__all__ = [
    "CheckResult",
    "Report",
    "build_generic",
    "check_builder",
    "check_properties",
    "check_sf",
    "check_ss3",
    "check_correspondence",
    "check_tmain_ss2",
    "check_tmain_ss4",
    "check_zapt",
    "is_generic_over_sigma",
    "run_suite",
    "accepted_values",
    "rank_bounded_family",
]
