import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forcing_lab import sigma as sg
from forcing_lab import verify
from forcing_lab.errors import NotGeneric, ParamError, StartNotInSigma, XMismatch
from forcing_lab.instances import load_instance, random_instance, two_branch
from forcing_lab.names import format_hf, parse_hf
from forcing_lab.sigma import EMPTY_ASSIGNMENT, Assignment, Supercondition

X1, X2, X3 = "{{}}", "{{},{{}}}", "{{},{{}},{{{}}}}"
G0, G1 = frozenset({"p0", "top"}), frozenset({"p1", "top"})


def sc(inst, cond, **values):
    return Supercondition(cond, Assignment.of({inst.lookup(k): parse_hf(v) for k, v in values.items()}))


def symmetric():
    """T1's poset with a root that ignores the generic: both atoms realize X."""
    return load_instance({
        "conditions": ["top", "p0", "p1"], "top": "top",
        "order": [["p0", "top"], ["p1", "top"]],
        "names": {"e": [], "t": [["e", "top"]]}, "root": "t", "X": "{{}}",
    })


def test_realizability_on_t1():
    assert verify.check_sf(two_branch(X1)).ok
    assert verify.check_sf(two_branch(X3)).ok


def test_realizability_fault_injection(monkeypatch):
    inst = two_branch(X1)
    real = sg.sigma_plus
    monkeypatch.setattr(sg, "sigma_plus", lambda i, strategy=sg.Strategy.MINIMAL_REDUCTION: (frozenset(), real(i, strategy)[1]))
    result = verify.check_sf(inst)
    assert not result.ok
    assert result.counterexample["realizing_generic"] == ["p1", "top"]
    # the counterexample replays in isolation
    assert not verify.check_sf(two_branch(X1)).ok


def test_forward_correspondence():
    assert verify.check_tmain_ss2(two_branch(X1), G1).ok
    assert verify.check_tmain_ss2(two_branch(X2), G0).ok
    with pytest.raises(XMismatch):
        verify.check_tmain_ss2(two_branch(X1), G0)


def test_backward_correspondence():
    inst = two_branch(X1)
    plus, _ = sg.sigma_plus(inst)
    gamma = sg.sc_upward_closure(sc(inst, "p1", e="{}", b="{}"), plus, inst.poset)
    result = verify.check_tmain_ss4(inst, gamma)
    assert result.ok and result.id == "correspondence.backward[H=p1,top]"

    inst2 = two_branch(X2)
    plus2, _ = sg.sigma_plus(inst2)
    (gamma2,) = [g for g in sg.generic_sets(plus2, inst2.poset) if Supercondition("p0", EMPTY_ASSIGNMENT) in g]
    result = verify.check_tmain_ss4(inst2, gamma2)
    assert result.ok and result.id == "correspondence.backward[H=p0,top]"


def test_whole_sigma_is_not_generic_when_both_atoms_survive():
    inst = symmetric()
    plus, _ = sg.sigma_plus(inst)
    assert {"p0", "p1"} <= sg.projection(plus)
    with pytest.raises(NotGeneric):
        verify.check_tmain_ss4(inst, plus)


def test_bijection():
    for x in (X1, X2, X3):
        assert verify.check_ss3(two_branch(x)).ok
    assert verify.check_ss3(symmetric()).ok


def test_build_generic():
    inst = two_branch(X1)
    G, phi = verify.build_generic(inst, sc(inst, "top", b="{}"))
    assert G == G1
    assert phi == sc(inst, "p1", e="{}", b="{}").assignment
    G, _ = verify.build_generic(two_branch(X2), Supercondition("p0", EMPTY_ASSIGNMENT))
    assert G == G0
    with pytest.raises(StartNotInSigma):
        verify.build_generic(inst, Supercondition("p0", EMPTY_ASSIGNMENT))


def test_build_generic_is_deterministic_per_seed():
    inst = random_instance(11)
    plus, _ = sg.sigma_plus(inst)
    for start in plus:
        for seed in (None, 0, 5):
            assert verify.build_generic(inst, start, seed) == verify.build_generic(inst, start, seed)


def test_dual_evaluation():
    family = [two_branch(x) for x in (X1, X2, X3)]
    report = verify.check_zapt(family)
    assert report.ok
    assert [format_hf(x) for x in verify.accepted_values(family)] == [X1, X2]
    assert verify.check_zapt([]).checks == []


def test_dual_evaluation_rank_three_family():
    family = verify.rank_bounded_family(two_branch(), 3)
    assert len(family) == 6
    assert verify.check_zapt(family).ok
    assert [format_hf(x) for x in verify.accepted_values(family)] == [X1, X2]
    for inst in family:
        assert verify.accepts_existential(inst) == verify.accepts_universal(inst)


def test_properties_on_t1():
    for x in (X1, X3):
        report = verify.check_properties(two_branch(x))
        assert report.ok, report.failures


def test_report_schema_and_determinism():
    r1 = verify.run_suite(two_branch(X1), "all")
    r2 = verify.run_suite(load_instance(two_branch(X1).dumps()), "all")
    assert r1.to_json() == r2.to_json()
    data = json.loads(r1.to_json())
    assert set(data) == {"checks", "digest"}
    assert all(set(c) == {"id", "status", "counterexample"} for c in data["checks"])
    assert data["digest"] == two_branch(X1).digest()


def test_suite_selection():
    inst = two_branch(X1)
    assert [c.id for c in verify.run_suite(inst, "sf").checks] == ["realizability"]
    assert [c.id for c in verify.run_suite(inst, "tmain").checks][-2:] == ["correspondence.bijection", "builder"]
    assert all(c.id.startswith("dual-evaluation") for c in verify.run_suite(inst, "zapt").checks)
    with pytest.raises(ParamError):
        verify.run_suite(inst, "everything")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_random_batch_passes(seed):
    report = verify.check_properties(random_instance(seed))
    assert report.ok, report.failures
