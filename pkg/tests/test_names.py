import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forcing_lab.errors import ParseError
from forcing_lab.instances import random_instance
from forcing_lab.kernel import validate_poset
from forcing_lab.names import (
    EMPTY,
    EMPTY_NAME,
    HFSet,
    PName,
    canonicalize_hf,
    check_name,
    check_value,
    conditions_of,
    cumulative_level,
    format_hf,
    interpret,
    is_transitive,
    name_rank,
    non_transitive_witness,
    ordinal,
    parse_hf,
    potential_elements,
    transitive_closure,
    transitive_sets,
)

P = validate_poset([("p0", "top"), ("p1", "top")], ["top", "p0", "p1"], "top")
G0, G1 = frozenset({"p0", "top"}), frozenset({"p1", "top"})
e = EMPTY_NAME
b = PName({(e, "p0")})
t = PName({(e, "top"), (b, "top")})


def test_canonical_forms():
    assert parse_hf("{{},{}}") == HFSet({EMPTY})
    assert format_hf(parse_hf("{{},{}}")) == "{{}}"
    assert parse_hf("{}") == EMPTY
    assert format_hf(parse_hf("{{{}},{}}")) == "{{},{{}}}"
    assert format_hf(parse_hf(" { { } , { { } } } ")) == "{{},{{}}}"


def test_canonicalize_nested_iterables():
    assert canonicalize_hf([[], [[]], []]) == parse_hf("{{},{{}}}")


@pytest.mark.parametrize("bad", ["", "{", "{}}", "{{}", "{,}", "{{},}", "x"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_hf(bad)


def test_transitivity():
    assert is_transitive(EMPTY)
    x = parse_hf("{{{}}}")
    assert not is_transitive(x)
    assert transitive_closure(x) == parse_hf("{{},{{}}}")
    assert non_transitive_witness(x) == (parse_hf("{{}}"), EMPTY)
    assert is_transitive(parse_hf("{{},{{}}}"))


def test_ordinals_and_levels():
    assert ordinal(0) == EMPTY
    assert ordinal(2) == parse_hf("{{},{{}}}")
    assert [len(cumulative_level(n)) for n in range(5)] == [0, 1, 2, 4, 16]


def test_transitive_sets_rank_two():
    assert [format_hf(x) for x in transitive_sets(2)] == ["{}", "{{}}", "{{},{{}}}"]


def test_check_names():
    assert check_name(EMPTY, P) == e
    assert check_name(parse_hf("{{}}"), P) == PName({(e, "top")})
    assert check_value(check_name(ordinal(3), P), P) == ordinal(3)
    assert check_value(b, P) is None
    # e carries no entries, so it is the check-name of the empty set
    assert check_value(e, P) == EMPTY


def test_potential_elements():
    assert potential_elements(e) == []
    assert potential_elements(t) == [e, b]
    assert potential_elements(check_name(parse_hf("{{}}"), P)) == [e]


def test_ranks():
    assert name_rank(e) == 0
    assert name_rank(b) == 1
    assert name_rank(t) == 2


def test_interpretation():
    for G in (G0, G1, frozenset()):
        assert interpret(e, G) == EMPTY
    assert interpret(t, G0) == parse_hf("{{},{{}}}")
    assert interpret(t, G1) == parse_hf("{{}}")
    assert conditions_of(t) == {"p0", "top"}


hf_sets = st.recursive(
    st.just(EMPTY),
    lambda inner: st.frozensets(inner, max_size=3).map(HFSet),
    max_leaves=8,
)


@settings(max_examples=150, deadline=None)
@given(hf_sets)
def test_format_parse_roundtrip(x):
    assert parse_hf(format_hf(x)) == x
    assert format_hf(parse_hf(format_hf(x))) == format_hf(x)


@settings(max_examples=100, deadline=None)
@given(hf_sets, hf_sets)
def test_canonical_form_unique(x, y):
    assert (format_hf(x) == format_hf(y)) == (x == y)


@settings(max_examples=100, deadline=None)
@given(hf_sets)
def test_check_name_interprets_to_value(x):
    s = check_name(x, P)
    for G in (G0, G1):
        assert interpret(s, G) == x
    assert check_value(s, P) == x


@settings(max_examples=100, deadline=None)
@given(hf_sets)
def test_transitive_closure_is_transitive_superset(x):
    tc = transitive_closure(x)
    assert is_transitive(tc) and x <= tc
    assert (tc == x) == is_transitive(x)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_interpretation_is_local(seed):
    inst = random_instance(seed)
    for s in inst.all_names():
        used = conditions_of(s)
        for G in inst.generics:
            assert interpret(s, G) == interpret(s, G & used)
