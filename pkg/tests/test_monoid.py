import pytest
from hypothesis import given
from hypothesis import strategies as st

from misere import data
from misere.games import ParseError
from misere.monoid import (
    check_axioms,
    derive_presentation,
    enumerate_monoid,
    format_presentation,
    format_word,
    isomorphic,
    normal_form,
    parse_presentation,
    parse_word,
    power_relation,
    presentation_of,
    tame_quotient,
    verify_relation,
)

BUNDLED = ["r8", "0.123", "0.34", "heptagon"]


@given(st.lists(st.integers(0, 5), min_size=3, max_size=3))
def test_word_round_trip(exps):
    gens = ("a", "b", "c")
    w = tuple(exps)
    assert parse_word(format_word(w, gens), gens) == w


def test_word_errors():
    with pytest.raises(ParseError):
        parse_word("ax", ("a", "b"))


@pytest.mark.parametrize("name", BUNDLED)
def test_presentation_text_round_trip(name):
    pres = data.presentation(name)
    assert parse_presentation(format_presentation(pres)) == pres


@pytest.mark.parametrize("name", BUNDLED)
def test_derived_presentation_round_trip(name):
    m = enumerate_monoid(data.presentation(name))
    check_axioms(m)
    again = enumerate_monoid(derive_presentation(m))
    assert isomorphic(m, again) is not None
    assert presentation_of(m) is not None


def test_0123_quotient():
    m = enumerate_monoid(data.presentation("0.123"))
    assert m.order == 20
    assert m.sorted_names(e for e in range(m.order) if m.is_p(e)) == ["a", "b2", "ac", "bd", "d2"]
    assert verify_relation(m, "a2", "1")
    assert not verify_relation(m, "a", "1")
    assert normal_form(m, "a3") == "a"


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_tame_orders(n):
    m = tame_quotient(n)
    assert m.order == (2 if n == 1 else 2**n + 2)


def test_isomorphism_negative():
    assert isomorphic(tame_quotient(2), tame_quotient(3)) is None
    assert isomorphic(tame_quotient(2), enumerate_monoid(data.presentation("r8"))) is None


def test_power_relation():
    m = enumerate_monoid(data.presentation("0.123"))
    # a2=1 and b4=b2
    assert power_relation(m, m.element("a")) == 0
    assert power_relation(m, m.element("b")) == 2
    assert power_relation(m, m.element("1")) == 0


@pytest.mark.parametrize("text", [
    "<a | a2=1",
    "<a | a2=1> P={b}",
    "<a | a2=b>",
])
def test_malformed_presentations(text):
    with pytest.raises(ParseError):
        parse_presentation(text)
