import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from misere.games import ONE, TWO, ZERO, HeapPosition, game, parse_octal
from misere.genus import (
    ENDGAME_GENUS,
    ONE_GENUS,
    GenusSymbol,
    WildGenusError,
    big_genus,
    first_wild,
    genus,
    genus_sequence,
    genus_via_carry,
    is_tame,
    mex_with_carry,
    pair_table,
    parse_genus,
    tame_add,
)
from misere.outcomes import Outcome, misere_outcome

small_trees = st.recursive(st.just(ZERO), lambda k: st.frozensets(k, max_size=3).map(game), max_leaves=7)


def test_symbol_normalization():
    assert GenusSymbol(0, (1, 2, 0, 2, 0)).exponents == (1, 2, 0)
    assert str(GenusSymbol(2, (2, 0))) == "2^20"
    assert str(GenusSymbol(0, (12, 3))) == "0^12.3"
    assert GenusSymbol(0, (1, 2, 0)).exponent(7) == 2
    with pytest.raises(ValueError):
        GenusSymbol(0, (1,))


@pytest.mark.parametrize("text", ["0^120", "1^031", "2^20", "0^12.3", "3^{31}"])
def test_parse_round_trip(text):
    s = parse_genus(text)
    assert parse_genus(str(s)) == s


def test_parse_rejects():
    with pytest.raises(ValueError):
        parse_genus("0-120")


def test_nim_values():
    assert genus(ZERO) == ENDGAME_GENUS
    assert genus(ONE) == ONE_GENUS
    assert genus(TWO) == big_genus(2)
    assert str(genus(TWO)) == "2^20"


@given(small_trees)
@settings(max_examples=80, deadline=None)
def test_direct_and_carry_agree(g):
    s = genus(g)
    assert genus_via_carry(g) == s
    # exponent 0 is the misère Grundy value: P exactly when it is zero
    assert (s.exponent(0) == 0) == (misere_outcome(g) is Outcome.P)


@given(st.lists(st.integers(1, 8), max_size=3))
@settings(max_examples=40, deadline=None)
def test_heaps_agree(hs):
    code = parse_octal("0.123")
    pos = HeapPosition(hs)
    assert genus(pos, code) == genus_via_carry(pos, code)


def test_carry_needs_options():
    with pytest.raises(ValueError):
        mex_with_carry([])


def test_tame_arithmetic():
    assert tame_add(ONE_GENUS, ONE_GENUS) == ENDGAME_GENUS
    assert tame_add(ENDGAME_GENUS, ONE_GENUS) == ONE_GENUS
    assert tame_add(big_genus(3), ONE_GENUS) == big_genus(2)
    assert is_tame(big_genus(5))
    wild = GenusSymbol(0, (3, 1))
    assert not is_tame(wild)
    with pytest.raises(WildGenusError):
        tame_add(wild, ONE_GENUS)


def test_sequence_and_first_wild():
    code = parse_octal("0.123")
    seq = genus_sequence(code, 6)
    assert len(seq) == 6 and seq[0] == ONE_GENUS
    hit = first_wild(code, 12)
    assert hit is not None and not is_tame(hit[1])
    assert first_wild(parse_octal("0.333"), 10) is None
    with pytest.raises(ValueError):
        genus_sequence(code, 0)


def test_pair_table_keys():
    t = pair_table(parse_octal("0.123"), 3)
    assert sorted(t) == [(1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)]
