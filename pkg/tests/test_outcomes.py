from functools import reduce
from operator import xor

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from misere.games import ONE, TWO, ZERO, CoinPosition, HeapPosition, parse_octal, pascals_beans, tree_of
from misere.outcomes import (
    Outcome,
    NimSequence,
    brute_grundy,
    check_play,
    find_octal_period,
    grundy,
    mex,
    misere_outcome,
    nim_sequence,
    normal_outcome,
    outcome,
    winning_moves,
)

NIM = parse_octal("0.3333333")
CODES = [parse_octal(c) for c in ("0.123", "0.15", "0.75", "0.34", "0.71", "0.137")]

heaps = st.lists(st.integers(1, 9), max_size=4)


def test_mex():
    assert mex([]) == 0
    assert mex([0, 1, 3]) == 2


def test_check_play():
    assert check_play("Misère") == "misere"
    with pytest.raises(ValueError):
        check_play("loopy")


def test_endgames():
    assert misere_outcome(ZERO) is Outcome.N
    assert normal_outcome(ZERO) is Outcome.P
    assert misere_outcome(HeapPosition(), NIM) is Outcome.N


@given(st.sampled_from(CODES), heaps)
@settings(max_examples=60, deadline=None)
def test_grundy_matches_brute_force(code, hs):
    pos = HeapPosition(hs)
    assert grundy(pos, code) == brute_grundy(pos, code)


@given(st.sampled_from(CODES), heaps)
@settings(max_examples=60, deadline=None)
def test_normal_outcome_is_grundy_zero(code, hs):
    pos = HeapPosition(hs)
    assert (normal_outcome(pos, code) is Outcome.P) == (brute_grundy(pos, code) == 0)


@given(st.lists(st.integers(1, 7), max_size=4))
@settings(max_examples=80, deadline=None)
def test_misere_nim_rule(hs):
    pos = HeapPosition(hs)
    if all(h <= 1 for h in hs):
        expect_p = len(hs) % 2 == 1
    else:
        expect_p = reduce(xor, hs, 0) == 0
    assert (misere_outcome(pos, NIM) is Outcome.P) == expect_p


@given(st.sampled_from(CODES[:3]), st.lists(st.integers(1, 6), max_size=3))
@settings(max_examples=40, deadline=None)
def test_tree_and_position_agree(code, hs):
    pos = HeapPosition(hs)
    t = tree_of(pos, code)
    assert misere_outcome(t) == misere_outcome(pos, code)
    assert grundy(t) == grundy(pos, code)


def test_winning_moves_are_p():
    code = parse_octal("0.123")
    pos = HeapPosition([7])
    moves = winning_moves(pos, code)
    assert moves == {HeapPosition([5])}
    assert all(misere_outcome(m, code) is Outcome.P for m in moves)
    assert winning_moves(HeapPosition([1]), code) == set()


def test_winning_moves_tree():
    assert winning_moves(TWO) == {ONE}
    assert winning_moves(TWO, play="normal") == {ZERO}


def test_outcome_dispatch():
    assert outcome(ONE, play="normal") is Outcome.N
    assert outcome(ONE) is Outcome.P


def test_single_heap_p_positions_0123():
    code = parse_octal("0.123")
    ps = [n for n in range(1, 22) if misere_outcome(HeapPosition([n]), code) is Outcome.P]
    assert ps == [1, 5, 6, 10, 11, 15, 16, 20, 21]


def test_coin_positions():
    board = pascals_beans(5)
    assert grundy(CoinPosition(board, {"r3c1": 1})) == 2
    pos = CoinPosition(board, {"r2c1": 1, "r4c2": 1})
    assert misere_outcome(pos) is Outcome.N


class TestSequences:
    def test_indexing(self):
        s = nim_sequence(parse_octal("0.123"), 10)
        assert s[0] == 0 and s[3] == 2
        assert isinstance(s, NimSequence)

    def test_period_needs_room(self):
        assert nim_sequence(parse_octal("0.123"), 15).period is None
        assert nim_sequence(parse_octal("0.123"), 35).preperiod == 5

    def test_find_period_constant(self):
        assert find_octal_period([0] + [1] * 20, 1) == (1, 1)

    def test_rejects_bad_bound(self):
        with pytest.raises(ValueError):
            nim_sequence(parse_octal("0.3"), 0)

    def test_nim_is_identity(self):
        s = nim_sequence(NIM, 7)
        assert [s[n] for n in range(8)] == list(range(8))

    def test_subtraction_period(self):
        s = nim_sequence(parse_octal("0.333"), 30)
        assert [s[n] for n in range(8)] == [0, 1, 2, 3, 0, 1, 2, 3]
        assert s.period == (0, 4)
