import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from misere.canonical import (
    CensusLimitError,
    born_by_trees,
    canonical_form,
    census_count,
    game_name,
    games_equal,
    is_canonical,
    parse_game,
)
from misere.games import ONE, TWO, ZERO, ParseError, game, nim_heap, tree_add
from misere.outcomes import misere_outcome

DAY2 = sorted(born_by_trees(2), key=lambda t: (t.birthday, t.uid))


def trees(depth=3):
    return st.recursive(
        st.just(ZERO),
        lambda kids: st.frozensets(kids, max_size=3).map(game),
        max_leaves=6,
    )


@given(trees(), st.sampled_from(DAY2))
@settings(max_examples=80, deadline=None)
def test_canonical_form_preserves_outcome_in_sums(g, h):
    c = canonical_form(g).tree
    assert misere_outcome(tree_add(g, h)) == misere_outcome(tree_add(c, h))


@given(trees())
@settings(max_examples=60, deadline=None)
def test_canonical_is_idempotent(g):
    c = canonical_form(g).tree
    assert is_canonical(c)
    assert canonical_form(c).tree is c
    assert c.birthday <= g.birthday


def test_small_census():
    assert [census_count(d) for d in range(4)] == [1, 2, 3, 5]
    assert census_count(4) == 22


def test_census_limit():
    with pytest.raises(CensusLimitError, match="--long"):
        census_count(5)
    with pytest.raises(ValueError):
        list(born_by_trees(-1))


def test_equality():
    assert not games_equal(tree_add(TWO, TWO), ZERO)
    assert games_equal(game([ZERO, ONE]), TWO)
    assert games_equal(tree_add(ONE, ONE), tree_add(ONE, ONE))


def test_names():
    assert game_name(ZERO) == "0"
    assert game_name(game([TWO])) == "2+"
    assert game_name(nim_heap(5)) == "5"
    assert game_name(game([TWO, ZERO])) == "{2,0}"


class TestParse:
    def test_basic(self):
        assert parse_game("0") is ZERO
        assert parse_game("*2") is TWO
        assert parse_game("{}") is ZERO
        assert parse_game("{0, *1}") is TWO
        assert parse_game("*1 + *1") is tree_add(ONE, ONE)

    def test_round_trip_names(self):
        for t in born_by_trees(3):
            assert games_equal(parse_game(_expr(game_name(t))), t)

    @pytest.mark.parametrize("bad", ["", "{0", "*", "0 +", "{0,,1}", "x"])
    def test_errors(self, bad):
        with pytest.raises(ParseError):
            parse_game(bad)


def _expr(name):
    return re.sub(r"[1-9]", lambda m: "*" + m.group(), name).replace("*2+", "{*2}")
