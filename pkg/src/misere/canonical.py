"""Misère canonical forms of impartial game trees.

Simplification follows the classical deletion rule: options ``D`` of ``H`` may
be deleted, leaving ``G = H \\ D``, when ``G`` is an option of every member of
``D``; deleting every option (``G`` the endgame) additionally needs one of the
deleted options to be a misère P-position.  Because ``G`` must then be a
second option of ``H``, the search runs over second options rather than over
subsets of options.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator

from .games import ONE, TWO, ZERO, GameTree, ParseError, game, nim_heap, tree_add
from .outcomes import Outcome, misere_outcome


@dataclass(frozen=True)
class CanonicalGame:
    tree: GameTree

    @property
    def birthday(self) -> int:
        return self.tree.birthday


class CensusLimitError(ValueError):
    pass


_CANON: dict[GameTree, GameTree] = {}


def _simplify(options: frozenset[GameTree]) -> GameTree:
    """Apply one round of deletions to a game whose options are canonical."""
    candidates = {k for o in options for k in o.options if k.options <= options}
    for k in sorted(candidates, key=lambda t: (t.birthday, t.uid)):
        deleted = options - k.options
        if not all(k in d.options for d in deleted):
            continue
        if k is ZERO and not any(misere_outcome(d) is Outcome.P for d in deleted):
            continue
        # k is an option of a canonical option, hence canonical itself
        return k
    return game(options)


def canonical_form(g: GameTree) -> CanonicalGame:
    stack = [g]
    while stack:
        t = stack[-1]
        if t in _CANON:
            stack.pop()
            continue
        pending = [o for o in t.options if o not in _CANON]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        _CANON[t] = _simplify(frozenset(_CANON[o] for o in t.options))
    return CanonicalGame(_CANON[g])


def is_canonical(g: GameTree) -> bool:
    return canonical_form(g).tree is g


def games_equal(g: GameTree, h: GameTree) -> bool:
    return canonical_form(g).tree is canonical_form(h).tree


DEFAULT_CENSUS_LIMIT = 4


def iter_born_by(day: int, *, allow_long: bool = False) -> Iterator[GameTree]:
    """Yield every canonical game born by ``day`` exactly once."""
    limit = 5 if allow_long else DEFAULT_CENSUS_LIMIT
    if day < 0:
        raise ValueError("day must be non-negative")
    if day > limit:
        raise CensusLimitError(
            f"day {day} exceeds the census limit {limit}; "
            "day 5 needs allow_long=True (--long) (a minute or two); day 6 is out of reach"
        )
    if day == 0:
        yield ZERO
        return
    previous = sorted(born_by_trees(day - 1), key=lambda t: (t.birthday, t.uid))
    seen: set[GameTree] = set()
    for r in range(len(previous) + 1):
        for subset in combinations(previous, r):
            c = _simplify(frozenset(subset))
            if c not in seen:
                seen.add(c)
                yield c


_CENSUS: dict[int, frozenset[GameTree]] = {}


def born_by_trees(day: int, *, allow_long: bool = False) -> frozenset[GameTree]:
    if day not in _CENSUS:
        _CENSUS[day] = frozenset(iter_born_by(day, allow_long=allow_long))
    return _CENSUS[day]


def born_by(day: int, *, allow_long: bool = False) -> set[CanonicalGame]:
    return {CanonicalGame(t) for t in born_by_trees(day, allow_long=allow_long)}


def census_count(day: int, *, allow_long: bool = False) -> int:
    """Number of canonical games born by ``day``; day 5 is streamed, not stored."""
    if day <= DEFAULT_CENSUS_LIMIT:
        return len(born_by_trees(day))
    return sum(1 for _ in iter_born_by(day, allow_long=allow_long))


# ---------------------------------------------------------------------------
# naming and expressions

TWO_PLUS = game([TWO])
THREE = nim_heap(3)

_BASE_NAMES = {ZERO: "0", ONE: "1", TWO: "2", THREE: "3", TWO_PLUS: "2+"}


def game_name(g: GameTree) -> str:
    """Compact name: ``0``, ``1``, ``2``, ``3``, ``2+`` or a braced option list."""
    if g in _BASE_NAMES:
        return _BASE_NAMES[g]
    for k in range(4, 12):
        if g is nim_heap(k):
            return str(k)
    inner = ",".join(game_name(o) for o in sorted(g.options, key=_name_order))
    return "{" + inner + "}"


def _name_order(g: GameTree):
    return (-g.birthday, game_name(g))


_TOKEN = re.compile(r"\s*(\*\d+|\d+|[{}+,])")


def parse_game(text: str) -> GameTree:
    """Parse ``0``, ``*k``, ``{e1,e2,...}`` and ``e1+e2`` expressions."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character at {pos}: {text[pos:]!r}")
        tokens.append(m.group(1))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    g, i = _parse_sum(tokens, 0)
    if i != len(tokens):
        raise ParseError(f"trailing input in {text!r}")
    return g


def _parse_sum(tokens, i):
    g, i = _parse_atom(tokens, i)
    while i < len(tokens) and tokens[i] == "+":
        h, i = _parse_atom(tokens, i + 1)
        g = tree_add(g, h)
    return g, i


def _parse_atom(tokens, i):
    if i >= len(tokens):
        raise ParseError("unexpected end of expression")
    t = tokens[i]
    if t == "0":
        return ZERO, i + 1
    if t.startswith("*"):
        return nim_heap(int(t[1:])), i + 1
    if t == "{":
        opts = []
        i += 1
        if i < len(tokens) and tokens[i] == "}":
            return ZERO, i + 1
        while True:
            g, i = _parse_sum(tokens, i)
            opts.append(g)
            if i < len(tokens) and tokens[i] == ",":
                i += 1
                continue
            if i < len(tokens) and tokens[i] == "}":
                return game(opts), i + 1
            raise ParseError("expected ',' or '}'")
    raise ParseError(f"unexpected token {t!r}")
