"""Outcomes and Grundy values under normal and misère play."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import reduce
from operator import xor
from typing import Iterable

from .games import (
    CoinPosition,
    GameTree,
    HeapPosition,
    OctalCode,
    key_options,
    position_key,
)


class Outcome(str, Enum):
    P = "P"
    N = "N"

    def __str__(self):
        return self.value


NORMAL = "normal"
MISERE = "misere"


def check_play(play: str) -> str:
    play = play.lower().replace("è", "e")
    if play not in (NORMAL, MISERE):
        raise ValueError(f"play must be 'normal' or 'misere', got {play!r}")
    return play


def mex(values: Iterable[int]) -> int:
    s = set(values)
    n = 0
    while n in s:
        n += 1
    return n


# ---------------------------------------------------------------------------
# memo tables, keyed per ruleset and play convention; entries are write-once

_P_MEMO: dict[tuple, dict] = {}


def _p_memo(ruleset, play: str) -> dict:
    try:
        return _P_MEMO[(ruleset, play)]
    except KeyError:
        return _P_MEMO.setdefault((ruleset, play), {})


def clear_memos():
    _P_MEMO.clear()
    _UNIT_GRUNDY.clear()
    _TREE_GRUNDY.clear()


def solve_p(options_fn, root, memo: dict, misere: bool) -> bool:
    """True iff ``root`` is a P-position.

    Iterative depth-first search; a node is resolved as soon as one P option
    is known, otherwise after all of its options are resolved.
    """
    if root in memo:
        return memo[root]
    stack = [root]
    opts_cache: dict = {}
    while stack:
        k = stack[-1]
        if k in memo:
            stack.pop()
            continue
        opts = opts_cache.get(k)
        if opts is None:
            opts = opts_cache[k] = list(options_fn(k))
            if not opts:
                memo[k] = not misere
                stack.pop()
                del opts_cache[k]
                continue
        pending = None
        result = True
        for o in opts:
            v = memo.get(o)
            if v is None:
                if pending is None:
                    pending = o
            elif v:
                result = False
                break
        if not result or pending is None:
            memo[k] = result
            stack.pop()
            del opts_cache[k]
        else:
            stack.append(pending)
    return memo[root]


def is_p_key(ruleset, key: tuple, play: str = MISERE) -> bool:
    memo = _p_memo(ruleset, play)
    v = memo.get(key)
    if v is None:
        v = solve_p(lambda k: key_options(ruleset, k), key, memo, play == MISERE)
    return v


def _tree_options(g: GameTree):
    return g.options


def _resolve(p, ruleset):
    if isinstance(p, CoinPosition):
        return p.board, p.key
    if ruleset is None:
        raise TypeError("a ruleset is required for heap positions")
    return ruleset, position_key(p)


def misere_outcome(p, ruleset=None) -> Outcome:
    """Misère outcome: the endgame is N; otherwise P iff every option is N."""
    return _outcome(p, ruleset, MISERE)


def normal_outcome(p, ruleset=None) -> Outcome:
    if isinstance(p, GameTree):
        return Outcome.P if grundy(p) == 0 else Outcome.N
    return Outcome.P if grundy(p, ruleset) == 0 else Outcome.N


def outcome(p, ruleset=None, play: str = MISERE) -> Outcome:
    play = check_play(play)
    return misere_outcome(p, ruleset) if play == MISERE else normal_outcome(p, ruleset)


def _outcome(p, ruleset, play) -> Outcome:
    if isinstance(p, GameTree):
        memo = _p_memo("tree", play)
        v = solve_p(_tree_options, p, memo, play == MISERE)
    else:
        rs, key = _resolve(p, ruleset)
        v = is_p_key(rs, key, play)
    return Outcome.P if v else Outcome.N


# ---------------------------------------------------------------------------
# Grundy values

_UNIT_GRUNDY: dict = {}
_TREE_GRUNDY: dict[GameTree, int] = {}


def unit_grundy(ruleset, unit) -> int:
    """Normal-play Grundy value of a single unit (heap or coin)."""
    memo = _UNIT_GRUNDY.setdefault(ruleset, {})
    if unit in memo:
        return memo[unit]
    stack = [unit]
    while stack:
        u = stack[-1]
        if u in memo:
            stack.pop()
            continue
        moves = ruleset.unit_moves(u)
        pending = [v for rep in moves for v in rep if v not in memo]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        memo[u] = mex(reduce(xor, (memo[v] for v in rep), 0) for rep in moves)
    return memo[unit]


def tree_grundy(g: GameTree) -> int:
    memo = _TREE_GRUNDY
    stack = [g]
    while stack:
        t = stack[-1]
        if t in memo:
            stack.pop()
            continue
        pending = [o for o in t.options if o not in memo]
        if pending:
            stack.extend(pending)
        else:
            stack.pop()
            memo[t] = mex(memo[o] for o in t.options)
    return memo[g]


def grundy(p, ruleset=None) -> int:
    """Normal-play Grundy value (xor of unit values for positions)."""
    if isinstance(p, GameTree):
        return tree_grundy(p)
    rs, key = _resolve(p, ruleset)
    return reduce(xor, (unit_grundy(rs, u) for u in key), 0)


def brute_grundy(p, ruleset=None) -> int:
    """Grundy value by mex recursion over whole positions (no xor shortcut)."""
    rs, key = _resolve(p, ruleset)
    memo: dict = {}
    stack = [key]
    while stack:
        k = stack[-1]
        if k in memo:
            stack.pop()
            continue
        opts = key_options(rs, k)
        pending = [o for o in opts if o not in memo]
        if pending:
            stack.extend(pending)
        else:
            stack.pop()
            memo[k] = mex(memo[o] for o in opts)
    return memo[key]


def winning_moves(p, ruleset=None, play: str = MISERE) -> set:
    """Options of ``p`` that are P-positions under ``play``."""
    play = check_play(play)
    if isinstance(p, GameTree):
        return {o for o in p.options if outcome(o, play=play) is Outcome.P}
    rs, key = _resolve(p, ruleset)
    wrap = (lambda k: CoinPosition.from_key(rs, k)) if isinstance(p, CoinPosition) else HeapPosition.from_key
    out = set()
    for o in key_options(rs, key):
        if play == MISERE:
            is_p = is_p_key(rs, o, MISERE)
        else:
            is_p = grundy(o, rs) == 0
        if is_p:
            out.add(wrap(o))
    return out


# ---------------------------------------------------------------------------
# Nim sequences

@dataclass(frozen=True)
class NimSequence:
    values: tuple[int, ...]
    period: tuple[int, int] | None = None

    def __getitem__(self, n: int) -> int:
        """Value of heap ``n`` (1-based; heap 0 has value 0)."""
        return 0 if n == 0 else self.values[n - 1]

    @property
    def preperiod(self) -> int | None:
        return None if self.period is None else self.period[0]


def nim_sequence(code: OctalCode, upto: int) -> NimSequence:
    """Normal-play values of heaps ``1..upto`` with proven periodicity if any.

    A period ``p`` with preperiod ``i0`` is declared once
    ``G(n + p) == G(n)`` for every ``i0 <= n <= 2*i0 + 2*p + t`` (``t`` the
    largest take), which settles periodicity for octal games.
    """
    if upto < 1:
        raise ValueError("upto must be >= 1")
    full = [0] + [unit_grundy(code, n) for n in range(1, upto + 1)]
    return NimSequence(tuple(full[1:]), find_octal_period(full, code.max_take))


def find_octal_period(full: list[int], t: int) -> tuple[int, int] | None:
    last = len(full) - 1
    for p in range(1, last + 1):
        for i0 in range(0, last + 1):
            end = 2 * i0 + 2 * p + t
            if end + p > last:
                break
            if all(full[n + p] == full[n] for n in range(i0, last - p + 1)):
                return i0, p
    return None
