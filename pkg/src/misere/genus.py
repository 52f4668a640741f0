"""Genus symbols (G*-values) of impartial games."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .games import CoinPosition, GameTree, HeapPosition, OctalCode, key_options, position_key
from .outcomes import grundy, mex

CONFIRMATIONS = 4
MAX_EXPONENTS = 200


class UnstableGenusError(RuntimeError):
    """A genus tail failed to settle into period two inside the search window."""


class WildGenusError(ValueError):
    pass


def _normalize(exps: Sequence[int]) -> tuple[int, ...]:
    exps = list(exps)
    if len(exps) < 2:
        raise ValueError("a genus symbol needs at least two exponents")
    while len(exps) > 2 and exps[-1] == exps[-3]:
        exps.pop()
    return tuple(exps)


@dataclass(frozen=True)
class GenusSymbol:
    base: int
    exponents: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "exponents", _normalize(self.exponents))

    def exponent(self, k: int) -> int:
        """The k-th exponent of the infinite, eventually period-2 sequence."""
        e = self.exponents
        if k < len(e):
            return e[k]
        return e[len(e) - 2 + (k - len(e)) % 2]

    @property
    def stable_from(self) -> int:
        """First index from which the exponents repeat with period two."""
        return len(self.exponents) - 2

    def __str__(self):
        if all(x < 10 for x in self.exponents):
            tail = "".join(map(str, self.exponents))
        else:
            tail = ".".join(map(str, self.exponents))
        return f"{self.base}^{tail}"

    def __repr__(self):
        return f"GenusSymbol({self})"


_SYMBOL_RE = re.compile(r"(\d+)\^(\{?)([0-9.]+)\}?")


def parse_genus(text: str) -> GenusSymbol:
    m = _SYMBOL_RE.fullmatch(text.strip())
    if not m:
        raise ValueError(f"malformed genus symbol {text!r}")
    body = m.group(3)
    exps = [int(x) for x in body.split(".")] if "." in body else [int(c) for c in body]
    return GenusSymbol(int(m.group(1)), tuple(exps))


# ---------------------------------------------------------------------------
# misère Grundy numbers of G + k*2 (+ *1)

class _GminusSolver:
    """G⁻ of ``base + k2·*2 + k1·*1`` over an options function on bases.

    Since *1+*1 equals the endgame in misère play, only the parity of the
    number of *1 summands is kept.
    """

    def __init__(self, options_fn):
        self.options_fn = options_fn
        self.memo: dict = {}

    def __call__(self, base, k2: int = 0, k1: int = 0) -> int:
        root = (base, k2, k1 & 1)
        memo = self.memo
        if root in memo:
            return memo[root]
        stack = [root]
        while stack:
            st = stack[-1]
            if st in memo:
                stack.pop()
                continue
            b, a2, a1 = st
            opts = [(o, a2, a1) for o in self.options_fn(b)]
            if a2:
                opts.append((b, a2 - 1, a1))
                opts.append((b, a2 - 1, a1 ^ 1))
            if a1:
                opts.append((b, a2, 0))
            pending = [o for o in opts if o not in memo]
            if pending:
                stack.extend(pending)
                continue
            stack.pop()
            memo[st] = 1 if not opts else mex(memo[o] for o in opts)
        return memo[root]


_SOLVERS: dict = {}


def _solver(ruleset):
    s = _SOLVERS.get(ruleset)
    if s is None:
        if ruleset == "tree":
            s = _GminusSolver(lambda t: t.options)
        else:
            s = _GminusSolver(lambda k: key_options(ruleset, k))
        _SOLVERS[ruleset] = s
    return s


def _resolve(g, ruleset):
    if isinstance(g, GameTree):
        return "tree", g
    if isinstance(g, CoinPosition):
        return g.board, g.key
    if ruleset is None:
        raise TypeError("a ruleset is required for heap positions")
    return ruleset, position_key(g)


def gminus(g, ruleset=None) -> int:
    """Misère Grundy number: 1 for the endgame, otherwise mex over options."""
    rs, base = _resolve(g, ruleset)
    return _solver(rs)(base)


# ---------------------------------------------------------------------------
# genus

_GENUS_MEMO: dict = {}


def _tail_settled(exps: list[int], start: int) -> bool:
    k = len(exps) - 1
    if k - CONFIRMATIONS + 1 < max(start, 2):
        return False
    return all(exps[j] == exps[j - 2] for j in range(k - CONFIRMATIONS + 1, k + 1))


def genus(g, ruleset=None) -> GenusSymbol:
    """Genus by direct recursion: exponent ``n`` is G⁻(g + n·*2)."""
    rs, root = _resolve(g, ruleset)
    memo = _GENUS_MEMO.setdefault(rs, {})
    if root in memo:
        return memo[root]
    opts_fn = (lambda t: t.options) if rs == "tree" else (lambda k: key_options(rs, k))
    solve = _solver(rs)
    stack = [root]
    while stack:
        b = stack[-1]
        if b in memo:
            stack.pop()
            continue
        opts = list(opts_fn(b))
        pending = [o for o in opts if o not in memo]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        start = max((memo[o].stable_from for o in opts), default=0) + 1
        exps: list[int] = []
        while not _tail_settled(exps, start):
            if len(exps) > MAX_EXPONENTS:
                raise UnstableGenusError(f"genus exponents of {b!r} did not settle: {exps[:20]}...")
            exps.append(solve(b, len(exps)))
        base_value = grundy(b) if rs == "tree" else grundy(b, rs)
        memo[b] = GenusSymbol(base_value, tuple(exps))
    return memo[root]


def mex_with_carry(option_genera: Sequence[GenusSymbol]) -> GenusSymbol:
    """Genus of a non-endgame from the genera of its options.

    Exponent ``k >= 1`` is the mex of the options' k-th exponents together with
    the carries ``g_{k-1}`` and ``g_{k-1} xor 1``.
    """
    if not option_genera:
        raise ValueError("mex_with_carry needs at least one option (the endgame is 0^120)")
    base = mex(s.base for s in option_genera)
    start = max(s.stable_from for s in option_genera) + 1
    exps = [mex(s.exponent(0) for s in option_genera)]
    while not _tail_settled(exps, start):
        if len(exps) > MAX_EXPONENTS:
            raise UnstableGenusError(f"carry recurrence did not settle: {exps[:20]}...")
        k = len(exps)
        carry = exps[-1]
        exps.append(mex([s.exponent(k) for s in option_genera] + [carry, carry ^ 1]))
    return GenusSymbol(base, tuple(exps))


def genus_via_carry(g, ruleset=None) -> GenusSymbol:
    """Genus computed bottom-up with :func:`mex_with_carry` only."""
    rs, root = _resolve(g, ruleset)
    opts_fn = (lambda t: t.options) if rs == "tree" else (lambda k: key_options(rs, k))
    memo: dict = {}
    stack = [root]
    while stack:
        b = stack[-1]
        if b in memo:
            stack.pop()
            continue
        opts = list(opts_fn(b))
        pending = [o for o in opts if o not in memo]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        memo[b] = mex_with_carry([memo[o] for o in opts]) if opts else ENDGAME_GENUS
    return memo[root]


ENDGAME_GENUS = GenusSymbol(0, (1, 2, 0))
ONE_GENUS = GenusSymbol(1, (0, 3, 1))


def big_genus(n: int) -> GenusSymbol:
    """Genus of a Nim position of nim-value n containing a heap of size >= 2."""
    return GenusSymbol(n, (n, n ^ 2))


def _tame_class(s: GenusSymbol):
    if s == ENDGAME_GENUS:
        return ("e", 0)
    if s == ONE_GENUS:
        return ("u", 1)
    if s == big_genus(s.base):
        return ("big", s.base)
    return None


def is_tame(s: GenusSymbol) -> bool:
    return _tame_class(s) is not None


def tame_add(s: GenusSymbol, t: GenusSymbol) -> GenusSymbol:
    """Sum of two tame genera (valid only inside tame games)."""
    cs, ct = _tame_class(s), _tame_class(t)
    if cs is None or ct is None:
        wild = s if cs is None else t
        raise WildGenusError(f"{wild} is wild; genus addition is undefined for wild values")
    big = cs[0] == "big" or ct[0] == "big"
    value = cs[1] ^ ct[1]
    if big:
        return big_genus(value)
    return ONE_GENUS if value else ENDGAME_GENUS


def genus_sequence(code: OctalCode, upto: int) -> list[GenusSymbol]:
    if upto < 1:
        raise ValueError("upto must be >= 1")
    return [genus(HeapPosition([n]), code) for n in range(1, upto + 1)]


def first_wild(code: OctalCode, upto: int) -> tuple[int, GenusSymbol] | None:
    for n, s in enumerate(genus_sequence(code, upto), 1):
        if not is_tame(s):
            return n, s
    return None


def pair_table(code: OctalCode, upto: int) -> dict[tuple[int, int], GenusSymbol]:
    """Genera of two-heap positions ``i + j`` for ``1 <= i <= j <= upto``."""
    return {
        (i, j): genus(HeapPosition([i, j]), code)
        for i in range(1, upto + 1)
        for j in range(i, upto + 1)
    }
