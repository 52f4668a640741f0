"""Rulesets, positions and game trees.

A *ruleset* is anything exposing ``unit_moves(unit)`` and ``unit_weight(unit)``.
Two rulesets ship here: :class:`OctalCode` (units are heap sizes) and
:class:`DagBoard` (units are board nodes carrying one coin each).  Positions are
multisets of units, stored internally as sorted tuples so that structural
equality doubles as position equality.
"""
from __future__ import annotations

import re
import threading
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping


class ParseError(ValueError):
    """Raised when textual input (codes, boards, expressions) is malformed."""


# ---------------------------------------------------------------------------
# Octal codes

@dataclass(frozen=True)
class OctalCode:
    digits: tuple[int, ...]

    def __post_init__(self):
        digits = tuple(int(d) for d in self.digits)
        if not digits or not any(digits):
            raise ValueError("octal code needs at least one nonzero digit")
        if any(d < 0 or d > 7 for d in digits):
            raise ValueError(f"octal digits must lie in 0..7, got {digits}")
        object.__setattr__(self, "digits", digits)

    def __str__(self):
        return "0." + "".join(map(str, self.digits))

    @property
    def max_take(self) -> int:
        return len(self.digits)

    def unit_moves(self, n: int) -> frozenset[tuple[int, ...]]:
        return heap_moves(self, n)

    def unit_weight(self, n: int) -> int:
        return n


_OCTAL_RE = re.compile(r"0?\.([0-9]+)")


def parse_octal(text: str) -> OctalCode:
    """Parse ``"0.123"`` or ``".123"`` into an :class:`OctalCode`."""
    s = text.strip()
    m = _OCTAL_RE.fullmatch(s)
    if not m:
        raise ParseError(f"malformed octal code {text!r}")
    for ch in m.group(1):
        if ch > "7":
            raise ParseError(f"octal digit out of range: {ch!r} in {text!r}")
    try:
        return OctalCode(tuple(int(ch) for ch in m.group(1)))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


@lru_cache(maxsize=None)
def heap_moves(code: OctalCode, n: int) -> frozenset[tuple[int, ...]]:
    """Replacement-heap lists reachable from a lone heap of size ``n``."""
    if n < 1:
        raise ValueError("heap size must be positive")
    out = set()
    for k in range(1, min(n, len(code.digits)) + 1):
        d = code.digits[k - 1]
        rest = n - k
        if d & 1 and rest == 0:
            out.add(())
        if d & 2 and rest >= 1:
            out.add((rest,))
        if d & 4:
            for i in range(1, rest // 2 + 1):
                out.add((i, rest - i))
    return frozenset(out)


# ---------------------------------------------------------------------------
# Positions

def _merge(key: tuple, extra: Iterable) -> tuple:
    if not extra:
        return key
    return tuple(sorted(key + tuple(extra)))


def key_options(ruleset, key: tuple) -> set[tuple]:
    """Options of the position ``key`` (a sorted unit tuple) under ``ruleset``."""
    out = set()
    prev = object()
    for i, u in enumerate(key):
        if u == prev:
            continue
        prev = u
        rest = key[:i] + key[i + 1:]
        for rep in ruleset.unit_moves(u):
            out.add(_merge(rest, rep))
    return out


def key_weight(ruleset, key: tuple) -> int:
    return sum(ruleset.unit_weight(u) for u in key)


class HeapPosition:
    """Multiset of heap sizes.  The empty position is the endgame."""

    __slots__ = ("key",)

    def __init__(self, heaps: Mapping[int, int] | Iterable[int] = ()):
        if isinstance(heaps, Mapping):
            items = []
            for size, mult in heaps.items():
                if mult < 0:
                    raise ValueError("negative multiplicity")
                items.extend([size] * mult)
        else:
            items = list(heaps)
        for h in items:
            if not isinstance(h, int) or isinstance(h, bool):
                raise TypeError(f"heap sizes must be integers, got {h!r}")
            if h < 0:
                raise ValueError(f"negative heap size {h}")
        self.key = tuple(sorted(h for h in items if h > 0))

    @classmethod
    def from_key(cls, key: tuple) -> "HeapPosition":
        p = cls.__new__(cls)
        p.key = key
        return p

    @property
    def counts(self) -> dict[int, int]:
        return dict(sorted(Counter(self.key).items()))

    @property
    def weight(self) -> int:
        return sum(self.key)

    def __add__(self, other: "HeapPosition") -> "HeapPosition":
        return HeapPosition.from_key(_merge(self.key, other.key))

    def __eq__(self, other):
        return isinstance(other, HeapPosition) and self.key == other.key

    def __hash__(self):
        return hash(("heap", self.key))

    def __lt__(self, other):
        return (self.weight, self.key) < (other.weight, other.key)

    def __iter__(self):
        return iter(self.key)

    def __len__(self):
        return len(self.key)

    def __str__(self):
        return "+".join(map(str, self.key)) if self.key else "0"

    def __repr__(self):
        return f"HeapPosition({str(self)})"


def position_options(p: HeapPosition, code: OctalCode) -> set[HeapPosition]:
    return {HeapPosition.from_key(k) for k in key_options(code, p.key)}


# ---------------------------------------------------------------------------
# DAG coin-sliding boards

@dataclass(frozen=True)
class DagBoard:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    _succ: dict = field(init=False, repr=False, compare=False, hash=False)
    _height: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        nodes = tuple(self.nodes)
        if len(set(nodes)) != len(nodes):
            raise ValueError("duplicate node ids")
        succ = {v: [] for v in nodes}
        for a, b in self.edges:
            if a not in succ or b not in succ:
                raise ValueError(f"edge ({a}, {b}) uses an undeclared node")
            if b not in succ[a]:
                succ[a].append(b)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", tuple((a, b) for a in nodes for b in succ[a]))
        object.__setattr__(self, "_succ", {v: tuple(ws) for v, ws in succ.items()})
        object.__setattr__(self, "_height", _heights(self._succ))

    @property
    def terminals(self) -> tuple[str, ...]:
        return tuple(v for v in self.nodes if not self._succ[v])

    @property
    def interior(self) -> tuple[str, ...]:
        return tuple(v for v in self.nodes if self._succ[v])

    def is_terminal(self, v: str) -> bool:
        return not self._succ[v]

    def successors(self, v: str) -> tuple[str, ...]:
        return self._succ[v]

    def height(self, v: str) -> int:
        """Length of the longest path from ``v`` to a terminal."""
        return self._height[v]

    def unit_moves(self, v: str) -> frozenset[tuple[str, ...]]:
        return frozenset(() if self.is_terminal(w) else (w,) for w in self._succ[v])

    def unit_weight(self, v: str) -> int:
        return self._height[v]


def _heights(succ: dict) -> dict:
    height: dict = {}
    state: dict = {}
    for root in succ:
        if root in height:
            continue
        stack = [root]
        while stack:
            v = stack[-1]
            if v in height:
                stack.pop()
                continue
            if state.get(v) is None:
                state[v] = "open"
                for w in succ[v]:
                    if state.get(w) == "open" and w not in height:
                        raise ValueError(f"board has a cycle through {w!r}")
                    if w not in height:
                        stack.append(w)
            else:
                stack.pop()
                height[v] = 1 + max((height[w] for w in succ[v]), default=-1)
    return height


class CoinPosition:
    """Coins on the non-terminal nodes of a :class:`DagBoard`."""

    __slots__ = ("board", "key")

    def __init__(self, board: DagBoard, counts: Mapping[str, int] | Iterable[str] = ()):
        self.board = board
        if isinstance(counts, Mapping):
            items = []
            for v, mult in counts.items():
                if mult < 0:
                    raise ValueError("negative multiplicity")
                items.extend([v] * mult)
        else:
            items = list(counts)
        for v in items:
            if v not in board._succ:
                raise ValueError(f"unknown node {v!r}")
        self.key = tuple(sorted(v for v in items if not board.is_terminal(v)))

    @classmethod
    def from_key(cls, board: DagBoard, key: tuple) -> "CoinPosition":
        p = cls.__new__(cls)
        p.board = board
        p.key = key
        return p

    @property
    def counts(self) -> dict[str, int]:
        return dict(sorted(Counter(self.key).items()))

    @property
    def weight(self) -> int:
        return key_weight(self.board, self.key)

    def __add__(self, other: "CoinPosition") -> "CoinPosition":
        if other.board != self.board:
            raise ValueError("cannot add positions on different boards")
        return CoinPosition.from_key(self.board, _merge(self.key, other.key))

    def __eq__(self, other):
        return isinstance(other, CoinPosition) and self.board == other.board and self.key == other.key

    def __hash__(self):
        return hash(("coin", self.key))

    def __iter__(self):
        return iter(self.key)

    def __len__(self):
        return len(self.key)

    def __str__(self):
        return "+".join(self.key) if self.key else "0"

    def __repr__(self):
        return f"CoinPosition({str(self)})"


def coin_options(p: CoinPosition) -> set[CoinPosition]:
    return {CoinPosition.from_key(p.board, k) for k in key_options(p.board, p.key)}


def cell_id(row: int, col: int) -> str:
    return f"r{row}c{col}"


def pascals_beans(rows: int) -> DagBoard:
    """Pascal's triangle with ``rows`` rows, apex at row 0.

    Interior cell (r, c) slides to (r-1, c-1) or (r-1, c); boundary cells are
    terminal.
    """
    if rows < 1:
        raise ValueError("rows must be >= 1")
    nodes, edges = [], []
    for r in range(rows):
        for c in range(r + 1):
            nodes.append(cell_id(r, c))
            if 0 < c < r:
                edges.append((cell_id(r, c), cell_id(r - 1, c - 1)))
                edges.append((cell_id(r, c), cell_id(r - 1, c)))
    return DagBoard(tuple(nodes), tuple(edges))


_ID_RE = re.compile(r"[A-Za-z0-9_]+")


def parse_board(text: str) -> tuple[DagBoard, CoinPosition]:
    """Parse the line-oriented board format (``node``/``edge``/``coin``)."""
    nodes, edges, coins = [], [], {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        verb, args = parts[0], parts[1:]
        for a in args[:2]:
            if not _ID_RE.fullmatch(a):
                raise ParseError(f"line {lineno}: bad node id {a!r}")
        if verb == "node" and len(args) == 1:
            nodes.append(args[0])
        elif verb == "edge" and len(args) == 2:
            edges.append((args[0], args[1]))
        elif verb == "coin" and len(args) == 2 and args[1].isdigit():
            coins[args[0]] = coins.get(args[0], 0) + int(args[1])
        else:
            raise ParseError(f"line {lineno}: unknown or malformed directive {line!r}")
    try:
        board = DagBoard(tuple(nodes), tuple(edges))
        return board, CoinPosition(board, coins)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def format_board(board: DagBoard, position: CoinPosition | None = None) -> str:
    lines = [f"node {v}" for v in board.nodes]
    lines += [f"edge {a} {b}" for a, b in board.edges]
    if position is not None:
        lines += [f"coin {v} {n}" for v, n in position.counts.items()]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Interned game trees

class GameTree:
    """An impartial game given by its set of options.

    Instances are interned: structurally equal trees are the same object, so
    ``is``/``==`` comparisons are constant time.  Build them with :func:`game`.
    """

    __slots__ = ("options", "uid", "birthday", "__weakref__")

    def __repr__(self):
        return f"GameTree#{self.uid}"

    def __lt__(self, other):
        return self.uid < other.uid


class _Interner:
    def __init__(self):
        self._table: dict[frozenset, GameTree] = {}
        self._lock = threading.Lock()

    def get(self, options: frozenset) -> GameTree:
        g = self._table.get(options)
        if g is not None:
            return g
        with self._lock:
            g = self._table.get(options)
            if g is None:
                g = GameTree.__new__(GameTree)
                g.options = options
                g.uid = len(self._table)
                g.birthday = 1 + max((o.birthday for o in options), default=-1)
                self._table[options] = g
            return g

    def __len__(self):
        return len(self._table)


_INTERNER = _Interner()


def game(options: Iterable[GameTree] = ()) -> GameTree:
    return _INTERNER.get(frozenset(options))


ZERO = game()
ONE = game([ZERO])
TWO = game([ZERO, ONE])


@lru_cache(maxsize=None)
def nim_heap(k: int) -> GameTree:
    return game(nim_heap(i) for i in range(k))


_sum_memo: dict[tuple[int, int], GameTree] = {}


def tree_add(g: GameTree, h: GameTree) -> GameTree:
    """Disjunctive sum of two trees."""
    if g is ZERO:
        return h
    if h is ZERO:
        return g
    if h.uid < g.uid:
        g, h = h, g
    k = (g.uid, h.uid)
    out = _sum_memo.get(k)
    if out is None:
        out = game([tree_add(o, h) for o in g.options] + [tree_add(g, o) for o in h.options])
        _sum_memo[k] = out
    return out


def tree_of(p: HeapPosition | CoinPosition, ruleset=None) -> GameTree:
    """Explicit game tree of a position (shared subtrees are interned)."""
    if isinstance(p, CoinPosition):
        ruleset = p.board
    if ruleset is None:
        raise TypeError("tree_of needs a ruleset for heap positions")
    memo: dict[tuple, GameTree] = {}
    stack = [p.key]
    while stack:
        k = stack[-1]
        if k in memo:
            stack.pop()
            continue
        opts = key_options(ruleset, k)
        pending = [o for o in opts if o not in memo]
        if pending:
            stack.extend(pending)
        else:
            stack.pop()
            memo[k] = game(memo[o] for o in opts)
    return memo[p.key]


def position_key(p) -> tuple:
    if isinstance(p, (HeapPosition, CoinPosition)):
        return p.key
    if isinstance(p, tuple):
        return p
    return HeapPosition(p).key
