"""Finite commutative monoids: presentations, enumeration, normal forms, isomorphism."""
from __future__ import annotations

import re
import string
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .games import ParseError

Word = tuple[int, ...]  # exponent vector over a generator list


class BudgetExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# words

_FACTOR = re.compile(r"([A-Za-z])(\d*)")


def parse_word(text: str, generators: Sequence[str]) -> Word:
    """``"ab2c"`` -> exponent vector; ``"1"`` is the identity."""
    s = text.strip().replace("^", "")
    exps = [0] * len(generators)
    if s == "1":
        return tuple(exps)
    if not s:
        raise ParseError("empty word")
    pos = 0
    while pos < len(s):
        m = _FACTOR.match(s, pos)
        if not m:
            raise ParseError(f"malformed word {text!r} at {s[pos:]!r}")
        letter, power = m.group(1), m.group(2)
        if letter not in generators:
            raise ParseError(f"unknown generator {letter!r} in {text!r}")
        exps[generators.index(letter)] += int(power) if power else 1
        pos = m.end()
    return tuple(exps)


def format_word(word: Word, generators: Sequence[str]) -> str:
    parts = []
    for g, e in zip(generators, word):
        if e == 1:
            parts.append(g)
        elif e > 1:
            parts.append(f"{g}{e}")
    return "".join(parts) or "1"


def word_key(word: Word) -> tuple:
    """Graded lexicographic order: total degree, then the spelled-out letters."""
    spelled = tuple(i for i, e in enumerate(word) for _ in range(e))
    return (sum(word), spelled)


def _add(u: Word, v: Word) -> Word:
    return tuple(a + b for a, b in zip(u, v))


# ---------------------------------------------------------------------------
# presentations

@dataclass(frozen=True)
class MonoidPresentation:
    generators: tuple[str, ...]
    relations: tuple[tuple[Word, Word], ...]
    p_words: tuple[Word, ...] | None = None

    def __post_init__(self):
        n = len(self.generators)
        if len(set(self.generators)) != n:
            raise ValueError("duplicate generators")
        for lhs, rhs in self.relations:
            if len(lhs) != n or len(rhs) != n:
                raise ValueError("relation word length does not match generator count")

    def word(self, text: str) -> Word:
        return parse_word(text, self.generators)

    def __str__(self):
        rels = ",".join(
            f"{format_word(l, self.generators)}={format_word(r, self.generators)}" for l, r in self.relations
        )
        return "{" + ",".join(self.generators) + " | " + rels + "}"


def parse_presentation(text: str) -> MonoidPresentation:
    """Parse ``gens:``/``rel:``/``P:`` lines (``#`` starts a comment).

    ``/`` also separates lines, so one-line presentations are accepted.
    """
    gens = None
    rels_raw: list[tuple[int, str]] = []
    p_raw: list[tuple[int, str]] = []
    lines = [seg for raw in text.splitlines() for seg in raw.split("#", 1)[0].split("/")]
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        head, sep, body = line.partition(":")
        head = head.strip()
        if not sep:
            raise ParseError(f"line {lineno}: expected 'gens:', 'rel:' or 'P:'")
        if head == "gens":
            names = body.split()
            if not names or any(not re.fullmatch(r"[A-Za-z]", g) for g in names):
                raise ParseError(f"line {lineno}: generators must be single letters")
            gens = tuple(names)
        elif head == "rel":
            rels_raw.extend((lineno, r) for r in body.split(","))
        elif head == "P":
            p_raw.extend((lineno, w) for w in body.replace(",", " ").split())
        else:
            raise ParseError(f"line {lineno}: unknown directive {head!r}")
    if gens is None:
        raise ParseError("missing 'gens:' line")
    relations = []
    for lineno, r in rels_raw:
        if r.count("=") != 1:
            raise ParseError(f"line {lineno}: malformed relation {r.strip()!r}")
        lhs, rhs = r.split("=")
        try:
            relations.append((parse_word(lhs, gens), parse_word(rhs, gens)))
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    p_words = None
    if p_raw:
        try:
            p_words = tuple(parse_word(w, gens) for _, w in p_raw)
        except ParseError as exc:
            raise ParseError(f"line {p_raw[0][0]}: {exc}") from None
    return MonoidPresentation(gens, tuple(relations), p_words)


def format_presentation(pres: MonoidPresentation) -> str:
    g = pres.generators
    lines = ["gens: " + " ".join(g)]
    lines += [f"rel: {format_word(l, g)}={format_word(r, g)}" for l, r in pres.relations]
    if pres.p_words is not None:
        lines.append("P: " + " ".join(format_word(w, g) for w in pres.p_words))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# finite monoids

@dataclass(frozen=True, eq=False)
class FiniteMonoid:
    """Commutative monoid on ``0..order-1`` with identity 0.

    ``gen_elements[i]`` is the element of generator ``generators[i]``;
    ``words[e]`` is the graded-lex least word of element ``e``.
    """

    table: tuple[tuple[int, ...], ...]
    generators: tuple[str, ...] = ()
    gen_elements: tuple[int, ...] = ()
    p_subset: frozenset[int] | None = None
    words: tuple[Word, ...] = field(default=())

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    def evaluate(self, word: Word) -> int:
        e = 0
        for g, k in zip(self.gen_elements, word):
            for _ in range(k):
                e = self.table[e][g]
        return e

    def element(self, text: str) -> int:
        return self.evaluate(parse_word(text, self.generators))

    def name(self, e: int) -> str:
        if self.words:
            return format_word(self.words[e], self.generators)
        return f"#{e}"

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.name(e) for e in range(self.order))

    def is_p(self, e: int) -> bool:
        return self.p_subset is not None and e in self.p_subset

    def power(self, e: int, k: int) -> int:
        out = 0
        for _ in range(k):
            out = self.table[out][e]
        return out

    def sorted_names(self, elements) -> list[str]:
        """Names ordered by exponent vector, last generator most significant."""
        return [self.name(e) for e in sorted(elements, key=lambda e: tuple(reversed(self.words[e])) if self.words else e)]


def canonical_words(
    order: int,
    gen_elements: Sequence[int],
    mul: Callable[[int, int], int],
    reducible: Callable[[Word], bool] | None = None,
) -> list[Word | None]:
    """Least word for every element reachable from the generators.

    Words are ranked by graded-lex order; when ``reducible`` is given, words
    it accepts rank after all words it rejects.  ``reducible`` must be
    monotone (a word containing a reducible word is reducible).
    """
    n = len(gen_elements)
    flag = reducible or (lambda w: False)

    def rank(w):
        return (flag(w),) + word_key(w)

    unit = (0,) * n
    best: list[Word | None] = [None] * order
    best[0] = unit
    frontier: dict[tuple[int, int, bool], Word] = {(0, 0, False): unit}
    seen_upto = {0}
    for _ in range(2 * order + 8):
        nxt: dict[tuple[int, int, bool], Word] = {}
        for (e, last, red), w in frontier.items():
            for gi in range(last, n):
                f = mul(e, gen_elements[gi])
                w2 = w[:gi] + (w[gi] + 1,) + w[gi + 1:]
                st = (f, gi, red or flag(w2))
                old = nxt.get(st)
                if old is None or word_key(w2) < word_key(old):
                    nxt[st] = w2
        reached = {st[0] for st in nxt}
        for (f, _, _), w in nxt.items():
            if best[f] is None or rank(w) < rank(best[f]):
                best[f] = w
        grew = not reached <= seen_upto
        seen_upto |= reached
        if not grew and not any(not st[2] for st in nxt):
            break
        frontier = nxt
    return best


def make_monoid(
    table: Sequence[Sequence[int]],
    generators: Sequence[str],
    gen_elements: Sequence[int],
    p_subset=None,
    reducible: Callable[[Word], bool] | None = None,
) -> FiniteMonoid:
    table = tuple(tuple(row) for row in table)
    words = canonical_words(len(table), gen_elements, lambda x, y: table[x][y], reducible)
    if any(w is None for w in words):
        raise ValueError("generators do not generate the whole monoid")
    return FiniteMonoid(
        table,
        tuple(generators),
        tuple(gen_elements),
        None if p_subset is None else frozenset(p_subset),
        tuple(words),
    )


def check_axioms(m: FiniteMonoid) -> None:
    """Raise ``AssertionError`` unless identity, commutativity and associativity hold."""
    t = m.table
    n = m.order
    for x in range(n):
        if t[0][x] != x or t[x][0] != x:
            raise AssertionError(f"element 0 is not an identity at {m.name(x)}")
        for y in range(x + 1, n):
            if t[x][y] != t[y][x]:
                raise AssertionError(f"not commutative at ({m.name(x)}, {m.name(y)})")
    for x in range(n):
        tx = t[x]
        for y in range(n):
            txy = t[tx[y]]
            ty = t[y]
            for z in range(n):
                if txy[z] != tx[ty[z]]:
                    raise AssertionError(f"not associative at ({m.name(x)}, {m.name(y)}, {m.name(z)})")


# ---------------------------------------------------------------------------
# enumeration from a presentation

def _words_upto(ngens: int, degree: int) -> list[Word]:
    out = []

    def rec(prefix, remaining, i):
        if i == ngens:
            out.append(tuple(prefix))
            return
        for e in range(remaining + 1):
            prefix.append(e)
            rec(prefix, remaining - e, i + 1)
            prefix.pop()

    rec([], degree, 0)
    return out


def enumerate_monoid(pres: MonoidPresentation, cap: int = 10_000, max_degree: int = 40) -> FiniteMonoid:
    """Finite monoid presented by ``pres``.

    Words of bounded degree are merged with a union-find along every relation
    instance that fits below the bound.  The classes of low-degree words give a
    candidate table, which is accepted only if it is closed, commutative,
    associative and satisfies every relation; in that case it is exactly the
    presented monoid.  Otherwise the bound grows by two.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    n = len(pres.generators)
    rel_deg = max((max(sum(l), sum(r)) for l, r in pres.relations), default=1)
    degree = 2 * rel_deg
    last_error = None
    while degree <= max_degree:
        result = _try_enumerate(pres, n, degree, rel_deg, cap)
        if isinstance(result, FiniteMonoid):
            return result
        last_error = result
        degree += 2
    raise BudgetExceeded(
        f"presentation did not close below degree {max_degree} ({last_error}); possibly infinite or cap too small"
    )


def _try_enumerate(pres, n, degree, rel_deg, cap):
    words = _words_upto(n, degree)
    index = {w: i for i, w in enumerate(words)}
    parent = list(range(len(words)))

    def find(i):
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:
            parent[i], i = root, parent[i]
        return root

    for lhs, rhs in pres.relations:
        span = max(sum(lhs), sum(rhs))
        for w in words:
            if sum(w) + span > degree:
                continue
            a, b = find(index[_add(w, lhs)]), find(index[_add(w, rhs)])
            if a != b:
                parent[max(a, b)] = min(a, b)

    core_deg = degree - rel_deg
    core = [w for w in words if sum(w) <= core_deg]
    rep: dict[int, Word] = {}
    for w in sorted(core, key=word_key):
        rep.setdefault(find(index[w]), w)
    if len(rep) > cap:
        raise BudgetExceeded(f"more than {cap} classes; possibly infinite or cap too small")
    roots = sorted(rep, key=lambda r: word_key(rep[r]))
    elem = {r: i for i, r in enumerate(roots)}
    unit = tuple([0] * n)
    if elem.get(find(index[unit])) != 0:
        return "identity is not the least class"
    gen_words = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    trans = []
    for r in roots:
        row = []
        for g in gen_words:
            target = elem.get(find(index[_add(rep[r], g)]))
            if target is None:
                return f"degree {degree}: class of {rep[r]}+{g} has no low-degree word"
            row.append(target)
        trans.append(row)
    order = len(roots)
    gen_el = [trans[0][i] for i in range(n)]
    table = []
    for x in range(order):
        row = []
        for y in range(order):
            e = x
            for gi, k in enumerate(rep[roots[y]]):
                for _ in range(k):
                    e = trans[e][gi]
            row.append(e)
        table.append(row)
    p_subset = None
    m = FiniteMonoid(tuple(map(tuple, table)), pres.generators, tuple(gen_el))
    if pres.p_words is not None:
        p_subset = frozenset(m.evaluate(w) for w in pres.p_words)
    try:
        check_axioms(m)
    except AssertionError as exc:
        return f"degree {degree}: {exc}"
    for lhs, rhs in pres.relations:
        if m.evaluate(lhs) != m.evaluate(rhs):
            return f"degree {degree}: relation fails"
    return make_monoid(table, pres.generators, gen_el, p_subset, reducible=_lhs_divides(pres))


def _lhs_divides(pres: MonoidPresentation) -> Callable[[Word], bool]:
    """Predicate: the word contains the left side of some non-trivial relation."""
    lhs = [l for l, r in pres.relations if l != r and any(l)]

    def reducible(w: Word) -> bool:
        return any(all(a >= b for a, b in zip(w, l)) for l in lhs)

    return reducible


def normal_form(m: FiniteMonoid, w: Word | str | Mapping[str, int]) -> str:
    """Canonical word of the class of ``w``."""
    return m.name(m.evaluate(_coerce_word(m, w)))


def _coerce_word(m: FiniteMonoid, w) -> Word:
    if isinstance(w, str):
        return parse_word(w, m.generators)
    if isinstance(w, Mapping):
        for g in w:
            if g not in m.generators:
                raise ValueError(f"unknown generator {g!r}")
        return tuple(w.get(g, 0) for g in m.generators)
    w = tuple(w)
    if len(w) != len(m.generators):
        raise ValueError("word length does not match generator count")
    return w


def verify_relation(m: FiniteMonoid, lhs, rhs) -> bool:
    return m.evaluate(_coerce_word(m, lhs)) == m.evaluate(_coerce_word(m, rhs))


def tame_quotient(n: int) -> FiniteMonoid:
    """The tame quotient with ``2**n + 2`` elements; P-portion {a, b²}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return enumerate_monoid(parse_presentation("gens: a\nrel: a2=1\nP: a"))
    gens = ["a"] + list(string.ascii_lowercase[1:n])
    lines = ["gens: " + " ".join(gens), "rel: a2=1"]
    lines += [f"rel: {x}3={x}" for x in gens[1:]]
    lines += [f"rel: {x}2=b2" for x in gens[2:]]
    lines.append("P: a b2")
    return enumerate_monoid(parse_presentation("\n".join(lines)))


def power_relation(m: FiniteMonoid, e: int) -> int | None:
    """Least ``k`` with ``e^(k+2) == e^k`` (``k <= order``), else ``None``."""
    powers = [0]
    for _ in range(m.order + 2):
        powers.append(m.mul(powers[-1], e))
    for k in range(m.order + 1):
        if powers[k + 2] == powers[k]:
            return k
    return None


# ---------------------------------------------------------------------------
# isomorphism

def _profile(m: FiniteMonoid, e: int):
    seen = {}
    x, k = 0, 0
    while x not in seen:
        seen[x] = k
        x = m.mul(x, e)
        k += 1
    index, period = seen[x], k - seen[x]
    return (index, period, m.is_p(e) if m.p_subset is not None else None)


def generating_set(m: FiniteMonoid) -> list[int]:
    if m.gen_elements:
        return list(m.gen_elements)
    gens: list[int] = []
    reach = {0}
    for e in range(m.order):
        if e not in reach:
            gens.append(e)
            reach = _closure(m, gens)
    return gens


def _closure(m: FiniteMonoid, gens) -> set[int]:
    reach = {0}
    queue = [0]
    while queue:
        x = queue.pop()
        for g in gens:
            y = m.mul(x, g)
            if y not in reach:
                reach.add(y)
                queue.append(y)
    return reach


def isomorphic(m1: FiniteMonoid, m2: FiniteMonoid) -> dict[int, int] | None:
    """An isomorphism ``m1 -> m2`` as an element map, or ``None``.

    When both monoids carry P-portions the map must carry one onto the other.
    """
    if m1.order != m2.order:
        return None
    use_p = m1.p_subset is not None and m2.p_subset is not None
    if use_p and len(m1.p_subset) != len(m2.p_subset):
        return None
    gens = generating_set(m1)
    prof2: dict = {}
    for y in range(m2.order):
        p = _profile(m2, y)
        if not use_p:
            p = p[:2]
        prof2.setdefault(p, []).append(y)
    candidates = []
    for g in gens:
        p = _profile(m1, g)
        if not use_p:
            p = p[:2]
        candidates.append(prof2.get(p, []))

    def extend(mapping: dict, inverse: dict, assigned: list[tuple[int, int]]):
        mapping, inverse = dict(mapping), dict(inverse)
        queue = list(mapping)
        while queue:
            x = queue.pop()
            fx = mapping[x]
            for g, h in assigned:
                y, fy = m1.mul(x, g), m2.mul(fx, h)
                if y in mapping:
                    if mapping[y] != fy:
                        return None
                    continue
                if fy in inverse:
                    return None
                if use_p and (y in m1.p_subset) != (fy in m2.p_subset):
                    return None
                mapping[y] = fy
                inverse[fy] = y
                queue.append(y)
        return mapping, inverse

    def search(i, mapping, inverse, assigned):
        if i == len(gens):
            if len(mapping) != m1.order:
                return None
            for x in range(m1.order):
                for y in range(x, m1.order):
                    if mapping[m1.mul(x, y)] != m2.mul(mapping[x], mapping[y]):
                        return None
            return mapping
        for h in candidates[i]:
            ext = extend(mapping, inverse, assigned + [(gens[i], h)])
            if ext is None:
                continue
            found = search(i + 1, ext[0], ext[1], assigned + [(gens[i], h)])
            if found is not None:
                return found
        return None

    return search(0, {0: 0}, {0: 0}, [])


def derive_presentation(m: FiniteMonoid) -> MonoidPresentation:
    """Presentation whose relations rewrite each minimal non-normal word.

    A word is minimal non-normal when it is not a canonical word but every
    word obtained by dropping one letter is.  Completeness is not automatic;
    :func:`presentation_of` checks it by re-enumerating.
    """
    canon = set(m.words)
    n = len(m.generators)
    rels: dict[Word, Word] = {}
    for w in m.words:
        for i in range(n):
            v = tuple(e + (k == i) for k, e in enumerate(w))
            if v in canon or v in rels:
                continue
            if all(tuple(e - (k == j) for k, e in enumerate(v)) in canon for j in range(n) if v[j]):
                rels[v] = m.words[m.evaluate(v)]
    colex = lambda v: tuple(reversed(v))
    p_words = None
    if m.p_subset is not None:
        p_words = tuple(sorted((m.words[e] for e in m.p_subset), key=colex))
    return MonoidPresentation(m.generators, tuple((v, rels[v]) for v in sorted(rels, key=colex)), p_words)


def presentation_of(m: FiniteMonoid) -> MonoidPresentation | None:
    """Derived presentation, or ``None`` if it fails to reproduce ``m``."""
    pres = derive_presentation(m)
    try:
        m2 = enumerate_monoid(pres, cap=max(4 * m.order, 64))
    except (BudgetExceeded, ValueError):
        return None
    return pres if isomorphic(m, m2) is not None else None
