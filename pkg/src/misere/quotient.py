"""Misère indistinguishability quotients over bounded position universes.

Positions are classified by their *signature*: the outcomes of ``g + x`` for
every test position ``x`` in the envelope.  Classes are discovered by a
best-first closure from the endgame under adding one unit at a time, so every
class representative is the lightest position found in its class.  Class
representatives join the tests and the closure is repeated until the set of
classes stops changing; the result is then checked for sum compatibility,
monoid axioms and agreement with the outcome oracle before it is returned.
"""
from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .games import (
    CoinPosition,
    DagBoard,
    HeapPosition,
    OctalCode,
    ParseError,
    _merge,
    key_options,
    key_weight,
    position_key,
)
from .monoid import (
    FiniteMonoid,
    MonoidPresentation,
    check_axioms,
    enumerate_monoid,
    isomorphic,
    make_monoid,
    parse_word,
)
from .outcomes import MISERE, Outcome, check_play, solve_p, _p_memo

log = logging.getLogger(__name__)

GENERATOR_LETTERS = "abcdefghijklmnopqrstuvwxyz"


class QuotientError(RuntimeError):
    """A consistency check failed; the message names the violating data."""


# ---------------------------------------------------------------------------
# universes

@dataclass(frozen=True)
class Universe:
    """Bounded set of positions of one ruleset.

    ``max_single`` bounds heap sizes (octal games) or, for boards, is an
    optional collection of node ids (default: every non-terminal node).
    Member positions have per-unit multiplicity at most ``mult_cap`` and test
    positions at most ``2 * mult_cap``; both have total weight (beans, or coin
    heights) at most ``max_weight``.
    """

    ruleset: OctalCode | DagBoard
    max_single: int | tuple | None = None
    mult_cap: int = 4
    max_weight: int | None = None
    play: str = MISERE

    def __post_init__(self):
        if self.mult_cap < 1:
            raise ValueError("mult_cap must be >= 1")
        object.__setattr__(self, "play", check_play(self.play))
        if isinstance(self.ruleset, OctalCode):
            if not isinstance(self.max_single, int) or self.max_single < 1:
                raise ValueError("octal universes need an integer max_single >= 1")
        elif isinstance(self.max_single, (list, set, frozenset)):
            object.__setattr__(self, "max_single", tuple(self.max_single))

    @property
    def units(self) -> tuple:
        if isinstance(self.ruleset, OctalCode):
            return tuple(range(1, self.max_single + 1))
        nodes = self.ruleset.interior
        if self.max_single is None:
            return nodes
        chosen = set(self.max_single)
        return tuple(v for v in nodes if v in chosen)

    @property
    def weight_bound(self) -> int:
        if self.max_weight is not None:
            return self.max_weight
        top = max((self.ruleset.unit_weight(u) for u in self.units), default=0)
        return top + max(4, top // 2)

    def with_weight(self, w: int) -> "Universe":
        return Universe(self.ruleset, self.max_single, self.mult_cap, w, self.play)

    def with_mult_cap(self, c: int) -> "Universe":
        return Universe(self.ruleset, self.max_single, c, self.max_weight, self.play)

    def wrap(self, key: tuple):
        if isinstance(self.ruleset, DagBoard):
            return CoinPosition.from_key(self.ruleset, key)
        return HeapPosition.from_key(key)

    def members(self, max_weight: int | None = None) -> list[tuple]:
        return envelope(self.ruleset, self.units, self.weight_bound if max_weight is None else max_weight, self.mult_cap)

    def tests(self) -> list[tuple]:
        return envelope(self.ruleset, self.units, self.weight_bound, 2 * self.mult_cap)


def envelope(ruleset, units: Sequence, max_weight: int, mult_cap: int) -> list[tuple]:
    """All multisets of ``units`` within the weight and multiplicity bounds."""
    weights = [ruleset.unit_weight(u) for u in units]
    out: list[tuple] = []

    def rec(i, remaining, acc):
        if i == len(units):
            out.append(tuple(sorted(acc)))
            return
        for m in range(mult_cap + 1):
            if m * weights[i] > remaining:
                break
            rec(i + 1, remaining - m * weights[i], acc + [units[i]] * m)

    rec(0, max_weight, [])
    out.sort(key=lambda k: (key_weight(ruleset, k), k))
    return out


# ---------------------------------------------------------------------------
# pretending functions

@dataclass(frozen=True)
class PhiTable:
    """Map from single units to quotient elements, optionally periodic.

    ``period = (i0, p)`` asserts ``phi(n + p) == phi(n)`` for ``n >= i0`` and
    lets heap sizes beyond the table be looked up.
    """

    values: Mapping
    period: tuple[int, int] | None = None

    def __call__(self, unit):
        if unit in self.values:
            return self.values[unit]
        if self.period is not None and isinstance(unit, int):
            i0, p = self.period
            top = max(self.values)
            if unit > top and unit >= i0:
                n = unit - p * ((unit - top + p - 1) // p)
                if n >= i0 and n in self.values:
                    return self.values[n]
        raise KeyError(f"no pretending-function value for unit {unit!r}")

    def __contains__(self, unit):
        try:
            self(unit)
        except KeyError:
            return False
        return True

    def units(self) -> list:
        return list(self.values)


def parse_phi(text: str, monoid: FiniteMonoid) -> PhiTable:
    """Parse ``<unit> <word>`` lines with an optional ``period: <i0> <p>`` footer."""
    values = {}
    period = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("period:"):
            parts = line[len("period:"):].split()
            if len(parts) != 2 or not all(p.isdigit() for p in parts):
                raise ParseError(f"line {lineno}: malformed period footer")
            period = (int(parts[0]), int(parts[1]))
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected '<unit> <word>'")
        unit = int(parts[0]) if parts[0].isdigit() else parts[0]
        try:
            values[unit] = monoid.evaluate(parse_word(parts[1], monoid.generators))
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    return PhiTable(values, period)


def format_phi(phi: PhiTable, monoid: FiniteMonoid) -> str:
    lines = [f"{u} {monoid.name(e)}" for u, e in phi.values.items()]
    if phi.period is not None:
        lines.append(f"period: {phi.period[0]} {phi.period[1]}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# results

@dataclass(frozen=True)
class QuotientResult:
    monoid: FiniteMonoid | None
    phi: PhiTable
    universe: Universe | None = None
    representatives: tuple = ()
    verified: bool = True
    checks: tuple[str, ...] = ()
    phi_period: tuple[int, int] | None = None
    tests: tuple = field(default=(), repr=False, compare=False)
    partial_p: frozenset = frozenset()

    @property
    def complete(self) -> bool:
        return self.monoid is not None

    @property
    def p_subset(self) -> frozenset[int]:
        if self.monoid is None:
            return self.partial_p
        return self.monoid.p_subset or frozenset()

    @property
    def order(self) -> int:
        return len(self.representatives) if self.monoid is None else self.monoid.order

    def element_of(self, position) -> int:
        e = 0
        for u in position_key(position):
            e = self.monoid.mul(e, self.phi(u))
        return e

    def phi_words(self) -> list[str]:
        return [self.monoid.name(self.phi(u)) for u in self.phi.units()]


@dataclass(frozen=True)
class DistinguishingWitness:
    x: HeapPosition | CoinPosition
    outcome_g: Outcome
    outcome_h: Outcome


# ---------------------------------------------------------------------------
# construction

class _Signer:
    def __init__(self, universe: Universe):
        self.ruleset = universe.ruleset
        self.misere = universe.play == MISERE
        self.memo = _p_memo(universe.ruleset, universe.play)
        rs = self.ruleset
        self.options = lambda k: key_options(rs, k)

    def is_p(self, key: tuple) -> bool:
        v = self.memo.get(key)
        if v is None:
            v = solve_p(self.options, key, self.memo, self.misere)
        return v

    def signature(self, key: tuple, tests: Sequence[tuple]) -> bytes:
        is_p = self.is_p
        return bytes(is_p(_merge(key, x) if x else key) for x in tests)


def _closure(universe: Universe, signer: _Signer, tests, max_elements: int):
    rs = universe.ruleset
    units = universe.units
    sig_index: dict[bytes, int] = {}
    reps: list[tuple] = []
    trans: list[dict] = []
    heap: list = [(0, (), -1, None)]
    counter = 0
    while heap:
        _, key, parent, unit = heapq.heappop(heap)
        s = signer.signature(key, tests)
        e = sig_index.get(s)
        if e is None:
            e = len(reps)
            if e >= max_elements:
                return reps, trans, sig_index, False
            sig_index[s] = e
            reps.append(key)
            trans.append({})
            for u in units:
                k2 = _merge(key, (u,))
                counter += 1
                heapq.heappush(heap, (key_weight(rs, k2), k2, e, u))
        if parent >= 0:
            trans[parent][unit] = e
    return reps, trans, sig_index, True


def build_quotient(
    universe: Universe,
    *,
    max_elements: int = 400,
    max_rounds: int = 12,
    check_weight: int | None = None,
    stabilize: bool = False,
) -> QuotientResult:
    """Indistinguishability quotient of ``universe``.

    With ``stabilize`` the multiplicity cap is raised one step at a time
    until two consecutive caps give isomorphic quotients with the same
    pretending function.
    """
    if not stabilize:
        return _build(universe, max_elements, max_rounds, check_weight)
    q = _build(universe, max_elements, max_rounds, check_weight)
    if not q.complete:
        return q
    for _ in range(4):
        wider = universe.with_mult_cap(universe.mult_cap + 1)
        q2 = _build(wider, max_elements, max_rounds, check_weight)
        if not q2.complete:
            return q2
        if q2.verified and same_quotient(q, q2):
            return q2
        universe, q = wider, q2
    return replace(q, verified=False, checks=q.checks + ("not stable under a larger multiplicity cap",))


def same_quotient(q1: QuotientResult, q2: QuotientResult) -> bool:
    iso = isomorphic(q1.monoid, q2.monoid)
    if iso is None:
        return False
    units = [u for u in q1.phi.units() if u in q2.phi]
    return all(iso[q1.phi(u)] == q2.phi(u) for u in units)


def _build(universe: Universe, max_elements: int, max_rounds: int, check_weight: int | None) -> QuotientResult:
    rs = universe.ruleset
    signer = _Signer(universe)
    base_tests = universe.tests()
    tests = list(base_tests)
    known = set(tests)
    converged = False
    for rnd in range(max_rounds):
        reps, trans, sig_index, complete = _closure(universe, signer, tests, max_elements)
        if not complete:
            return _partial(universe, signer, reps, trans, max_elements)
        fresh = [r for r in reps if r not in known]
        log.debug("round %d: %d classes, %d new test positions", rnd, len(reps), len(fresh))
        if not fresh:
            converged = True
            break
        tests.extend(fresh)
        known.update(fresh)
    order = len(reps)
    units = universe.units
    notes = []

    def act(e: int, key: tuple) -> int:
        for u in key:
            e = trans[e][u]
        return e

    table = [[act(x, reps[y]) for y in range(order)] for x in range(order)]
    verified = True

    # (a) sums of representatives land in the class the table predicts
    for x in range(order):
        for y in range(x, order):
            s = signer.signature(_merge(reps[x], reps[y]), tests)
            if sig_index.get(s) != table[x][y]:
                raise QuotientError(
                    f"sum compatibility fails for representatives {reps[x]} + {reps[y]}"
                )
    p_subset = frozenset(e for e in range(order) if signer.is_p(reps[e]))
    # (c) identity is the endgame class, and it is not a P class in misère play
    if reps[0] != ():
        raise QuotientError("identity class is not the endgame class")
    if universe.play == MISERE and 0 in p_subset:
        raise QuotientError("endgame class marked P")

    gens_units = _generator_units(units, trans, table)
    names = [GENERATOR_LETTERS[i] for i in range(len(gens_units))]
    gen_elements = [trans[0][u] for u in gens_units]
    monoid = make_monoid(table, names, gen_elements, p_subset)
    try:
        check_axioms(monoid)
    except AssertionError as exc:
        raise QuotientError(str(exc)) from None
    phi = PhiTable({u: trans[0][u] for u in units})

    # (b)+(d) outcome constant per class on member positions via multiplicative phi
    cw = check_weight if check_weight is not None else universe.weight_bound
    for key in universe.members(cw):
        e = act(0, key)
        if signer.is_p(key) != (e in p_subset):
            raise QuotientError(
                f"position {universe.wrap(key)} has outcome {'P' if signer.is_p(key) else 'N'} "
                f"but its class {monoid.name(e)} says otherwise"
            )
    notes.append(f"checked {len(tests)} tests, {order} classes, members up to weight {cw}")
    if not converged:
        verified = False
        notes.append(f"class representatives still changing after {max_rounds} rounds")
    q = QuotientResult(monoid, phi, universe, tuple(universe.wrap(r) for r in reps), verified,
                       tuple(notes), tests=tuple(tests))
    return replace(q, phi_period=phi_period(q) if isinstance(rs, OctalCode) else None)


def _partial(universe, signer, reps, trans, max_elements) -> QuotientResult:
    """Finest partition found before the class budget ran out; unverified."""
    phi = PhiTable({u: trans[0][u] for u in universe.units if u in trans[0]})
    return QuotientResult(
        None,
        phi,
        universe,
        tuple(universe.wrap(r) for r in reps),
        False,
        (f"class budget {max_elements} exhausted; at least {len(reps)} classes",),
        partial_p=frozenset(e for e, r in enumerate(reps) if signer.is_p(r)),
    )


def _generator_units(units: Sequence, trans: list[dict], table) -> list:
    """Units whose classes form an irredundant generating set.

    Scanning from the last unit backwards, a unit is dropped when its class
    is the identity or lies in the submonoid generated by the remaining units.
    """
    kept = list(units)
    for u in reversed(units):
        e = trans[0][u]
        others = {trans[0][v] for v in kept if v != u}
        if e == 0 or e in _submonoid(table, others):
            kept.remove(u)
    return kept


def _submonoid(table, gens) -> set[int]:
    reach = {0}
    queue = [0]
    while queue:
        x = queue.pop()
        for g in gens:
            y = table[x][g]
            if y not in reach:
                reach.add(y)
                queue.append(y)
    return reach


def phi_period(q: QuotientResult) -> tuple[int, int] | None:
    """Smallest empirical ``(preperiod, period)`` of a pretending function on heaps.

    The period must hold on at least ``2 * period`` consecutive tabulated
    heaps; this is evidence, not proof.
    """
    values = q.phi.values
    units = sorted(u for u in values if isinstance(u, int))
    if not units or units != list(range(units[0], units[-1] + 1)):
        return None
    first, last = units[0], units[-1]
    for p in range(1, last - first + 1):
        for i0 in range(first, last + 1):
            span = last - p - i0 + 1
            if span < 2 * p:
                break
            if all(values[n + p] == values[n] for n in range(i0, last - p + 1)):
                return i0, p
    return None


def extend_phi(q: QuotientResult, upto: int) -> QuotientResult:
    """Classify heaps beyond the universe against the quotient's own tests.

    Heap ``n`` is assigned the class whose representative agrees with it on
    every test; a heap matching no class means the quotient grows there.
    """
    u = q.universe
    if u is None or not isinstance(u.ruleset, OctalCode):
        raise TypeError("extend_phi needs a quotient built over an octal universe")
    signer = _Signer(u)
    reps = [position_key(r) for r in q.representatives]
    index = {signer.signature(r, q.tests): e for e, r in enumerate(reps)}
    values = dict(q.phi.values)
    for n in range(max(values) + 1, upto + 1):
        e = index.get(signer.signature((n,), q.tests))
        if e is None:
            raise QuotientError(f"heap {n} is distinguishable from every class; the quotient grows there")
        values[n] = e
    q2 = replace(q, phi=PhiTable(values))
    return replace(q2, phi_period=phi_period(q2))


def partial_quotient_trace(code: OctalCode, upto: int, **kwargs) -> list[tuple[int, QuotientResult]]:
    """Partial quotients for heaps ``<= n``, ``n = 1..upto``, kept where they change."""
    mult_cap = kwargs.pop("mult_cap", 4)
    play = kwargs.pop("play", MISERE)
    max_weight = kwargs.pop("max_weight", None)
    out: list[tuple[int, QuotientResult]] = []
    prev = None
    for n in range(1, upto + 1):
        u = Universe(code, n, mult_cap, max_weight, play)
        q = build_quotient(u, **kwargs)
        if not q.complete:
            out.append((n, q))
            break
        if prev is None or prev.order != q.order or isomorphic(prev.monoid, q.monoid) is None:
            out.append((n, q))
        prev = q
    return out


# ---------------------------------------------------------------------------
# queries

def distinguish(g, h, universe: Universe) -> DistinguishingWitness | None:
    """Least test ``x`` (by weight, then units) with ``g + x`` and ``h + x`` of different outcome."""
    signer = _Signer(universe)
    gk, hk = position_key(g), position_key(h)
    for x in universe.tests():
        a = signer.is_p(_merge(gk, x))
        b = signer.is_p(_merge(hk, x))
        if a != b:
            to = lambda v: Outcome.P if v else Outcome.N
            return DistinguishingWitness(universe.wrap(x), to(a), to(b))
    return None


def outcome_via_quotient(q: QuotientResult, p) -> Outcome:
    e = q.element_of(p)
    return Outcome.P if e in q.p_subset else Outcome.N


# ---------------------------------------------------------------------------
# verification of published solutions

@dataclass
class VerificationReport:
    checks: list[tuple[str, bool, str]] = field(default_factory=list)
    counterexample: object = None
    witness: object = None

    def add(self, name: str, ok: bool, detail: str = ""):
        self.checks.append((name, ok, detail))

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def render(self) -> str:
        lines = []
        for name, ok, detail in self.checks:
            line = f"{'PASS' if ok else 'FAIL'} {name}"
            if detail:
                line += f": {detail}"
            lines.append(line)
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines) + "\n"


def expected_quotient(presentation: MonoidPresentation | FiniteMonoid, phi: PhiTable | Mapping) -> QuotientResult:
    monoid = presentation if isinstance(presentation, FiniteMonoid) else enumerate_monoid(presentation)
    if not isinstance(phi, PhiTable):
        phi = PhiTable({u: (monoid.element(w) if isinstance(w, str) else w) for u, w in phi.items()})
    return QuotientResult(monoid, phi)


def verify_solution(
    expected: QuotientResult,
    universe: Universe,
    *,
    brute: QuotientResult | None = None,
    **build_kwargs,
) -> VerificationReport:
    """Check a claimed solution against brute force and the outcome oracle."""
    report = VerificationReport()
    m_exp = expected.monoid
    if brute is None:
        try:
            brute = build_quotient(universe, **build_kwargs)
        except QuotientError as exc:
            report.add("brute-force quotient", False, str(exc))
            brute = None
    iso = None
    if brute is not None and not brute.complete:
        report.add("brute-force quotient", False, brute.checks[-1])
        brute = None
    if brute is not None:
        iso = isomorphic(m_exp, brute.monoid)
        report.add(
            "isomorphic to brute-force quotient",
            iso is not None,
            f"expected order {m_exp.order}, brute-force order {brute.order}",
        )
    if iso is not None:
        bad = None
        for u in universe.units:
            if u not in expected.phi:
                continue
            if iso[expected.phi(u)] != brute.phi(u):
                bad = u
                break
        if bad is None:
            report.add("pretending function matches brute-force classes", True, f"{len(universe.units)} units")
        else:
            claimed = brute.representatives[iso[expected.phi(bad)]]
            w = distinguish(universe.wrap((bad,)), claimed, universe)
            detail = (
                f"unit {bad}: expected {m_exp.name(expected.phi(bad))}, "
                f"brute force gives the class of {brute.monoid.name(brute.phi(bad))}"
            )
            if w is not None:
                detail += f"; {bad} and {claimed} are distinguished by {w.x}"
                report.witness = w.x
            report.add("pretending function matches brute-force classes", False, detail)
    signer = _Signer(universe)
    counter = None
    members = universe.members()
    for key in members:
        if any(u not in expected.phi for u in key):
            continue
        predicted = expected.element_of(key) in expected.p_subset
        if predicted != signer.is_p(key):
            counter = key
            break
    if counter is None:
        report.add("outcomes agree with the misère oracle", True, f"{len(members)} positions")
    else:
        pos = universe.wrap(counter)
        truth = "P" if signer.is_p(counter) else "N"
        report.add(
            "outcomes agree with the misère oracle",
            False,
            f"smallest counterexample {pos}: table says {'N' if truth == 'P' else 'P'}, oracle says {truth}",
        )
    report.counterexample = None if counter is None else universe.wrap(counter)
    return report
