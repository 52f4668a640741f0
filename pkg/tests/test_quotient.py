import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from misere import data
from misere.games import HeapPosition, ParseError, parse_octal
from misere.monoid import enumerate_monoid, isomorphic, tame_quotient
from misere.outcomes import Outcome, misere_outcome
from misere.quotient import (
    PhiTable,
    QuotientError,
    Universe,
    build_quotient,
    distinguish,
    envelope,
    expected_quotient,
    extend_phi,
    format_phi,
    outcome_via_quotient,
    parse_phi,
    partial_quotient_trace,
    phi_period,
    same_quotient,
    verify_solution,
)

CODE = parse_octal("0.123")


@pytest.fixture(scope="module")
def q9():
    return build_quotient(Universe(CODE, 9))


def test_0123_quotient(q9):
    assert q9.complete and q9.verified
    assert q9.order == 20
    assert " ".join(q9.phi_words()) == "a 1 b b a d2 1 c d"


@given(st.lists(st.integers(1, 9), max_size=5))
@settings(max_examples=60, deadline=None)
def test_quotient_predicts_outcomes(q9, hs):
    pos = HeapPosition(hs)
    assert outcome_via_quotient(q9, pos) == misere_outcome(pos, CODE)


def test_element_of_is_a_homomorphism(q9):
    m = q9.monoid
    g, h = HeapPosition([3, 4]), HeapPosition([9, 9, 2])
    assert q9.element_of(g + h) == m.mul(q9.element_of(g), q9.element_of(h))


def test_universe_validation():
    with pytest.raises(ValueError):
        Universe(CODE, 0)
    with pytest.raises(ValueError):
        Universe(CODE, 3, mult_cap=0)
    with pytest.raises(ValueError):
        Universe(CODE, 3, play="loopy")
    assert Universe(CODE, 9).weight_bound == 13


def test_envelope_bounds():
    keys = envelope(CODE, (1, 2, 3), 6, 2)
    assert () in keys and (1, 1, 2, 2) in keys
    assert all(sum(k) <= 6 and max(map(k.count, set(k)), default=0) <= 2 for k in keys)
    assert len(set(keys)) == len(keys)


def test_normal_play_quotient():
    q = build_quotient(Universe(CODE, 9, play="normal"))
    assert q.order == 4


def test_nim_gives_tame_quotient():
    q = build_quotient(Universe(parse_octal("0.33"), 2))
    assert isomorphic(q.monoid, tame_quotient(2)) is not None


class TestPhiTable:
    def test_lookup_and_period(self):
        phi = PhiTable({1: 0, 2: 1, 3: 2, 4: 1, 5: 2}, period=(2, 2))
        assert phi(7) == 2 and phi(8) == 1
        assert 100 in phi
        with pytest.raises(KeyError):
            PhiTable({1: 0})(2)

    def test_no_extrapolation_below_preperiod(self):
        phi = PhiTable({3: 1, 4: 2}, period=(3, 2))
        assert 1 not in phi

    def test_text_round_trip(self):
        m = enumerate_monoid(data.presentation("0.123"))
        phi = data.phi("0.123", m)
        again = parse_phi(format_phi(phi, m), m)
        assert again == phi

    @pytest.mark.parametrize("text", ["1 a b", "1 z", "period: 3", "period: x 2"])
    def test_parse_errors(self, text):
        m = enumerate_monoid(data.presentation("0.123"))
        with pytest.raises(ParseError):
            parse_phi(text, m)

    def test_comments_and_blanks(self):
        m = enumerate_monoid(data.presentation("0.123"))
        phi = parse_phi("# heading\n\n1 a  # first\n2 1\n", m)
        assert phi.values == {1: m.element("a"), 2: 0}


class TestPeriods:
    def _q(self, values):
        return expected_quotient(tame_quotient(2), PhiTable(values))

    def test_constant(self):
        assert phi_period(self._q({n: 1 for n in range(1, 6)})) == (1, 1)

    def test_too_short(self):
        assert phi_period(self._q({1: 0, 2: 1, 3: 0})) is None

    def test_0123_extended(self, q9):
        q = extend_phi(q9, 22)
        assert q.phi_period == (5, 5)
        for n in range(10, 23):
            assert outcome_via_quotient(q, HeapPosition([n])) == misere_outcome(HeapPosition([n]), CODE)

    def test_075(self):
        q = extend_phi(build_quotient(Universe(parse_octal("0.75"), 8)), 14)
        assert q.order == 8
        assert q.phi_period[1] == 2

    def test_extend_needs_octal(self):
        board = data.board("heptagon")
        q = build_quotient(Universe(board))
        with pytest.raises(TypeError):
            extend_phi(q, 10)

    def test_extend_detects_growth(self):
        q = build_quotient(Universe(CODE, 3))
        with pytest.raises(QuotientError, match="heap"):
            extend_phi(q, 9)


def test_budget_gives_partial_result():
    q = build_quotient(Universe(CODE, 9), max_elements=10)
    assert not q.complete and not q.verified
    assert q.order >= 10


def test_trace_changes():
    trace = partial_quotient_trace(CODE, 9)
    assert [(n, q.order) for n, q in trace] == [(1, 2), (3, 6), (8, 12), (9, 20)]


def test_trace_stops_on_budget():
    trace = partial_quotient_trace(CODE, 9, max_elements=10)
    assert not trace[-1][1].complete


def test_stabilize(q9):
    q = build_quotient(Universe(CODE, 9, mult_cap=3), stabilize=True)
    assert q.verified and same_quotient(q, q9)


def test_distinguish():
    u = Universe(CODE, 9)
    w = distinguish(HeapPosition([4, 4]), HeapPosition([6]), u)
    assert w.x == HeapPosition([1, 9])
    assert {w.outcome_g, w.outcome_h} == {Outcome.P, Outcome.N}
    assert distinguish(HeapPosition([2]), HeapPosition(), u) is None


class TestVerify:
    def test_published_solution_passes(self, q9):
        m = enumerate_monoid(data.presentation("0.123"))
        rep = verify_solution(expected_quotient(m, data.phi("0.123", m)), Universe(CODE, 9), brute=q9)
        assert rep.passed, rep.render()
        assert rep.render().endswith("PASS\n")

    def test_altered_phi_fails_with_witness(self, q9):
        m = enumerate_monoid(data.presentation("0.123"))
        phi = data.phi("0.123", m)
        values = dict(phi.values)
        values[6] = m.element("a")
        rep = verify_solution(expected_quotient(m, PhiTable(values)), Universe(CODE, 9), brute=q9)
        assert not rep.passed
        # heap 1 is the lightest member of class a
        w = rep.witness
        assert misere_outcome(HeapPosition([6]) + w, CODE) != misere_outcome(HeapPosition([1]) + w, CODE)
        assert rep.counterexample is not None
        assert rep.render().endswith("FAIL\n")

    def test_wrong_monoid(self, q9):
        m = tame_quotient(2)
        rep = verify_solution(expected_quotient(m, {n: 0 for n in range(1, 10)}), Universe(CODE, 9), brute=q9)
        assert not rep.passed
