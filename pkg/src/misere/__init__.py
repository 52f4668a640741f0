"""Impartial games under normal and misère play: outcomes, genus symbols,
canonical forms and misère quotient monoids."""
from . import data
from .canonical import CanonicalGame, born_by, canonical_form, census_count, game_name, parse_game
from .games import (
    CoinPosition,
    DagBoard,
    GameTree,
    HeapPosition,
    OctalCode,
    ParseError,
    game,
    nim_heap,
    parse_board,
    parse_octal,
    pascals_beans,
)
from .genus import GenusSymbol, first_wild, genus, genus_sequence, mex_with_carry, parse_genus, tame_add
from .monoid import FiniteMonoid, MonoidPresentation, enumerate_monoid, isomorphic, parse_presentation, tame_quotient
from .outcomes import MISERE, NORMAL, Outcome, grundy, misere_outcome, nim_sequence, normal_outcome, winning_moves
from .quotient import (
    PhiTable,
    QuotientResult,
    Universe,
    build_quotient,
    distinguish,
    expected_quotient,
    outcome_via_quotient,
    partial_quotient_trace,
    verify_solution,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
