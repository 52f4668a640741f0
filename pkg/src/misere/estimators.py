"""scikit-learn style wrappers.

Samples are positions: a list of heap sizes for octal games, or a mapping
``node -> coins`` for boards.  ``fit`` builds the misère quotient of the
universe spanned by the sample heaps, ``transform`` maps positions to
quotient element names and ``predict`` to outcomes.
"""
from __future__ import annotations

from collections.abc import Mapping

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .games import CoinPosition, DagBoard, HeapPosition, OctalCode, parse_octal, position_key
from .genus import genus
from .outcomes import MISERE
from .quotient import QuotientError, Universe, build_quotient, outcome_via_quotient


def check_ruleset(ruleset) -> OctalCode | DagBoard:
    if isinstance(ruleset, (OctalCode, DagBoard)):
        return ruleset
    if isinstance(ruleset, str):
        return parse_octal(ruleset)
    raise TypeError(f"ruleset must be an octal code string, OctalCode or DagBoard, got {type(ruleset).__name__}")


def check_positions(X, ruleset) -> list:
    """Coerce ``X`` into positions of ``ruleset``; rejects empty input and bad units."""
    if isinstance(X, (HeapPosition, CoinPosition, Mapping)) or X is None:
        raise ValueError("X must be a sequence of positions, not a single position")
    out = []
    for i, x in enumerate(X):
        try:
            if isinstance(ruleset, DagBoard):
                out.append(x if isinstance(x, CoinPosition) else CoinPosition(ruleset, x))
            else:
                out.append(x if isinstance(x, HeapPosition) else HeapPosition(np.asarray(x, dtype=int).ravel().tolist()))
        except (TypeError, ValueError) as exc:
            raise ValueError(f"sample {i}: {exc}") from None
    if not out:
        raise ValueError("X contains no positions")
    return out


class MisereQuotient(ClassifierMixin, TransformerMixin, BaseEstimator):
    """Misère quotient of a heap game or coin-sliding board.

    ``max_single=None`` takes the largest heap in the fitted samples (boards:
    every non-terminal node).
    """

    def __init__(self, ruleset="0.123", max_single=None, mult_cap=4, max_weight=None,
                 play=MISERE, stabilize=False):
        self.ruleset = ruleset
        self.max_single = max_single
        self.mult_cap = mult_cap
        self.max_weight = max_weight
        self.play = play
        self.stabilize = stabilize

    def fit(self, X=None, y=None):
        rs = check_ruleset(self.ruleset)
        max_single = self.max_single
        if isinstance(rs, OctalCode) and max_single is None:
            if X is None:
                raise ValueError("max_single is unset and there are no samples to infer it from")
            max_single = max((max(p.key, default=0) for p in check_positions(X, rs)), default=0)
            if max_single < 1:
                raise ValueError("samples contain no heaps")
        universe = Universe(rs, max_single, self.mult_cap, self.max_weight, self.play)
        self.ruleset_ = rs
        self.quotient_ = build_quotient(universe, stabilize=self.stabilize)
        self.classes_ = np.array(["N", "P"])
        return self

    def _elements(self, X):
        check_is_fitted(self, "quotient_")
        q = self.quotient_
        try:
            return [q.element_of(p) for p in check_positions(X, self.ruleset_)]
        except KeyError as exc:
            raise ValueError(f"position outside the fitted universe: {exc}") from None

    def transform(self, X):
        names = [self.quotient_.monoid.name(e) for e in self._elements(X)] if X is not None else []
        return np.array(names, dtype=object).reshape(-1, 1)

    def predict(self, X):
        check_is_fitted(self, "quotient_")
        q = self.quotient_
        return np.array([outcome_via_quotient(q, p).value for p in check_positions(X, self.ruleset_)])


class GenusTransformer(TransformerMixin, BaseEstimator):
    """Maps positions to genus symbols (as strings)."""

    def __init__(self, ruleset="0.123"):
        self.ruleset = ruleset

    def fit(self, X=None, y=None):
        self.ruleset_ = check_ruleset(self.ruleset)
        return self

    def transform(self, X):
        check_is_fitted(self, "ruleset_")
        rs = self.ruleset_
        out = [str(genus(p) if isinstance(p, CoinPosition) else genus(p, rs)) for p in check_positions(X, rs)]
        return np.array(out, dtype=object).reshape(-1, 1)


__all__ = ["MisereQuotient", "GenusTransformer", "check_positions", "check_ruleset", "QuotientError", "position_key"]
