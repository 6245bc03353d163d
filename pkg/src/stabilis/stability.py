"""Exact gap functionals for two-player profiles.

Each gap is the largest amount by which a pure unilateral deviation
violates the notion:

* ``nash_gap``   -- what the deviator gains,
* ``immune_gap`` -- what the other player loses,
* ``envy_gap``   -- how much more the deviator gains than the other player.

A profile has a property iff its gap is 0, and the eps-approximate version
iff the gap is at most eps. The expectation of every deviation functional
over the deviator's own mixed strategy is 0, so the maxima are never
negative and need no clamping.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from stabilis.game import Game, MixedProfile, ShapeError, check_shape
from stabilis.rational import to_rational

NOTIONS = ("nash", "immune", "envy")


@dataclass(frozen=True)
class Deviation:
    player: int
    action: int


@dataclass(frozen=True)
class StabilityReport:
    nash_gap: Fraction
    immune_gap: Fraction
    envy_gap: Fraction
    eps: Fraction
    worst: dict

    @property
    def is_nash(self) -> bool:
        return self.nash_gap <= self.eps

    @property
    def is_immune(self) -> bool:
        return self.immune_gap <= self.eps

    @property
    def is_envy_proof(self) -> bool:
        return self.envy_gap <= self.eps

    def gap(self, notion: str) -> Fraction:
        return getattr(self, f"{notion}_gap")

    def holds(self, notion: str) -> bool:
        return self.gap(notion) <= self.eps


def deviation_tables(g: Game, x: MixedProfile):
    """Per deviator ``b``: ``(gain_b, change_other)`` vectors over ``A_b``.

    ``gain_b[a] = u_b(a:x_other) - u_b(x)`` and
    ``change_other[a] = u_other(a:x_other) - u_other(x)``.
    """
    if g.num_players != 2:
        raise ShapeError("two-player game expected")
    check_shape(g, x)
    x0 = np.asarray(x[0], dtype=object)
    x1 = np.asarray(x[1], dtype=object)
    u0, u1 = g.utilities
    # values of each player when player 0 / player 1 plays a pure action
    row_vals = (np.dot(u0, x1), np.dot(u1, x1))
    col_vals = (np.dot(x0, u0), np.dot(x0, u1))
    base = (np.dot(x0, row_vals[0]), np.dot(x0, row_vals[1]))
    tables = []
    for b, vals in ((0, row_vals), (1, col_vals)):
        o = 1 - b
        tables.append(([v - base[b] for v in vals[b]], [v - base[o] for v in vals[o]]))
    return tables


def _scan(g: Game, x: MixedProfile, value):
    best = None
    where = None
    for b, (gain, other) in enumerate(deviation_tables(g, x)):
        for a in range(len(gain)):
            v = value(gain[a], other[a])
            if best is None or v > best:
                best, where = v, Deviation(b, a)
    return Fraction(best), where


def nash_gap(g: Game, x: MixedProfile) -> Fraction:
    return _scan(g, x, lambda gain, other: gain)[0]


def immune_gap(g: Game, x: MixedProfile) -> Fraction:
    return _scan(g, x, lambda gain, other: -other)[0]


def envy_gap(g: Game, x: MixedProfile) -> Fraction:
    return _scan(g, x, lambda gain, other: gain - other)[0]


def gaps(g: Game, x: MixedProfile) -> tuple[Fraction, Fraction, Fraction]:
    """``(nash_gap, immune_gap, envy_gap)`` from one pass over the deviations."""
    tables = deviation_tables(g, x)
    pairs = [(gn, o) for gain, other in tables for gn, o in zip(gain, other)]
    n = max(gn for gn, _ in pairs)
    i = max(-o for _, o in pairs)
    e = max(gn - o for gn, o in pairs)
    return Fraction(n), Fraction(i), Fraction(e)


def classify(g: Game, x: MixedProfile, eps=0) -> StabilityReport:
    """Gaps, eps-classification and the worst deviation for each notion.

    Ties between equally bad deviations go to the lowest player, then the
    lowest action.
    """
    eps = to_rational(eps)
    if eps < 0:
        raise ValueError("eps must be non-negative")
    n, wn = _scan(g, x, lambda gain, other: gain)
    i, wi = _scan(g, x, lambda gain, other: -other)
    e, we = _scan(g, x, lambda gain, other: gain - other)
    return StabilityReport(n, i, e, eps, {"nash": wn, "immune": wi, "envy": we})

