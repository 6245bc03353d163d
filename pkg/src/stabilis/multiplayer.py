"""Coalition deviations in m-player games.

A coalition ``S`` of at most ``t`` players jointly switches to a pure
action tuple. For a profile ``x`` the scan records

* ``nash``   -- the best gain of a member ``i in S``,
* ``immune`` -- the worst loss of an outsider ``j not in S``,
* ``envy``   -- the largest (gain of ``i``) minus (change of ``j``).

Subsets are visited by size then lexicographically, deviation tuples in
row-major order, members before outsiders; the first strict maximum wins.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Optional

import numpy as np

from stabilis.game import Game, MixedProfile, ShapeError, check_shape, contract
from stabilis.rational import to_rational

DEFAULT_BUDGET = 10**6


class BudgetExceeded(Exception):
    """The requested scan is larger than the configured budget."""


@dataclass(frozen=True)
class Witness:
    coalition: tuple[int, ...]
    actions: tuple[int, ...]
    gainer: Optional[int]
    loser: Optional[int]


@dataclass(frozen=True)
class CoalitionReport:
    t: int
    nash_gap: Fraction
    immune_gap: Fraction
    envy_gap: Optional[Fraction]
    worst: dict

    def holds(self, notion: str, eps) -> Optional[bool]:
        gap = getattr(self, f"{notion}_gap")
        return None if gap is None else gap <= to_rational(eps)


def scan_cost(action_counts, t: int) -> int:
    """Number of (coalition, deviation) pairs with ``|S| <= t``."""
    m = len(action_counts)
    return sum(
        prod(action_counts[s] for s in subset)
        for size in range(1, t + 1)
        for subset in itertools.combinations(range(m), size)
    )


def _marginal(tensor: np.ndarray, x: MixedProfile, keep: tuple[int, ...]) -> np.ndarray:
    """Contract every axis not in ``keep`` against the profile."""
    for axis in reversed(range(tensor.ndim)):
        if axis not in keep:
            tensor = np.tensordot(tensor, np.asarray(x[axis], dtype=object), axes=([axis], [0]))
    return tensor


def coalition_report(
    g: Game, x: MixedProfile, t: int, budget: Optional[int] = None
) -> CoalitionReport:
    """All three coalition gaps for coalitions of size ``1..t``.

    ``immune_gap`` and ``envy_gap`` need an outsider; when ``t == m`` the
    grand coalition contributes only to ``nash_gap``. ``envy_gap`` is
    ``None`` when ``t >= m``, where it is undefined.
    """
    check_shape(g, x)
    m = g.num_players
    if not 1 <= t <= m:
        raise ValueError(f"t must be between 1 and {m}")
    cost = scan_cost(g.action_counts, t)
    budget = DEFAULT_BUDGET if budget is None else budget
    if cost > budget:
        raise BudgetExceeded(f"coalition scan needs {cost} deviations, budget is {budget}")
    base = [contract(u, x.vectors) for u in g.utilities]
    best = {"nash": None, "immune": None, "envy": None}
    worst = {}

    def offer(notion, value, w):
        if best[notion] is None or value > best[notion]:
            best[notion] = value
            worst[notion] = w

    for size in range(1, t + 1):
        for coalition in itertools.combinations(range(m), size):
            outsiders = [j for j in range(m) if j not in coalition]
            tables = [_marginal(u, x, coalition) for u in g.utilities]
            for dev in itertools.product(*(range(g.action_counts[s]) for s in coalition)):
                delta = [Fraction(tables[j][dev]) - base[j] for j in range(m)]
                for i in coalition:
                    offer("nash", delta[i], Witness(coalition, dev, i, None))
                for j in outsiders:
                    offer("immune", -delta[j], Witness(coalition, dev, None, j))
                for i in coalition:
                    for j in outsiders:
                        offer("envy", delta[i] - delta[j], Witness(coalition, dev, i, j))
    return CoalitionReport(
        t,
        best["nash"],
        best["immune"],
        best["envy"] if t < m else None,
        worst,
    )


def coalition_nash_gap(g: Game, x: MixedProfile, t: int, budget: Optional[int] = None) -> Fraction:
    return coalition_report(g, x, t, budget).nash_gap


def coalition_immune_gap(g: Game, x: MixedProfile, t: int, budget: Optional[int] = None) -> Fraction:
    return coalition_report(g, x, t, budget).immune_gap


def coalition_envy_gap(g: Game, x: MixedProfile, t: int, budget: Optional[int] = None) -> Fraction:
    if t >= g.num_players:
        raise ValueError("envy needs an outsider: t must be below the number of players")
    return coalition_report(g, x, t, budget).envy_gap


# -- game shape metrics ----------------------------------------------------


def _unilateral_changes(g: Game):
    """Yield ``(i, deltas)`` where ``deltas[j]`` is ``u_j(x_-i : a) - u_j(x)``
    as an array over all pure ``x`` and deviations ``a`` (leading axis)."""
    for i, n in enumerate(g.action_counts):
        deltas = []
        for u in g.utilities:
            moved = np.stack([np.take(u, [a], axis=i).repeat(n, axis=i) for a in range(n)])
            deltas.append(moved - u[None, ...])
        yield i, deltas


def gamma_varied(g: Game) -> Fraction:
    """Smallest gamma with ``|D_i u_j - D_i u_k| <= gamma`` for all pure x, i, j, k."""
    best = Fraction(0)
    for _, deltas in _unilateral_changes(g):
        stacked = np.stack(deltas)
        spread = stacked.max(axis=0) - stacked.min(axis=0)
        best = max(best, Fraction(spread.max()))
    return best


def gamma_sensitive(g: Game) -> Fraction:
    """Smallest gamma with ``|u_j(x_-i : a) - u_j(x)| <= gamma`` for all ``j != i``."""
    best = Fraction(0)
    for i, deltas in _unilateral_changes(g):
        for j, d in enumerate(deltas):
            if j != i:
                best = max(best, Fraction(np.abs(d).max()))
    return best


def is_anonymous(g: Game) -> bool:
    """Every ``u_i`` depends only on ``x_i`` and the multiset of the others' actions."""
    if len(set(g.action_counts)) != 1:
        raise ShapeError("anonymity needs identical action sets")
    for i, u in enumerate(g.utilities):
        seen = {}
        for x in g.pure_profiles():
            key = (x[i], tuple(sorted(x[:i] + x[i + 1:])))
            v = u[x]
            if seen.setdefault(key, v) != v:
                return False
    return True


@dataclass(frozen=True)
class GameShapeMetrics:
    gamma_sensitive: Fraction
    gamma_varied: Fraction
    anonymous: Optional[bool]


def shape_metrics(g: Game) -> GameShapeMetrics:
    try:
        anon = is_anonymous(g)
    except ShapeError:
        anon = None
    return GameShapeMetrics(gamma_sensitive(g), gamma_varied(g), anon)


def sensitive_spot_check(g: Game, x: MixedProfile, t: int) -> dict:
    """Compare a Nash profile against the known bounds for gamma-sensitive games.

    Expected: immune gap <= gamma*t at coalition size t, and coalitional Nash
    gap <= 3*gamma*t at coalition size t+1. Returns the measured values and
    whether each bound held; callers decide what to do with failures.
    """
    gamma = gamma_sensitive(g)
    m = g.num_players
    immune = coalition_report(g, x, min(t, m)).immune_gap
    coal = coalition_report(g, x, min(t + 1, m)).nash_gap
    return {
        "gamma": gamma,
        "immune_gap": immune,
        "immune_ok": immune <= gamma * t,
        "coalition_nash_gap": coal,
        "coalition_ok": coal <= 3 * gamma * t,
    }
