"""Exact solvers for two-player games.

* :func:`solve_envy_proof` -- optimal strategies of the difference game.
* :func:`solve_immune` -- an equilibrium of the swap-negated game.
* :func:`decide_immune_nash` -- LP test for a profile that is a saddle point
  of both ``(u0, -u0)`` and ``(-u1, u1)``.
* :func:`enumerate_nash` / :func:`find_envy_proof_nash` -- support enumeration.

Support enumeration treats the two players separately. For a support pair
``(I, J)`` the column strategy ``y`` must be positive exactly on ``J`` and
make every row in ``I`` a best response; the row strategy has the mirror
condition. The two conditions share no variables, so a pair is an
equilibrium pattern iff both sides are feasible. Enlarging ``I`` only adds
constraints to the column side, so for fixed ``J`` the feasible ``I`` form
a down-closed family and are generated level by level.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from stabilis.game import Game, MixedProfile, difference_game, paired_zero_sum, swap_negate
from stabilis.lp import OPTIMAL, LinearProgram, feasibility, simplex_solve, zero_sum_value
from stabilis.rational import exact, fast
from stabilis.stability import envy_gap

_ZERO = Fraction(0)
_ONE = Fraction(1)


class NotFoundWithinSupport(Exception):
    """No equilibrium exists with supports inside the requested bound."""


@dataclass(frozen=True)
class NashWitness:
    profile: MixedProfile
    supports: tuple[tuple[int, ...], tuple[int, ...]]
    payoffs: tuple[Fraction, Fraction]
    degenerate: bool = False


@dataclass(frozen=True)
class ImmuneNashDecision:
    exists: bool
    witness: Optional[MixedProfile]
    values: tuple[Fraction, Fraction]


def _require_two(g: Game) -> None:
    if g.num_players != 2:
        raise ValueError(f"two-player game expected, got {g.num_players} players")


# -- exact linear algebra ---------------------------------------------------


def solve_linear(a: list[list[Fraction]], b: list[Fraction]):
    """Row-reduce ``a z = b``.

    Returns ``("inconsistent", None)``, ``("unique", z)`` or
    ``("multiple", None)``.
    """
    rows = [[fast(c) for c in r] + [fast(v)] for r, v in zip(a, b)]
    ncols = len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((k for k in range(r, len(rows)) if rows[k][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        rows[r] = [v / piv for v in rows[r]]
        for k in range(len(rows)):
            if k != r and rows[k][c]:
                f = rows[k][c]
                rows[k] = [vk - f * vr for vk, vr in zip(rows[k], rows[r])]
        pivots.append(c)
        r += 1
    if any(row[-1] for row in rows[r:]):
        return "inconsistent", None
    if len(pivots) < ncols:
        return "multiple", None
    z = [_ZERO] * ncols
    for k, c in enumerate(pivots):
        z[c] = exact(rows[k][-1])
    return "unique", z


# -- support enumeration ---------------------------------------------------


def _support_side(m, nrows: int, ncols: int, rows_i: tuple, cols_j: tuple):
    """Find ``y`` with support exactly ``cols_j`` making ``rows_i`` best responses.

    ``m`` is the payoff matrix of the player choosing rows. Returns
    ``(y, value, degenerate)`` or ``None``.
    """
    nj = len(cols_j)
    eq_a = [[m[i][j] for j in cols_j] + [-_ONE] for i in rows_i]
    eq_a.append([_ONE] * nj + [_ZERO])
    eq_b = [_ZERO] * len(rows_i) + [_ONE]
    kind, z = solve_linear(eq_a, eq_b)
    if kind == "inconsistent":
        return None
    in_i = set(rows_i)
    if kind == "unique":
        yj, v = z[:nj], z[nj]
        if any(p <= 0 for p in yj):
            return None
        for k in range(nrows):
            if k not in in_i and sum(m[k][j] * p for j, p in zip(cols_j, yj)) > v:
                return None
        y = [_ZERO] * ncols
        for j, p in zip(cols_j, yj):
            y[j] = p
        return tuple(y), v, False

    # a continuum of solutions: maximize the smallest support probability
    n = nj + 2  # y_J, v, t
    lp = LinearProgram(
        [_ZERO] * (nj + 1) + [_ONE],
        bounds=[(_ZERO, None)] * nj + [(None, None), (None, _ONE)],
    )
    for row, rhs in zip(eq_a, eq_b):
        lp.add(row + [_ZERO], "==", rhs)
    for pos in range(nj):
        coefs = [_ZERO] * n
        coefs[pos] = _ONE
        coefs[-1] = -_ONE
        lp.add(coefs, ">=", 0)
    for k in range(nrows):
        if k not in in_i:
            lp.add([m[k][j] for j in cols_j] + [-_ONE, _ZERO], "<=", 0)
    out = simplex_solve(lp)
    if out.status != OPTIMAL or out.value <= 0:
        return None
    y = [_ZERO] * ncols
    for j, p in zip(cols_j, out.point[:nj]):
        y[j] = p
    return tuple(y), out.point[nj], True


def _subsets(n: int, max_size: int):
    for size in range(1, max_size + 1):
        yield from itertools.combinations(range(n), size)


def _feasible_row_sets(nrows: int, max_size: int, check) -> list[tuple[int, ...]]:
    """Row sets of size <= ``max_size`` accepted by the down-closed test ``check``."""
    found = []
    level = []
    for i in range(nrows):
        res = check((i,))
        if res is not None:
            level.append((i,))
    found.extend(level)
    size = 1
    while level and size < max_size:
        present = set(level)
        nxt = []
        for a, b in itertools.combinations(level, 2):
            if a[:-1] != b[:-1]:
                continue
            cand = a + (b[-1],)
            if any(cand[:k] + cand[k + 1:] not in present for k in range(len(cand))):
                continue
            if check(cand) is not None:
                nxt.append(cand)
        level = sorted(nxt)
        found.extend(level)
        size += 1
    return found


def iter_nash(g: Game, max_support: Optional[int] = None) -> Iterator[NashWitness]:
    """Yield one equilibrium per feasible support pair, in enumeration order.

    Order: size of the row support, size of the column support, then the
    supports themselves lexicographically.
    """
    _require_two(g)
    n0, n1 = g.action_counts
    if max_support is None:
        max_support = max(n0, n1)
    if max_support < 1:
        raise ValueError("max_support must be at least 1")
    u0 = g.matrix(0).tolist()
    u1t = g.matrix(1).T.tolist()

    memo = {}

    def side(which, rows_i, cols_j):
        key = (which, rows_i, cols_j)
        if key not in memo:
            if which == 0:
                memo[key] = _support_side(u0, n0, n1, rows_i, cols_j)
            else:
                memo[key] = _support_side(u1t, n1, n0, rows_i, cols_j)
        return memo[key]

    candidates = []
    for cols_j in _subsets(n1, min(max_support, n1)):
        rows = _feasible_row_sets(
            n0, min(max_support, n0), lambda ri, cj=cols_j: side(0, ri, cj)
        )
        candidates.extend((ri, cols_j) for ri in rows)
    candidates.sort(key=lambda p: (len(p[0]), len(p[1]), p[0], p[1]))

    for rows_i, cols_j in candidates:
        col_side = side(0, rows_i, cols_j)
        row_side = side(1, cols_j, rows_i)
        if row_side is None:
            continue
        x0, w, deg0 = row_side
        x1, v, deg1 = col_side
        yield NashWitness(
            MixedProfile((x0, x1)), (rows_i, cols_j), (v, w), deg0 or deg1
        )


def enumerate_nash(g: Game, max_support: Optional[int] = None) -> list[NashWitness]:
    return list(iter_nash(g, max_support))


def find_envy_proof_nash(g: Game, max_support: Optional[int] = None) -> Optional[NashWitness]:
    """First enumerated equilibrium that is envy-proof, or ``None``."""
    for w in iter_nash(g, max_support):
        if envy_gap(g, w.profile) == 0:
            return w
    return None


# -- constructive solvers ---------------------------------------------------


def solve_envy_proof(g: Game) -> MixedProfile:
    """Envy-proof profile: optimal strategies of the zero-sum difference game."""
    _require_two(g)
    d = difference_game(g)
    _, x0 = zero_sum_value(d.matrix(0).tolist())
    _, x1 = zero_sum_value(d.matrix(1).T.tolist())
    return MixedProfile((x0, x1))


def solve_immune(g: Game, max_support: Optional[int] = None) -> MixedProfile:
    """Immune profile: the first equilibrium of the swap-negated game."""
    _require_two(g)
    for w in iter_nash(swap_negate(g), max_support):
        return w.profile
    raise NotFoundWithinSupport(f"no equilibrium with supports of size <= {max_support}")


def zero_sum_values(g: Game) -> tuple[Fraction, Fraction]:
    """``(v0, v1)``: what each player can guarantee for their own utility."""
    _require_two(g)
    v0, _ = zero_sum_value(paired_zero_sum(g, 0).matrix(0).tolist())
    v1, _ = zero_sum_value(paired_zero_sum(g, 1).matrix(1).T.tolist())
    return v0, v1


def decide_immune_nash(g: Game) -> ImmuneNashDecision:
    """Decide whether ``g`` has an immune Nash equilibrium and produce one.

    Such a profile is a saddle point of ``u0`` (player 0 maximizing, player 1
    minimizing) and simultaneously of ``u1`` (roles reversed). With the
    values ``v0, v1`` known, that is the linear system

        x0^T U0 >= v0,   U0 x1 <= v0,   U1 x1 >= v1,   x0^T U1 <= v1

    over the two probability simplices.
    """
    _require_two(g)
    n0, n1 = g.action_counts
    v0, v1 = zero_sum_values(g)
    u0 = g.matrix(0)
    u1 = g.matrix(1)
    cons = []
    zeros0 = [_ZERO] * n0
    zeros1 = [_ZERO] * n1
    for c in range(n1):
        cons.append(([u0[r][c] for r in range(n0)] + zeros1, ">=", v0))
        cons.append(([u1[r][c] for r in range(n0)] + zeros1, "<=", v1))
    for r in range(n0):
        cons.append((zeros0 + [u0[r][c] for c in range(n1)], "<=", v0))
        cons.append((zeros0 + [u1[r][c] for c in range(n1)], ">=", v1))
    cons.append(([_ONE] * n0 + zeros1, "==", 1))
    cons.append((zeros0 + [_ONE] * n1, "==", 1))
    out = feasibility(n0 + n1, cons)
    if out.status != OPTIMAL:
        return ImmuneNashDecision(False, None, (v0, v1))
    x = MixedProfile((out.point[:n0], out.point[n0:]))
    return ImmuneNashDecision(True, x, (v0, v1))


def verify_witness(g: Game, w: NashWitness) -> bool:
    """Supports carry positive mass and every support action is a best response."""
    x0, x1 = w.profile.vectors
    u0, u1 = g.matrix(0), g.matrix(1)
    n0, n1 = g.action_counts
    rows = [sum(u0[r][c] * x1[c] for c in range(n1)) for r in range(n0)]
    cols = [sum(u1[r][c] * x0[r] for r in range(n0)) for c in range(n1)]
    if tuple(r for r in range(n0) if x0[r]) != w.supports[0]:
        return False
    if tuple(c for c in range(n1) if x1[c]) != w.supports[1]:
        return False
    return all(rows[r] == max(rows) == w.payoffs[0] for r in w.supports[0]) and all(
        cols[c] == max(cols) == w.payoffs[1] for c in w.supports[1]
    )

