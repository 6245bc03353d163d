"""Searches over k-uniform profiles.

A k-uniform strategy is the uniform distribution over a multiset of ``k``
pure actions. :func:`approx_envy_nash_search` scans every pair of k-uniform
strategies, keeps the eps-Nash ones, and reports the smallest envy gap
``eps'`` among them. When ``eps' > 2 eps``, the game has no
``(eps' - 2 eps)``-envy-proof Nash equilibrium at all.

The scan runs on integers: with ``D`` the common denominator of the
utilities and count vectors ``c0, c1`` (summing to ``k``), every expected
utility times ``k**2 * D`` is an exact integer.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

import numpy as np

from stabilis.game import Game, MixedProfile, swap_negate
from stabilis.rational import to_rational

DEFAULT_BUDGET = 10**7

COMPLETE = "complete"
BUDGET_EXCEEDED = "budget_exceeded"


class ScanExhausted(Exception):
    """No k-uniform profile met the eps bound."""


# -- k -------------------------------------------------------------------


def _atanh_bounds(z: Fraction, terms: int) -> tuple[Fraction, Fraction]:
    """Bounds on ``atanh(z) = sum z**(2i+1) / (2i+1)`` for ``0 <= z < 1``."""
    lo = Fraction(0)
    p = z
    z2 = z * z
    for i in range(terms):
        lo += p / (2 * i + 1)
        p *= z2
    # tail <= z**(2T+1) / ((2T+1) (1 - z**2))
    return lo, lo + p / ((2 * terms + 1) * (1 - z2))


def ln_bounds(n: int, terms: int = 20) -> tuple[Fraction, Fraction]:
    """Rational ``(lo, hi)`` with ``lo <= ln(n) <= hi``.

    Uses ``ln n = e ln 2 + ln(n / 2**e)`` with ``n / 2**e`` in ``[1, 2)`` and
    ``ln y = 2 atanh((y - 1) / (y + 1))``, so every series argument is at
    most 1/3.
    """
    if n < 1:
        raise ValueError("n must be positive")
    e = n.bit_length() - 1
    y = Fraction(n, 1 << e)
    l2_lo, l2_hi = _atanh_bounds(Fraction(1, 3), terms)
    ly_lo, ly_hi = _atanh_bounds((y - 1) / (y + 1), terms)
    return 2 * (e * l2_lo + ly_lo), 2 * (e * l2_hi + ly_hi)


def k_for(n: int, eps) -> int:
    """``max(1, ceil(3 ln n / eps**2))``, computed exactly.

    ``ln n`` is irrational for ``n >= 2`` so the quotient is never an
    integer; the bounds are tightened until both ends round up to the same
    integer.
    """
    eps = to_rational(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return 1
    terms = 20
    while True:
        lo, hi = ln_bounds(n, terms)
        k_lo = math.ceil(3 * lo / (eps * eps))
        k_hi = math.ceil(3 * hi / (eps * eps))
        if k_lo == k_hi:
            return max(1, k_hi)
        terms *= 2


# -- k-uniform strategies --------------------------------------------------


@dataclass(frozen=True)
class KUniformStrategy:
    multiset: tuple[int, ...]
    n: int

    @property
    def k(self) -> int:
        return len(self.multiset)

    @property
    def counts(self) -> tuple[int, ...]:
        c = [0] * self.n
        for a in self.multiset:
            c[a] += 1
        return tuple(c)

    @property
    def probabilities(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.k) for c in self.counts)


def enumerate_k_uniform(n: int, k: int) -> Iterator[KUniformStrategy]:
    """All ``C(n+k-1, k)`` multisets, non-decreasing, in lexicographic order."""
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    for ms in itertools.combinations_with_replacement(range(n), k):
        yield KUniformStrategy(ms, n)


def num_k_uniform(n: int, k: int) -> int:
    return math.comb(n + k - 1, k)


# -- scan ------------------------------------------------------------------


@dataclass
class ApproxSearchOutcome:
    k: int
    eps: Fraction
    found_any: bool
    best_envy: Optional[Fraction]
    witness: Optional[MixedProfile]
    witness_nash_gap: Optional[Fraction]
    num_candidates: int
    scanned: int
    status: str = COMPLETE

    @property
    def nonexistence_bound(self) -> Fraction:
        """``max(0, eps' - 2 eps)``: no exact Nash is this envy-proof."""
        if not self.found_any or self.status != COMPLETE:
            return Fraction(0)
        return max(Fraction(0), self.best_envy - 2 * self.eps)


def _integer_matrices(g: Game):
    u0, u1 = g.matrix(0), g.matrix(1)
    d = 1
    for v in itertools.chain(u0.flat, u1.flat):
        d = math.lcm(d, v.denominator)
    a0 = [[int(v * d) for v in row] for row in u0]
    a1 = [[int(v * d) for v in row] for row in u1]
    return a0, a1, d


def _count_matrix(n: int, k: int, limit: Optional[int] = None):
    rows = []
    for ms in itertools.islice(itertools.combinations_with_replacement(range(n), k), limit):
        c = [0] * n
        for a in ms:
            c[a] += 1
        rows.append(c)
    return rows


class _Scan:
    """Scaled gap arrays over all k-uniform pairs (rows: player 0's strategies)."""

    def __init__(self, g: Game, k: int, row_limit: Optional[int] = None):
        if g.num_players != 2:
            raise ValueError("two-player game expected")
        n0, n1 = g.action_counts
        a0, a1, d = _integer_matrices(g)
        self.k, self.d = k, d
        self.scale = k * k * d
        self.c0 = _count_matrix(n0, k, row_limit)
        self.c1 = _count_matrix(n1, k)
        bound = max(1, max(abs(v) for row in a0 + a1 for v in row)) * k * k * 8
        dtype = np.int64 if bound < 2**62 else object
        A0 = np.array(a0, dtype=dtype)
        A1 = np.array(a1, dtype=dtype)
        C0 = np.array(self.c0, dtype=dtype).reshape(len(self.c0), n0)
        C1 = np.array(self.c1, dtype=dtype)
        # k*D * u(a : x1) for each row action a and column strategy q
        R0, R1 = A0 @ C1.T, A1 @ C1.T
        # k*D * u(x0 : c) for each row strategy p and column action c
        S0, S1 = C0 @ A0, C0 @ A1
        P0, P1 = S0 @ C1.T, S1 @ C1.T
        k_ = k
        self.nash = np.maximum(
            k_ * R0.max(axis=0)[None, :] - P0, k_ * S1.max(axis=1)[:, None] - P1
        )
        self.immune = np.maximum(
            P1 - k_ * R1.min(axis=0)[None, :], P0 - k_ * S0.min(axis=1)[:, None]
        )
        self.envy = np.maximum(
            k_ * (R0 - R1).max(axis=0)[None, :] - (P0 - P1),
            k_ * (S1 - S0).max(axis=1)[:, None] - (P1 - P0),
        )

    def profile(self, p: int, q: int) -> MixedProfile:
        return MixedProfile(
            (
                tuple(Fraction(c, self.k) for c in self.c0[p]),
                tuple(Fraction(c, self.k) for c in self.c1[q]),
            )
        )

    def value(self, scaled) -> Fraction:
        return Fraction(int(scaled), self.scale)

    def within(self, arr, eps: Fraction):
        return arr * eps.denominator <= eps.numerator * self.scale


def _plan(g: Game, eps: Fraction, k: Optional[int], budget: Optional[int]):
    n0, n1 = g.action_counts
    if k is None:
        k = k_for(max(n0, n1), eps)
    if k < 1:
        raise ValueError("k must be positive")
    if budget is None:
        budget = DEFAULT_BUDGET
    total = num_k_uniform(n0, k) * num_k_uniform(n1, k)
    cols = num_k_uniform(n1, k)
    row_limit = None
    status = COMPLETE
    if total > budget:
        status = BUDGET_EXCEEDED
        row_limit = budget // cols
    return k, total, row_limit, status


def approx_envy_nash_search(
    g: Game, eps, k: Optional[int] = None, budget: Optional[int] = None
) -> ApproxSearchOutcome:
    """Minimum envy gap over k-uniform eps-Nash profiles, with its first witness.

    Witness order is lexicographic in (player 0's multiset, player 1's
    multiset). If the candidate count exceeds ``budget`` only a prefix of
    player 0's strategies is scanned and the status says so.
    """
    if g.num_players != 2:
        raise ValueError("two-player game expected")
    eps = to_rational(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    k, total, row_limit, status = _plan(g, eps, k, budget)
    if row_limit == 0:
        return ApproxSearchOutcome(k, eps, False, None, None, None, total, 0, status)
    scan = _Scan(g, k, row_limit)
    scanned = len(scan.c0) * len(scan.c1)
    ok = scan.within(scan.nash, eps)
    if not ok.any():
        return ApproxSearchOutcome(k, eps, False, None, None, None, total, scanned, status)
    envy = np.where(ok, scan.envy, scan.envy.max() + 1)
    flat = int(np.argmin(envy))
    p, q = divmod(flat, envy.shape[1])
    return ApproxSearchOutcome(
        k,
        eps,
        True,
        scan.value(envy[p, q]),
        scan.profile(p, q),
        scan.value(scan.nash[p, q]),
        total,
        scanned,
        status,
    )


def approx_immune_search(
    g: Game, eps, k: Optional[int] = None, budget: Optional[int] = None
) -> MixedProfile:
    """First k-uniform eps-Nash profile of the swap-negated game.

    Its immune gap in ``g`` is at most ``eps``.
    """
    eps = to_rational(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    swapped = swap_negate(g)
    k, total, row_limit, status = _plan(swapped, eps, k, budget)
    if row_limit != 0:
        scan = _Scan(swapped, k, row_limit)
        hits = np.argwhere(scan.within(scan.nash, eps))
        if len(hits):
            p, q = hits[0]
            return scan.profile(int(p), int(q))
    raise ScanExhausted(
        f"no {k}-uniform {eps}-Nash profile of the swapped game"
        + (" (budget exceeded, scan partial)" if status != COMPLETE else "")
    )


def normalize_unit(g: Game) -> Game:
    """Common affine rescale of all utilities onto [0, 1].

    Every gap scales by the same positive factor, so eps-classifications
    carry over with eps divided by the utility range.
    """
    vals = [v for u in g.utilities for v in u.flat]
    lo, hi = min(vals), max(vals)
    if lo == hi:
        return Game([u - lo for u in g.utilities], g.action_counts, g.labels)
    return Game([(u - lo) / (hi - lo) for u in g.utilities], g.action_counts, g.labels)
