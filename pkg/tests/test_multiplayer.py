import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import MOVIE, SHOP, brute_coalition_gaps, pure
from stabilis.game import Game, MixedProfile, ShapeError
from stabilis.generators import anonymous_game, random_game, random_profile, team_game, varied_instance
from stabilis.multiplayer import (
    BudgetExceeded,
    coalition_envy_gap,
    coalition_immune_gap,
    coalition_nash_gap,
    coalition_report,
    gamma_sensitive,
    gamma_varied,
    is_anonymous,
    scan_cost,
    sensitive_spot_check,
    shape_metrics,
)
from stabilis.stability import gaps


def brute_gamma(g):
    """Both gamma constants by looping over (x, i, x_i', j, k)."""
    varied = sensitive = Fraction(0)
    m = g.num_players
    for x in g.pure_profiles():
        for i in range(m):
            for a in range(g.action_counts[i]):
                y = x[:i] + (a,) + x[i + 1:]
                d = [g.payoff(j, y) - g.payoff(j, x) for j in range(m)]
                varied = max(varied, max(abs(p - q) for p in d for q in d))
                sensitive = max([sensitive] + [abs(d[j]) for j in range(m) if j != i])
    return varied, sensitive


def shared_tensor(rng, m, n):
    t = np.empty((n,) * m, dtype=object)
    for idx in itertools.product(range(n), repeat=m):
        t[idx] = Fraction(rng.randint(-5, 5))
    return t


def test_two_player_examples(fig1, fig2):
    mm = pure(MOVIE, MOVIE)
    assert coalition_nash_gap(fig1, mm, 1) == 0
    assert coalition_nash_gap(fig2, pure(SHOP, SHOP), 1) == 1
    assert coalition_immune_gap(fig1, mm, 1) == 3
    assert coalition_envy_gap(fig1, mm, 1) == 2


def test_two_player_consistency(fig1, fig2):
    rng = random.Random(4)
    for g in (fig1, fig2):
        for _ in range(10):
            x = random_profile(rng, (2, 2))
            r = coalition_report(g, x, 1)
            assert (r.nash_gap, r.immune_gap, r.envy_gap) == gaps(g, x)


def test_team_game_at_optimum():
    rng = random.Random(1)
    t = shared_tensor(rng, 3, 2)
    g = team_game(t)
    best = max(g.pure_profiles(), key=lambda a: t[a])
    x = MixedProfile.pure((2, 2, 2), best)
    for size in (1, 2, 3):
        assert coalition_nash_gap(g, x, size) == 0
    y = random_profile(rng, (2, 2, 2))
    for size in (1, 2):
        assert coalition_envy_gap(g, y, size) == 0
        assert coalition_immune_gap(g, y, size) == brute_coalition_gaps(g, y, size)[1]


def test_constant_game_immune():
    u = np.full((2, 3, 2), Fraction(2), dtype=object)
    g = Game([u, u, u], (2, 3, 2))
    x = MixedProfile.pure((2, 3, 2), (0, 1, 1))
    assert coalition_immune_gap(g, x, 2) == 0


def test_envy_needs_outsider(fig1):
    r = coalition_report(fig1, pure(0, 0), 2)
    assert r.envy_gap is None and r.holds("envy", 0) is None
    with pytest.raises(ValueError):
        coalition_envy_gap(fig1, pure(0, 0), 2)
    with pytest.raises(ValueError):
        coalition_report(fig1, pure(0, 0), 0)


def test_budget():
    g = random_game(random.Random(2), (3, 3, 3))
    x = MixedProfile.pure((3, 3, 3), (0, 0, 0))
    assert scan_cost((3, 3, 3), 2) == 9 + 27
    with pytest.raises(BudgetExceeded):
        coalition_report(g, x, 2, budget=35)
    assert coalition_report(g, x, 2, budget=36).t == 2


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(3, 4))
def test_against_brute_force(seed, m):
    rng = random.Random(seed)
    counts = tuple(rng.randint(1, 2) for _ in range(m))
    g = random_game(rng, counts)
    x = random_profile(rng, counts)
    for t in range(1, m):
        r = coalition_report(g, x, t)
        assert (r.nash_gap, r.immune_gap, r.envy_gap) == brute_coalition_gaps(g, x, t)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_monotone_in_t_and_composition(seed):
    rng = random.Random(seed)
    counts = (2, 2, 3)
    g = random_game(rng, counts)
    x = random_profile(rng, counts)
    r1, r2, r3 = (coalition_report(g, x, t) for t in (1, 2, 3))
    assert r1.nash_gap <= r2.nash_gap <= r3.nash_gap
    assert r1.immune_gap <= r2.immune_gap <= r3.immune_gap
    assert r1.envy_gap <= r2.envy_gap
    for r in (r1, r2):
        assert min(r.nash_gap, r.immune_gap, r.envy_gap) >= 0
        assert r.envy_gap <= r.nash_gap + r.immune_gap


def test_gamma_examples(fig1):
    assert gamma_varied(fig1) == 2
    assert gamma_sensitive(fig1) == 3
    rng = random.Random(0)
    t = shared_tensor(rng, 3, 2)
    assert gamma_varied(team_game(t)) == 0
    delta = Fraction(1, 3)
    u = [t.copy() for _ in range(3)]
    u[1][(0, 1, 0)] += delta
    g = Game(u, (2, 2, 2))
    assert 0 < gamma_varied(g) <= 2 * delta


def test_gamma_own_action_only():
    rng = random.Random(8)
    u = []
    for i in range(3):
        own = [Fraction(rng.randint(-4, 4)) for _ in range(2)]
        t = np.empty((2, 2, 2), dtype=object)
        for idx in itertools.product(range(2), repeat=3):
            t[idx] = own[idx[i]]
        u.append(t)
    assert gamma_sensitive(Game(u, (2, 2, 2))) == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_gamma_against_brute_force(seed):
    rng = random.Random(seed)
    counts = tuple(rng.randint(1, 3) for _ in range(rng.randint(2, 3)))
    g = random_game(rng, counts)
    assert (gamma_varied(g), gamma_sensitive(g)) == brute_gamma(g)


def test_anonymity(fig1):
    assert is_anonymous(fig1)
    rng = random.Random(3)
    assert is_anonymous(anonymous_game(rng, 3, 2))
    # majority vote: everyone gets 1 if their action is the majority
    u = []
    for i in range(3):
        t = np.empty((2, 2, 2), dtype=object)
        for idx in itertools.product(range(2), repeat=3):
            t[idx] = Fraction(int(sum(idx) >= 2) if idx[i] else int(sum(idx) <= 1))
        u.append(t)
    assert is_anonymous(Game(u, (2, 2, 2)))
    # player 0 cares only about player 1's action, not player 2's
    t = np.empty((2, 2, 2), dtype=object)
    for idx in itertools.product(range(2), repeat=3):
        t[idx] = Fraction(idx[1])
    z = np.zeros((2, 2, 2), dtype=object)
    assert not is_anonymous(Game([t, z, z], (2, 2, 2)))
    with pytest.raises(ShapeError):
        is_anonymous(random_game(rng, (2, 3)))
    assert shape_metrics(random_game(rng, (2, 3))).anonymous is None


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([3, 4]), st.sampled_from([2, 3]))
def test_varied_instances(seed, m, n):
    rng = random.Random(seed)
    gamma = Fraction(rng.randint(1, 8), 4)
    g, x = varied_instance(rng, m, n, gamma)
    assert gamma_varied(g) <= gamma
    assert coalition_nash_gap(g, x, 1) == 0
    for t in (1, 2):
        assert coalition_envy_gap(g, x, t) <= gamma_varied(g) * t


def test_sensitive_spot_check_reports():
    rng = random.Random(6)
    g, x = varied_instance(rng, 3, 2, Fraction(1, 2))
    out = sensitive_spot_check(g, x, 1)
    assert set(out) == {"gamma", "immune_gap", "immune_ok", "coalition_nash_gap", "coalition_ok"}
    assert out["gamma"] == gamma_sensitive(g)
