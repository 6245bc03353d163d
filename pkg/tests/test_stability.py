import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import MOVIE, SHOP, brute_two_player_gaps, constant_game, pure
from stabilis.game import Game, MixedProfile
from stabilis.generators import random_game, random_profile, random_rational
from stabilis.sat import DEFAULT
from stabilis.stability import Deviation, classify, envy_gap, gaps, immune_gap, nash_gap

shapes = st.tuples(st.integers(1, 4), st.integers(1, 4))


def test_nash_gap_examples(fig1, fig2):
    assert nash_gap(fig1, pure(MOVIE, MOVIE)) == 0
    assert nash_gap(fig2, pure(SHOP, SHOP)) == 1
    assert nash_gap(fig1, pure(MOVIE, SHOP)) == 2


def test_immune_gap_examples(fig1, fig2):
    assert immune_gap(fig1, pure(MOVIE, MOVIE)) == 3
    assert immune_gap(fig1, pure(SHOP, SHOP)) == 0
    assert immune_gap(fig2, pure(SHOP, SHOP)) == 0


def test_envy_gap_examples(fig1, gadget):
    assert envy_gap(fig1, pure(SHOP, SHOP)) == 0
    assert envy_gap(fig1, pure(MOVIE, MOVIE)) == 2
    f = gadget.index((DEFAULT, None))
    assert envy_gap(gadget.game, MixedProfile.pure((9, 9), (f, f))) == 1


def test_classify_examples(fig1, fig2):
    r = classify(fig2, pure(MOVIE, MOVIE))
    assert (r.is_nash, r.is_envy_proof, r.is_immune) == (True, False, False)
    r = classify(fig1, pure(SHOP, SHOP), 0)
    assert (r.is_nash, r.is_envy_proof, r.is_immune) == (True, True, True)
    c = constant_game()
    r = classify(c, random_profile(random.Random(3), (3, 2)))
    assert r.nash_gap == r.immune_gap == r.envy_gap == 0


def test_classify_eps_and_witness(fig1):
    r = classify(fig1, pure(MOVIE, MOVIE), Fraction(2))
    assert r.holds("envy") and not r.holds("immune")
    # player 0 moving to shopping costs player 1 three points
    assert r.worst["immune"] == Deviation(0, SHOP)
    assert r.worst["envy"] == Deviation(0, SHOP)
    # tie at gain 0 goes to the lowest player and action
    assert r.worst["nash"] == Deviation(0, MOVIE)
    with pytest.raises(ValueError):
        classify(fig1, pure(0, 0), -1)


def test_three_player_rejected():
    import numpy as np

    u = np.zeros((2, 2, 2), dtype=object)
    g = Game([u, u, u], (2, 2, 2))
    with pytest.raises(ValueError):
        nash_gap(g, MixedProfile.pure((2, 2, 2), (0, 0, 0)))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), shapes)
def test_against_brute_force(seed, shape):
    rng = random.Random(seed)
    g = random_game(rng, shape)
    x = random_profile(rng, shape)
    expected = brute_two_player_gaps(g, x)
    assert (nash_gap(g, x), immune_gap(g, x), envy_gap(g, x)) == expected
    assert gaps(g, x) == expected


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), shapes)
def test_nonnegative_and_envy_bound(seed, shape):
    rng = random.Random(seed)
    g = random_game(rng, shape)
    x = random_profile(rng, shape)
    n, i, e = gaps(g, x)
    assert n >= 0 and i >= 0 and e >= 0
    assert e <= n + i


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), shapes)
def test_scale_covariance(seed, shape):
    rng = random.Random(seed)
    g = random_game(rng, shape)
    x = random_profile(rng, shape)
    c = Fraction(rng.randint(1, 9), rng.randint(1, 9))
    s0, s1 = random_rational(rng), random_rational(rng)
    scaled = Game([u * c for u in g.utilities], shape)
    shifted = Game([g.utilities[0] + s0, g.utilities[1] + s1], shape)
    base = gaps(g, x)
    assert gaps(scaled, x) == tuple(c * v for v in base)
    assert gaps(shifted, x) == base
