"""Random games and profiles with exact entries, for tests and experiments."""
from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Sequence

import numpy as np

from stabilis.game import Game, MixedProfile


def random_rational(rng: random.Random, bound: int = 5, max_den: int = 4) -> Fraction:
    """Uniform-ish rational in ``[-bound, bound]`` with a small denominator."""
    q = rng.randint(1, max_den)
    return Fraction(rng.randint(-bound * q, bound * q), q)


def random_game(
    rng: random.Random,
    action_counts: Sequence[int],
    bound: int = 5,
    max_den: int = 4,
) -> Game:
    shape = tuple(action_counts)
    utilities = []
    for _ in shape:
        u = np.empty(shape, dtype=object)
        for idx in itertools.product(*(range(n) for n in shape)):
            u[idx] = random_rational(rng, bound, max_den)
        utilities.append(u)
    return Game(utilities, shape)


def random_vector(rng: random.Random, n: int, sparse: float = 0.3) -> tuple[Fraction, ...]:
    weights = [0 if rng.random() < sparse else rng.randint(1, 6) for _ in range(n)]
    if not any(weights):
        weights[rng.randrange(n)] = 1
    total = sum(weights)
    return tuple(Fraction(w, total) for w in weights)


def random_profile(rng: random.Random, action_counts: Sequence[int]) -> MixedProfile:
    return MixedProfile(tuple(random_vector(rng, n) for n in action_counts))


def team_game(shared: np.ndarray) -> Game:
    return Game([shared.copy() for _ in range(shared.ndim)], shared.shape)


def varied_instance(
    rng: random.Random,
    num_players: int,
    num_actions: int,
    gamma: Fraction,
    margin: int = 4,
) -> tuple[Game, MixedProfile]:
    """A gamma-varied game whose all-zeros profile is an exact pure Nash.

    Start from a team game where action 0 strictly dominates with margin
    ``margin - 1`` and perturb each player's entries independently within
    ``gamma/4``. Each unilateral change then moves by at most ``gamma/2``
    between players, so the game is gamma-varied; dominance survives as long
    as ``gamma/2 < margin - 1``.
    """
    gamma = Fraction(gamma)
    if not gamma / 2 < margin - 1:
        raise ValueError("gamma too large for the dominance margin")
    shape = (num_actions,) * num_players
    shared = np.empty(shape, dtype=object)
    for idx in itertools.product(range(num_actions), repeat=num_players):
        shared[idx] = margin * sum(1 for a in idx if a == 0) + Fraction(rng.randint(0, 8), 9)
    utilities = []
    steps = 8
    for _ in range(num_players):
        u = np.empty(shape, dtype=object)
        for idx in itertools.product(range(num_actions), repeat=num_players):
            u[idx] = shared[idx] + gamma / 4 * Fraction(rng.randint(-steps, steps), steps)
        utilities.append(u)
    g = Game(utilities, shape)
    return g, MixedProfile.pure(shape, (0,) * num_players)


def anonymous_game(
    rng: random.Random, num_players: int, num_actions: int, bound: int = 5
) -> Game:
    """Payoffs depend on own action and the multiset of the others' actions."""
    shape = (num_actions,) * num_players
    utilities = []
    for i in range(num_players):
        table = {}
        u = np.empty(shape, dtype=object)
        for idx in itertools.product(range(num_actions), repeat=num_players):
            key = (idx[i], tuple(sorted(idx[:i] + idx[i + 1:])))
            if key not in table:
                table[key] = Fraction(rng.randint(-bound, bound))
            u[idx] = table[key]
        utilities.append(u)
    return Game(utilities, shape)

