"""Normal-form games, mixed profiles and the text formats for both."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Iterable, Optional, Sequence

import numpy as np

from stabilis.rational import fmt, parse_rational, to_rational


class GameFormatError(ValueError):
    """Raised for malformed game or profile text."""


class ShapeError(ValueError):
    """A profile, deviation or player index does not fit the game."""


def _exact_array(values, shape: tuple[int, ...]) -> np.ndarray:
    flat = [to_rational(v) for v in np.asarray(values, dtype=object).reshape(-1)]
    if len(flat) != prod(shape):
        raise ShapeError(f"expected {prod(shape)} utility entries, got {len(flat)}")
    arr = np.empty(len(flat), dtype=object)
    arr[:] = flat
    arr = arr.reshape(shape)
    arr.flags.writeable = False
    return arr


class Game:
    """A finite game in normal form with exact utilities.

    ``utilities[i]`` is player ``i``'s payoff tensor, indexed by pure profiles
    (one axis per player). Labels are optional and only used for display.
    """

    def __init__(
        self,
        utilities: Sequence,
        action_counts: Optional[Sequence[int]] = None,
        labels: Optional[Sequence[Sequence[str]]] = None,
    ):
        if action_counts is None:
            action_counts = np.asarray(utilities[0], dtype=object).shape
        counts = tuple(int(n) for n in action_counts)
        if len(counts) < 2:
            raise ShapeError("a game needs at least two players")
        if any(n < 1 for n in counts):
            raise ShapeError("every player needs at least one action")
        if len(utilities) != len(counts):
            raise ShapeError(f"expected {len(counts)} utility tensors, got {len(utilities)}")
        self.action_counts = counts
        self.utilities = tuple(_exact_array(u, counts) for u in utilities)
        if labels is not None:
            labels = tuple(tuple(str(a) for a in names) for names in labels)
            if len(labels) != len(counts) or any(
                len(names) != n for names, n in zip(labels, counts)
            ):
                raise ShapeError("labels do not match action counts")
        self.labels = labels

    @property
    def num_players(self) -> int:
        return len(self.action_counts)

    def payoff(self, i: int, actions: Sequence[int]) -> Fraction:
        return self.utilities[i][tuple(actions)]

    def matrix(self, i: int) -> np.ndarray:
        """Player ``i``'s payoffs as a row-player x column-player matrix."""
        self._require_two_players()
        return self.utilities[i]

    def pure_profiles(self) -> Iterable[tuple[int, ...]]:
        return itertools.product(*(range(n) for n in self.action_counts))

    def label(self, player: int, action: int) -> str:
        if self.labels is None:
            return str(action)
        return self.labels[player][action]

    def _require_two_players(self) -> None:
        if self.num_players != 2:
            raise ShapeError(f"operation needs a 2-player game, got {self.num_players} players")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Game):
            return NotImplemented
        return self.action_counts == other.action_counts and all(
            np.array_equal(a, b) for a, b in zip(self.utilities, other.utilities)
        )

    def __repr__(self) -> str:
        return f"Game(players={self.num_players}, actions={self.action_counts})"


@dataclass(frozen=True)
class MixedProfile:
    """One probability vector per player; the profile is their product."""

    vectors: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        vecs = tuple(tuple(to_rational(p) for p in v) for v in self.vectors)
        for i, v in enumerate(vecs):
            if not v:
                raise ShapeError(f"player {i} has an empty probability vector")
            if any(p < 0 for p in v):
                raise ShapeError(f"player {i} has a negative probability")
            if sum(v) != 1:
                raise ShapeError(f"player {i} probabilities sum to {fmt(sum(v))}, not 1")
        object.__setattr__(self, "vectors", vecs)

    @classmethod
    def pure(cls, action_counts: Sequence[int], actions: Sequence[int]) -> "MixedProfile":
        if len(action_counts) != len(actions):
            raise ShapeError("one action per player expected")
        vecs = []
        for n, a in zip(action_counts, actions):
            if not 0 <= a < n:
                raise ShapeError(f"action {a} out of range for {n} actions")
            vecs.append(tuple(Fraction(int(k == a)) for k in range(n)))
        return cls(tuple(vecs))

    @classmethod
    def uniform_over(cls, n: int, support: Iterable[int]) -> tuple[Fraction, ...]:
        """Uniform probability vector of length ``n`` on ``support``."""
        support = set(support)
        w = Fraction(1, len(support))
        return tuple(w if k in support else Fraction(0) for k in range(n))

    def __getitem__(self, i: int) -> tuple[Fraction, ...]:
        return self.vectors[i]

    def __len__(self) -> int:
        return len(self.vectors)

    def support(self, i: int) -> tuple[int, ...]:
        return tuple(k for k, p in enumerate(self.vectors[i]) if p)

    def is_pure(self) -> bool:
        return all(len(self.support(i)) == 1 for i in range(len(self)))

    def replace(self, i: int, vector: Sequence[Fraction]) -> "MixedProfile":
        vecs = list(self.vectors)
        vecs[i] = tuple(vector)
        return MixedProfile(tuple(vecs))


def check_shape(g: Game, x: MixedProfile) -> None:
    if tuple(len(v) for v in x.vectors) != g.action_counts:
        raise ShapeError(
            f"profile shape {tuple(len(v) for v in x.vectors)} does not match game {g.action_counts}"
        )


def contract(tensor: np.ndarray, vectors: Sequence[Sequence[Fraction]]) -> Fraction:
    """Expectation of ``tensor`` under the product of ``vectors``."""
    t = tensor
    for v in reversed(vectors):
        t = np.dot(t, np.asarray(v, dtype=object))
    return Fraction(t) if not isinstance(t, Fraction) else t


def expected_utility(g: Game, x: MixedProfile, i: int) -> Fraction:
    check_shape(g, x)
    if not 0 <= i < g.num_players:
        raise ShapeError(f"no player {i}")
    return contract(g.utilities[i], x.vectors)


def deviate(x: MixedProfile, deviators: Sequence[int], actions: Sequence[int]) -> MixedProfile:
    """``x`` with each deviator switched to the matching pure action."""
    if len(deviators) != len(actions):
        raise ShapeError("deviation tuple does not match the coalition")
    if not deviators:
        raise ShapeError("coalition must be non-empty")
    vecs = list(x.vectors)
    for s, a in zip(deviators, actions):
        if not 0 <= s < len(vecs):
            raise ShapeError(f"no player {s}")
        if not 0 <= a < len(vecs[s]):
            raise ShapeError(f"action {a} out of range for player {s}")
        vecs[s] = tuple(Fraction(int(k == a)) for k in range(len(vecs[s])))
    return MixedProfile(tuple(vecs))


def deviation_value(
    g: Game,
    x: MixedProfile,
    deviators: Sequence[int],
    dev_actions: Sequence[int],
    observer: int,
) -> Fraction:
    """Expected utility of ``observer`` after the coalition plays ``dev_actions``."""
    check_shape(g, x)
    if len(set(deviators)) != len(deviators):
        raise ShapeError("repeated player in coalition")
    return expected_utility(g, deviate(x, deviators, dev_actions), observer)


# -- transformations used by the reductions -------------------------------


def swap_negate(g: Game) -> Game:
    """``(-u1, -u0)``: Nash equilibria of the result are immune profiles of ``g``."""
    g._require_two_players()
    u0, u1 = g.utilities
    return Game([-u1, -u0], g.action_counts, g.labels)


def difference_game(g: Game) -> Game:
    """Zero-sum ``(u0 - u1, u1 - u0)``; its equilibria are envy-proof profiles of ``g``."""
    g._require_two_players()
    u0, u1 = g.utilities
    return Game([u0 - u1, u1 - u0], g.action_counts, g.labels)


def paired_zero_sum(g: Game, b: int) -> Game:
    """Zero-sum game where player ``b`` keeps ``u_b`` and the opponent gets ``-u_b``."""
    g._require_two_players()
    if b not in (0, 1):
        raise ShapeError(f"no player {b}")
    ub = g.utilities[b]
    us = [None, None]
    us[b] = ub
    us[1 - b] = -ub
    return Game(us, g.action_counts, g.labels)


# -- text formats ----------------------------------------------------------


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_game(text: str) -> Game:
    """Parse the line-oriented game format.

    ::

        players: 2
        actions: 2 2
        labels 0: movie shopping      # optional, one line per player
        utility 0:
        4 1
        3 3
        utility 1:
        4 3
        1 3

    Entries are listed in row-major order (last player's index fastest) and
    may be spread over any number of lines.
    """
    num_players = None
    counts = None
    labels: dict[int, list[str]] = {}
    tokens: dict[int, list[str]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        head, sep, rest = line.partition(":")
        key = head.split()
        if sep and key and key[0] in ("players", "actions", "labels", "utility"):
            current = None
            if key[0] == "players":
                if num_players is not None or len(key) != 1:
                    raise GameFormatError(f"line {lineno}: duplicate or malformed players header")
                try:
                    num_players = int(rest)
                except ValueError:
                    raise GameFormatError(f"line {lineno}: bad player count {rest.strip()!r}") from None
                if num_players < 2:
                    raise GameFormatError(f"line {lineno}: need at least 2 players")
            elif key[0] == "actions":
                if num_players is None or counts is not None or len(key) != 1:
                    raise GameFormatError(f"line {lineno}: actions header out of place")
                try:
                    counts = [int(t) for t in rest.split()]
                except ValueError:
                    raise GameFormatError(f"line {lineno}: bad action counts") from None
                if len(counts) != num_players or any(n < 1 for n in counts):
                    raise GameFormatError(f"line {lineno}: expected {num_players} positive action counts")
            else:
                if counts is None or len(key) != 2:
                    raise GameFormatError(f"line {lineno}: {key[0]} header out of place")
                try:
                    i = int(key[1])
                except ValueError:
                    raise GameFormatError(f"line {lineno}: bad player index {key[1]!r}") from None
                if not 0 <= i < num_players:
                    raise GameFormatError(f"line {lineno}: no player {i}")
                if key[0] == "labels":
                    if i in labels:
                        raise GameFormatError(f"line {lineno}: duplicate labels for player {i}")
                    labels[i] = rest.split()
                else:
                    if i in tokens:
                        raise GameFormatError(f"line {lineno}: duplicate utility block for player {i}")
                    tokens[i] = rest.split()
                    current = i
            continue
        if current is None:
            raise GameFormatError(f"line {lineno}: data outside a utility block")
        tokens[current].extend(line.split())

    if num_players is None or counts is None:
        raise GameFormatError("missing players/actions header")
    expected = prod(counts)
    utilities = []
    for i in range(num_players):
        if i not in tokens:
            raise GameFormatError(f"missing utility block for player {i}")
        if len(tokens[i]) != expected:
            raise GameFormatError(
                f"player {i}: expected {expected} entries, got {len(tokens[i])}"
            )
        try:
            utilities.append([parse_rational(t) for t in tokens[i]])
        except ValueError as exc:
            raise GameFormatError(f"player {i}: {exc}") from None
    label_list = None
    if labels:
        if len(labels) != num_players:
            raise GameFormatError("labels must be given for every player or none")
        label_list = [labels[i] for i in range(num_players)]
        for i, names in enumerate(label_list):
            if len(names) != counts[i]:
                raise GameFormatError(f"player {i}: expected {counts[i]} labels")
    return Game(
        [np.asarray(u, dtype=object).reshape(counts) for u in utilities], counts, label_list
    )


def serialize_game(g: Game) -> str:
    """Canonical text form; ``parse_game(serialize_game(g)) == g``."""
    out = [f"players: {g.num_players}", "actions: " + " ".join(map(str, g.action_counts))]
    if g.labels is not None:
        for i, names in enumerate(g.labels):
            out.append(f"labels {i}: " + " ".join(names))
    last = g.action_counts[-1]
    for i, u in enumerate(g.utilities):
        out.append(f"utility {i}:")
        for row in u.reshape(-1, last):
            out.append(" ".join(fmt(v) for v in row))
    return "\n".join(out) + "\n"


def parse_profile(text: str, game: Optional[Game] = None) -> MixedProfile:
    """Parse ``profile:`` followed by one probability vector per line."""
    lines = [_strip_comment(l) for l in text.splitlines()]
    lines = [l for l in lines if l]
    if not lines or lines[0] != "profile:":
        raise GameFormatError("profile file must start with 'profile:'")
    try:
        vecs = tuple(tuple(parse_rational(t) for t in l.split()) for l in lines[1:])
    except ValueError as exc:
        raise GameFormatError(str(exc)) from None
    try:
        x = MixedProfile(vecs)
    except ShapeError as exc:
        raise GameFormatError(str(exc)) from None
    if game is not None:
        try:
            check_shape(game, x)
        except ShapeError as exc:
            raise GameFormatError(str(exc)) from None
    return x


def serialize_profile(x: MixedProfile) -> str:
    return "profile:\n" + "".join(" ".join(fmt(p) for p in v) + "\n" for v in x.vectors)
