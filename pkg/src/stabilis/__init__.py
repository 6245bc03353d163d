"""Exact tools for Nash equilibria, immunity and envy-proofness in finite games."""

from stabilis.game import (
    Game,
    MixedProfile,
    deviation_value,
    difference_game,
    expected_utility,
    paired_zero_sum,
    parse_game,
    parse_profile,
    serialize_game,
    serialize_profile,
    swap_negate,
)
from stabilis.stability import classify, envy_gap, immune_gap, nash_gap

__version__ = "0.1.0"
