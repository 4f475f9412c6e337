"""Per-composition leakage math for a designated secret input.

A composition restricted to one low-input assignment is an abstract channel.
For each abstract channel the composition acts, per assignment of the other
high inputs, as a buffer, an inverter, or a stuck-at constant toward the
designated secret; only buffer and inverter behaviors let the secret reach
the output.  The advanced multiplier of an abstract channel is

    p_threat = max(p_buffer, p_not)
    p_leak   = p_threat - ((1 - p_threat) - |p_stuck1 - p_stuck0|)
    value    = max(p_leak, p_max)

where p_max is the largest single-assignment probability among leaking
behaviors, guaranteeing the value never drops below the most likely leaking
channel.  Across low assignments, the advanced multiplier is the maximum
value over possible assignments and the common multiplier is the total
probability of the low assignments under which the secret can reach the
output at all.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .cluster import ChannelComposition, ROLE_HIGH


class Behavior(Enum):
    BUFFER = "buffer"
    NOT = "not"
    STUCK0 = "stuck-at-0"
    STUCK1 = "stuck-at-1"


LEAKING_BEHAVIORS = (Behavior.BUFFER, Behavior.NOT)


@dataclass(frozen=True)
class AbstractChannelStats:
    """Behavior probabilities of one composition under a fixed low assignment.

    Components sum to 1; p_max is 0 when no leaking behavior has positive
    probability and never exceeds max(p_buffer, p_not).
    """

    low_assignment: tuple[int, ...]
    p_low: float
    p_buffer: float
    p_not: float
    p_stuck0: float
    p_stuck1: float
    p_max: float


@dataclass(frozen=True)
class ChannelMultipliers:
    """The [common, advanced] multiplier pair of a composition.

    ``worst_low_assignment`` is the ((net, value), ...) low assignment whose
    abstract channel attains the advanced multiplier; absent for pure high
    channels and for compositions that never leak.
    """

    common: float
    advanced: float
    worst_low_assignment: tuple[tuple[int, int], ...] | None


@dataclass(frozen=True)
class LowAssignmentProfile:
    values: tuple[int, ...]
    p_low: float
    leaking: bool
    advanced: float


def _row_index(bits: list[int]) -> int:
    r = 0
    for b in bits:
        r = (r << 1) | b
    return r


def classify_behavior(
    truth_table: tuple[int, ...], secret_index: int, fixed_values: tuple[int, ...]
) -> Behavior:
    """Behavior toward the secret input with every other input fixed."""
    k = len(fixed_values) + 1
    if len(truth_table) != (1 << k):
        raise ValueError("fixed_values must cover all inputs except the secret")
    bits = list(fixed_values)
    bits.insert(secret_index, 0)
    out0 = truth_table[_row_index(bits)]
    bits[secret_index] = 1
    out1 = truth_table[_row_index(bits)]
    if out0 == out1:
        return Behavior.STUCK1 if out0 else Behavior.STUCK0
    return Behavior.BUFFER if out1 else Behavior.NOT


def abstract_channel_stats(
    comp: ChannelComposition,
    secret_index: int,
    low_values: tuple[int, ...],
    probs: Mapping[int, float],
) -> AbstractChannelStats:
    """Accumulate behavior probabilities over all other-high assignments.

    Other-high inputs are treated as mutually independent with their
    estimated per-net probabilities; ``low_values`` is aligned with the
    composition's low positions in input order.
    """
    if comp.roles[secret_index] != ROLE_HIGH:
        raise ValueError(f"input {secret_index} is not a high input")
    low_pos = comp.low_positions()
    if len(low_values) != len(low_pos):
        raise ValueError("low_values must cover every low input")
    other_high = [i for i in comp.high_positions() if i != secret_index]

    p_low = 1.0
    for pos, bit in zip(low_pos, low_values):
        p = probs[comp.input_nets[pos]]
        p_low *= p if bit else 1.0 - p

    values = [0] * len(comp.input_nets)
    for pos, bit in zip(low_pos, low_values):
        values[pos] = bit

    sums = {b: 0.0 for b in Behavior}
    p_max = 0.0
    for h in itertools.product((0, 1), repeat=len(other_high)):
        w = 1.0
        for pos, bit in zip(other_high, h):
            p = probs[comp.input_nets[pos]]
            w *= p if bit else 1.0 - p
        if w == 0.0:
            continue
        for pos, bit in zip(other_high, h):
            values[pos] = bit
        fixed = tuple(
            values[i] for i in range(len(values)) if i != secret_index
        )
        behavior = classify_behavior(comp.truth_table, secret_index, fixed)
        sums[behavior] += w
        if behavior in LEAKING_BEHAVIORS and w > p_max:
            p_max = w
    return AbstractChannelStats(
        low_assignment=tuple(low_values),
        p_low=p_low,
        p_buffer=sums[Behavior.BUFFER],
        p_not=sums[Behavior.NOT],
        p_stuck0=sums[Behavior.STUCK0],
        p_stuck1=sums[Behavior.STUCK1],
        p_max=p_max,
    )


def advanced_channel_value(stats: AbstractChannelStats) -> float:
    """Advanced multiplier of one abstract channel; in [0, max(p_buffer, p_not)]."""
    p_threat = max(stats.p_buffer, stats.p_not)
    p_leak = p_threat - ((1.0 - p_threat) - abs(stats.p_stuck1 - stats.p_stuck0))
    return max(p_leak, stats.p_max)


def low_assignment_profiles(
    comp: ChannelComposition, secret_index: int, probs: Mapping[int, float]
) -> tuple[LowAssignmentProfile, ...]:
    """Per-low-assignment summary over every assignment, including impossible ones."""
    low_pos = comp.low_positions()
    profiles = []
    for low in itertools.product((0, 1), repeat=len(low_pos)):
        stats = abstract_channel_stats(comp, secret_index, low, probs)
        profiles.append(
            LowAssignmentProfile(
                values=low,
                p_low=stats.p_low,
                leaking=stats.p_buffer + stats.p_not > 0.0,
                advanced=advanced_channel_value(stats),
            )
        )
    return tuple(profiles)


def composition_multipliers(
    comp: ChannelComposition, secret_index: int, probs: Mapping[int, float]
) -> ChannelMultipliers:
    """The [common, advanced] multiplier pair for one designated secret input.

    Impossible low assignments (p_low = 0) are skipped; ties on the advanced
    maximum are broken toward the lowest binary low assignment.
    """
    low_pos = comp.low_positions()
    common = 0.0
    best = 0.0
    worst: tuple[int, ...] | None = None
    for profile in low_assignment_profiles(comp, secret_index, probs):
        if profile.p_low == 0.0:
            continue
        if profile.leaking:
            common += profile.p_low
        if profile.advanced > best:
            best = profile.advanced
            worst = profile.values
    assignment = None
    if worst is not None and low_pos:
        assignment = tuple(
            (comp.input_nets[pos], bit) for pos, bit in zip(low_pos, worst)
        )
    return ChannelMultipliers(
        common=common, advanced=best, worst_low_assignment=assignment
    )
