"""Attack models: controllability analysis and multiplier transforms.

Under observe, the attacker only watches low inputs and outputs.  Under
set-inputs, low inputs whose transitive fanin is free of registers and secret
bits can be fixed to the most favorable value.  Under set-conds, every low
input is treated as settable, independently and possibly inconsistently.
Only the common multiplier is ever modified; confusion from unknown secrets
(advanced) is unaffected by attacker control.
"""

from __future__ import annotations

import itertools
from dataclasses import replace
from typing import Mapping

from .channel import ChannelMultipliers, low_assignment_profiles
from .cluster import ChannelComposition
from .graph import FlowGraph
from .netlist import CONST_NETS

OBSERVE = "observe"
SET_INPUTS = "set-inputs"
SET_CONDS = "set-conds"


def compute_controllability(
    graph: FlowGraph, taint: frozenset[int]
) -> frozenset[int]:
    """Nets settable from primary inputs alone.

    A net is input-controllable iff its transitive fanin contains no DFF and
    no secret input bit; everything else is state-dependent.
    """
    controllable: set[int] = set(CONST_NETS)
    for b in graph.input_bits:
        if b.net not in taint:
            controllable.add(b.net)
    for ci in graph.topo_cells:
        cell = graph.netlist.cells[ci]
        if cell.kind == "DFF":
            continue
        if all(n in controllable for n in cell.inputs):
            controllable.add(cell.output)
    return frozenset(controllable)


def apply_model(
    multipliers: ChannelMultipliers,
    comp: ChannelComposition,
    secret_index: int,
    controllability: frozenset[int],
    model: str,
    probs: Mapping[int, float],
) -> ChannelMultipliers:
    """Transform observe-model multipliers for the selected attack model."""
    if model == OBSERVE:
        return multipliers
    low_pos = comp.low_positions()
    if not low_pos:
        return multipliers
    profiles = low_assignment_profiles(comp, secret_index, probs)

    if model == SET_CONDS:
        common = 1.0 if any(p.leaking for p in profiles) else 0.0
        return replace(multipliers, common=common)

    if model != SET_INPUTS:
        raise ValueError(f"unknown attack model '{model}'")

    leaking = {p.values: p.leaking for p in profiles}
    settable = [
        j
        for j, pos in enumerate(low_pos)
        if comp.input_nets[pos] in controllability
    ]
    stochastic = [j for j in range(len(low_pos)) if j not in settable]
    best = 0.0
    for fixed in itertools.product((0, 1), repeat=len(settable)):
        total = 0.0
        for free in itertools.product((0, 1), repeat=len(stochastic)):
            values = [0] * len(low_pos)
            for j, bit in zip(settable, fixed):
                values[j] = bit
            w = 1.0
            for j, bit in zip(stochastic, free):
                values[j] = bit
                p = probs[comp.input_nets[low_pos[j]]]
                w *= p if bit else 1.0 - p
            if leaking[tuple(values)]:
                total += w
        if total > best:
            best = total
    return replace(multipliers, common=best)
