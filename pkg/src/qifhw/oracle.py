"""Brute-force reference: exact behavior partitions and Bayes vulnerability.

Everything here enumerates assignments directly on the netlist's cells with
its own evaluator; no truth-table or clustering code is shared with the
analyzer, so agreement between the two is a meaningful check rather than a
tautology.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .channel import AbstractChannelStats, ChannelMultipliers
from .errors import BudgetExceeded, SequentialUnsupported
from .netlist import AnalysisConfig, BitRef, Netlist


@dataclass(frozen=True)
class EnumerationBudget:
    max_total_input_bits: int = 20


DEFAULT_BUDGET = EnumerationBudget()


def _gate(kind: str, v: list[int]) -> int:
    if kind == "NOT":
        return v[0] ^ 1
    if kind in ("BUF", "DFF"):
        return v[0]
    if kind == "AND":
        return v[0] and v[1]
    if kind == "NAND":
        return (v[0] and v[1]) ^ 1
    if kind == "OR":
        return v[0] or v[1]
    if kind == "NOR":
        return (v[0] or v[1]) ^ 1
    if kind == "XOR":
        return v[0] ^ v[1]
    if kind == "XNOR":
        return v[0] ^ v[1] ^ 1
    if kind == "MUX":
        return v[2] if v[0] else v[1]
    raise ValueError(f"cannot evaluate cell kind {kind}")


class _Simulator:
    """Memoized recursive evaluation of a combinational netlist."""

    def __init__(self, netlist: Netlist, treat_dff_as_wire: bool = False):
        self.cells = netlist.cells
        self.by_output = {c.output: i for i, c in enumerate(netlist.cells)}
        if any(c.kind == "DFF" for c in netlist.cells):
            if not treat_dff_as_wire:
                raise SequentialUnsupported(
                    "design contains registers; enable one-step unrolling"
                )
            self._check_no_feedback()

    def _check_no_feedback(self) -> None:
        # With DFFs treated as wires, any cycle means register feedback.
        color: dict[int, int] = {}

        def visit(ci: int) -> None:
            color[ci] = 1
            for net in self.cells[ci].inputs:
                d = self.by_output.get(net)
                if d is None:
                    continue
                if color.get(d) == 1:
                    raise SequentialUnsupported(
                        f"register feedback through cell {d} cannot be unrolled"
                    )
                if d not in color:
                    visit(d)
            color[ci] = 2

        for ci in range(len(self.cells)):
            if ci not in color:
                visit(ci)

    def run(self, assignment: dict[int, int]) -> dict[int, int]:
        values = {0: 0, 1: 1}
        values.update(assignment)

        def net_value(net: int) -> int:
            if net in values:
                return values[net]
            cell = self.cells[self.by_output[net]]
            result = _gate(cell.kind, [net_value(n) for n in cell.inputs])
            values[net] = result
            return result

        for cell in self.cells:
            net_value(cell.output)
        return values


def _check_budget(netlist: Netlist, budget: EnumerationBudget) -> tuple[BitRef, ...]:
    bits = netlist.input_bits()
    if len(bits) > budget.max_total_input_bits:
        raise BudgetExceeded(len(bits), budget.max_total_input_bits)
    return bits


def _single_output_net(netlist: Netlist) -> int:
    outs = netlist.output_bits()
    if len(outs) != 1:
        raise ValueError(
            f"expected a single-output cone, design has {len(outs)} output bits"
        )
    return outs[0].net


def exact_behavior_partition(
    netlist: Netlist,
    secret: BitRef,
    low_assignment: dict[int, int],
    probs: dict[int, float],
    budget: EnumerationBudget = DEFAULT_BUDGET,
    _sim: _Simulator | None = None,
) -> AbstractChannelStats:
    """Exact behavior probabilities of a single-output cone under one low assignment.

    Input bits neither secret nor fixed by ``low_assignment`` are enumerated
    as other-high, weighted by their per-bit probabilities.
    """
    bits = _check_budget(netlist, budget)
    out_net = _single_output_net(netlist)
    sim = _sim if _sim is not None else _Simulator(netlist)
    highs = sorted(
        b.net for b in bits if b.net != secret.net and b.net not in low_assignment
    )

    p_low = 1.0
    for net in sorted(low_assignment):
        p = probs[net]
        p_low *= p if low_assignment[net] else 1.0 - p

    p_buffer = p_not = p_stuck0 = p_stuck1 = 0.0
    p_max = 0.0
    base = dict(low_assignment)
    for h in itertools.product((0, 1), repeat=len(highs)):
        w = 1.0
        for net, bit in zip(highs, h):
            p = probs[net]
            w *= p if bit else 1.0 - p
        if w == 0.0:
            continue
        for net, bit in zip(highs, h):
            base[net] = bit
        base[secret.net] = 0
        out0 = sim.run(base)[out_net]
        base[secret.net] = 1
        out1 = sim.run(base)[out_net]
        if out0 == out1:
            if out0:
                p_stuck1 += w
            else:
                p_stuck0 += w
        else:
            if out1:
                p_buffer += w
            else:
                p_not += w
            if w > p_max:
                p_max = w
    return AbstractChannelStats(
        low_assignment=tuple(low_assignment[n] for n in sorted(low_assignment)),
        p_low=p_low,
        p_buffer=p_buffer,
        p_not=p_not,
        p_stuck0=p_stuck0,
        p_stuck1=p_stuck1,
        p_max=p_max,
    )


def oracle_multipliers(
    netlist: Netlist,
    secret: BitRef,
    config: AnalysisConfig,
    budget: EnumerationBudget = DEFAULT_BUDGET,
) -> ChannelMultipliers:
    """Independent recomputation of a cone's [common, advanced] multipliers.

    Same contract as the analyzer's composition multipliers: low inputs are
    the non-secret input bits, enumerated most-significant-first by net id.
    """
    bits = _check_budget(netlist, budget)
    _single_output_net(netlist)
    sim = _Simulator(netlist)
    secret_nets = {b.net for b in config.secrets}
    lows = sorted(b.net for b in bits if b.net not in secret_nets)

    common = 0.0
    best = 0.0
    worst: tuple[tuple[int, int], ...] | None = None
    for low in itertools.product((0, 1), repeat=len(lows)):
        assignment = dict(zip(lows, low))
        stats = exact_behavior_partition(
            netlist, secret, assignment, config.probabilities, budget, _sim=sim
        )
        threat = max(stats.p_buffer, stats.p_not)
        leak = threat - ((1.0 - threat) - abs(stats.p_stuck1 - stats.p_stuck0))
        value = leak if leak > stats.p_max else stats.p_max
        if stats.p_low == 0.0:
            continue
        if stats.p_buffer + stats.p_not > 0.0:
            common += stats.p_low
        if value > best:
            best = value
            worst = tuple(zip(lows, low))
    if not lows:
        worst = None
    return ChannelMultipliers(common=common, advanced=best, worst_low_assignment=worst)


def exact_bayes_vulnerability(
    netlist: Netlist,
    secret: BitRef,
    config: AnalysisConfig,
    budget: EnumerationBudget = DEFAULT_BUDGET,
    unroll_registers: bool = True,
) -> tuple[float, float]:
    """Exact prior and posterior one-guess vulnerability of a secret bit.

    The adversary observes every output bit and every configured low input
    bit; all other inputs are unobserved noise.  Registers are replaced by
    wires (one-step unrolling); feedback through registers is rejected.
    """
    bits = _check_budget(netlist, budget)
    sim = _Simulator(netlist, treat_dff_as_wire=unroll_registers)

    p_secret = config.probabilities[secret.net]
    prior = max(p_secret, 1.0 - p_secret)

    low_nets = sorted(b.net for b in config.low_inputs)
    out_nets = [b.net for b in netlist.output_bits()]
    all_nets = [b.net for b in bits]

    joint: dict[tuple, dict[int, float]] = {}
    for assignment_bits in itertools.product((0, 1), repeat=len(all_nets)):
        w = 1.0
        for net, bit in zip(all_nets, assignment_bits):
            p = config.probabilities[net]
            w *= p if bit else 1.0 - p
        if w == 0.0:
            continue
        assignment = dict(zip(all_nets, assignment_bits))
        values = sim.run(assignment)
        obs = (
            tuple(values[n] for n in out_nets),
            tuple(assignment[n] for n in low_nets),
        )
        bucket = joint.setdefault(obs, {0: 0.0, 1: 0.0})
        bucket[assignment[secret.net]] += w
    posterior = sum(max(bucket[0], bucket[1]) for bucket in joint.values())
    return prior, posterior
