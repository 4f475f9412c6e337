"""Propagation of per-secret leakage vectors through the cluster graph.

Every secret source starts at [1.0, 1.0].  Crossing a composition multiplies
the vector element-wise by the composition's multipliers for the arriving
input; registers are identity channels.  Reconvergent alternatives combine by
per-component maximum, and relaxation runs for at most one round per cluster
node, which is exact because all multipliers are at most 1 and the best path
is therefore simple.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .channel import ChannelMultipliers
from .cluster import ClusterGraph
from .errors import PathUnavailable
from .graph import FlowGraph
from .netlist import BitRef

_CONVERGED = 1e-15


@dataclass(frozen=True)
class LeakageVector:
    common: float
    advanced: float

    def as_pair(self) -> tuple[float, float]:
        return (self.common, self.advanced)


ZERO = LeakageVector(0.0, 0.0)
SOURCE = LeakageVector(1.0, 1.0)


@dataclass(frozen=True)
class PathStep:
    composition: int
    input_net: int
    common: float
    advanced: float
    trigger: tuple[tuple[int, int], ...] | None


@dataclass(frozen=True)
class SecretResult:
    """Leakage of one secret bit at every output, plus the worst path.

    ``final`` is the vector at the output whose advanced component is maximal
    (ties: larger common, then lowest output index); ``steps`` replays the
    argmax predecessors of the advanced component from that output back to
    the source and is empty when nothing leaks.
    """

    secret: BitRef
    outputs: tuple[tuple[BitRef, LeakageVector], ...]
    final: LeakageVector
    winning_output: BitRef | None
    steps: tuple[PathStep, ...]
    rounds: int
    net_leakage: dict[int, LeakageVector]


def propagate(
    clusters: ClusterGraph,
    multipliers: Mapping[tuple[int, int], ChannelMultipliers],
    graph: FlowGraph,
    secret: BitRef,
) -> SecretResult:
    """Relax leakage vectors to a fixpoint and record the worst path."""
    val_c: dict[int, float] = {secret.net: 1.0}
    val_a: dict[int, float] = {secret.net: 1.0}
    back: dict[int, tuple] = {}

    comp_inputs = {
        comp.id: [(i, comp.input_nets[i]) for i in comp.high_positions()]
        for comp in clusters.compositions
    }
    node_count = len(clusters.node_order)

    rounds = 0
    for _ in range(node_count):
        rounds += 1
        delta = 0.0
        for kind, idx in clusters.node_order:
            if kind == "comp":
                comp = clusters.compositions[idx]
                out = comp.output_net
                cand_c = 0.0
                cand_a = 0.0
                cand_src: tuple | None = None
                for pos, net in comp_inputs[idx]:
                    pc = val_c.get(net, 0.0)
                    pa = val_a.get(net, 0.0)
                    if pc == 0.0 and pa == 0.0:
                        continue
                    m = multipliers[(idx, pos)]
                    cc = pc * m.common
                    aa = pa * m.advanced
                    if cc > cand_c:
                        cand_c = cc
                    if aa > cand_a:
                        cand_a = aa
                        cand_src = ("comp", idx, pos, net)
            else:
                reg = clusters.registers[idx]
                out = reg.output_net
                cand_c = val_c.get(reg.input_net, 0.0)
                cand_a = val_a.get(reg.input_net, 0.0)
                cand_src = ("reg", idx, None, reg.input_net)
            old_c = val_c.get(out, 0.0)
            old_a = val_a.get(out, 0.0)
            if cand_c > old_c:
                delta = max(delta, cand_c - old_c)
                val_c[out] = cand_c
            if cand_a > old_a:
                delta = max(delta, cand_a - old_a)
                val_a[out] = cand_a
                back[out] = cand_src
        if delta <= _CONVERGED:
            break

    outputs = tuple(
        (b, LeakageVector(val_c.get(b.net, 0.0), val_a.get(b.net, 0.0)))
        for b in graph.output_bits
    )
    final = ZERO
    winner: BitRef | None = None
    for b, vec in outputs:
        if (vec.advanced, vec.common) > (final.advanced, final.common):
            final = vec
            winner = b
    if final == ZERO:
        winner = None

    steps: list[PathStep] = []
    if winner is not None and final.advanced > 0.0:
        net = winner.net
        for _ in range(len(back) + 1):
            if net == secret.net:
                break
            kind, idx, pos, pred = back[net]
            if kind == "comp":
                m = multipliers[(idx, pos)]
                steps.append(
                    PathStep(
                        composition=idx,
                        input_net=pred,
                        common=m.common,
                        advanced=m.advanced,
                        trigger=m.worst_low_assignment,
                    )
                )
            net = pred
        else:
            raise RuntimeError("leakage path reconstruction did not terminate")
        steps.reverse()

    net_leakage = {
        net: LeakageVector(val_c.get(net, 0.0), val_a.get(net, 0.0))
        for net in set(val_c) | set(val_a)
    }
    return SecretResult(
        secret=secret,
        outputs=outputs,
        final=final,
        winning_output=winner,
        steps=tuple(steps),
        rounds=rounds,
        net_leakage=net_leakage,
    )


def worst_path(result: SecretResult) -> tuple[PathStep, ...]:
    """The argmax leakage path; raises if the secret never reaches an output."""
    if result.winning_output is None or result.final.advanced <= 0.0:
        raise PathUnavailable(result.secret.ref())
    return result.steps
