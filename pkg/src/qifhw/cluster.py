"""Clustering of tainted combinational logic into single-output channel compositions.

Cones are grown greedily in reverse topological order: starting from each
unassigned tainted cell output, tainted combinational fanin cells are absorbed
while the distinct-leaf count stays within the configured bound and no absorbed
output is read outside the cone.  DFFs are never absorbed; untainted logic is
never clustered and shows up as low leaves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .graph import FlowGraph
from .netlist import AnalysisConfig, CONST_NETS

ROLE_HIGH = "high"
ROLE_LOW = "low"


@dataclass(frozen=True)
class ChannelComposition:
    """A clustered single-output Boolean cone with role-partitioned inputs.

    ``truth_table`` has one bit per row in natural binary order over
    ``input_nets``, the first input being the most significant bit.
    """

    id: int
    output_net: int
    input_nets: tuple[int, ...]
    roles: tuple[str, ...]
    truth_table: tuple[int, ...]
    member_cells: frozenset[int]

    def high_positions(self) -> tuple[int, ...]:
        return tuple(i for i, r in enumerate(self.roles) if r == ROLE_HIGH)

    def low_positions(self) -> tuple[int, ...]:
        return tuple(i for i, r in enumerate(self.roles) if r == ROLE_LOW)


@dataclass(frozen=True)
class RegisterLink:
    """A tainted DFF treated as an identity channel across clock cycles."""

    cell: int
    input_net: int
    output_net: int


@dataclass(frozen=True)
class ClusterGraph:
    compositions: tuple[ChannelComposition, ...]
    registers: tuple[RegisterLink, ...]
    # tainted net -> ("comp", id) | ("reg", index) | ("source", net)
    producer: dict[int, tuple[str, int]]
    # evaluation order over ("comp", id) / ("reg", index), register edges ignored
    node_order: tuple[tuple[str, int], ...]


def eval_cell(kind: str, values: list[int]) -> int:
    if kind == "NOT":
        return 1 - values[0]
    if kind in ("BUF", "DFF"):
        return values[0]
    if kind == "AND":
        return values[0] & values[1]
    if kind == "NAND":
        return 1 - (values[0] & values[1])
    if kind == "OR":
        return values[0] | values[1]
    if kind == "NOR":
        return 1 - (values[0] | values[1])
    if kind == "XOR":
        return values[0] ^ values[1]
    if kind == "XNOR":
        return 1 - (values[0] ^ values[1])
    if kind == "MUX":
        return values[2] if values[0] else values[1]
    raise ValueError(f"cannot evaluate cell kind {kind}")


def build_truth_table(
    members: Iterable[int],
    output_net: int,
    input_nets: tuple[int, ...],
    graph: FlowGraph,
) -> tuple[int, ...]:
    """Evaluate the cone over all 2^k leaf assignments in natural binary order."""
    netlist = graph.netlist
    member_set = set(members)
    order = [ci for ci in graph.topo_cells if ci in member_set]
    k = len(input_nets)
    table = []
    for row in range(1 << k):
        values = {0: 0, 1: 1}
        for j, net in enumerate(input_nets):
            values[net] = (row >> (k - 1 - j)) & 1
        for ci in order:
            cell = netlist.cells[ci]
            values[cell.output] = eval_cell(
                cell.kind, [values[n] for n in cell.inputs]
            )
        table.append(values[output_net])
    return tuple(table)


def truth_table_hex(table: tuple[int, ...]) -> str:
    """Hex encoding of the table, row 0 as the least significant bit."""
    value = 0
    for i, bit in enumerate(table):
        value |= bit << i
    return hex(value)


def cluster(
    graph: FlowGraph, taint: frozenset[int], config: AnalysisConfig
) -> ClusterGraph:
    """Partition the tainted combinational logic into channel compositions.

    Every tainted combinational cell lands in exactly one composition; a
    single cell always forms a valid cluster even if its arity exceeds the
    leaf bound.
    """
    netlist = graph.netlist
    out_port_nets = {b.net for b in graph.output_bits}
    assigned: dict[int, int] = {}
    comps: list[ChannelComposition] = []

    for root in reversed(graph.topo_cells):
        cell = netlist.cells[root]
        if cell.kind == "DFF" or cell.output not in taint or root in assigned:
            continue
        members = {root}
        leaves = {n for n in cell.inputs if n not in CONST_NETS}
        while True:
            absorbed = False
            for net in sorted(leaves):
                if net not in taint or net in out_port_nets:
                    continue
                driver = graph.net_driver[net]
                if driver[0] != "cell":
                    continue
                di = driver[1]
                dcell = netlist.cells[di]
                if dcell.kind == "DFF" or di in assigned:
                    continue
                if any(r not in members for r in graph.net_readers.get(net, ())):
                    continue
                new_leaves = (leaves - {net}) | {
                    n for n in dcell.inputs if n not in CONST_NETS
                }
                if len(new_leaves) > config.max_cluster_inputs:
                    continue
                members.add(di)
                leaves = new_leaves
                absorbed = True
                break
            if not absorbed:
                break
        input_nets = tuple(sorted(leaves))
        roles = tuple(ROLE_HIGH if n in taint else ROLE_LOW for n in input_nets)
        table = build_truth_table(members, cell.output, input_nets, graph)
        comp = ChannelComposition(
            id=len(comps),
            output_net=cell.output,
            input_nets=input_nets,
            roles=roles,
            truth_table=table,
            member_cells=frozenset(members),
        )
        comps.append(comp)
        for m in members:
            assigned[m] = comp.id

    registers = tuple(
        RegisterLink(ci, netlist.cells[ci].inputs[0], netlist.cells[ci].output)
        for ci in sorted(graph.register_cells)
        if netlist.cells[ci].output in taint
    )

    producer: dict[int, tuple[str, int]] = {}
    for b in graph.input_bits:
        if b.net in taint:
            producer[b.net] = ("source", b.net)
    for comp in comps:
        for ci in sorted(comp.member_cells):
            producer[netlist.cells[ci].output] = ("comp", comp.id)
    for i, reg in enumerate(registers):
        producer[reg.output_net] = ("reg", i)

    topo_pos = {ci: pos for pos, ci in enumerate(graph.topo_cells)}
    nodes: list[tuple[int, tuple[str, int]]] = []
    for comp in comps:
        root = graph.net_driver[comp.output_net][1]
        nodes.append((topo_pos[root], ("comp", comp.id)))
    for i, reg in enumerate(registers):
        nodes.append((topo_pos[reg.cell], ("reg", i)))
    nodes.sort()

    return ClusterGraph(
        compositions=tuple(comps),
        registers=registers,
        producer=producer,
        node_order=tuple(n for _, n in nodes),
    )


def composition_to_dict(comp: ChannelComposition) -> dict:
    """Debug-dump form of a composition, one JSON object per cluster."""
    return {
        "id": comp.id,
        "output": comp.output_net,
        "inputs": list(comp.input_nets),
        "roles": list(comp.roles),
        "truth_table": truth_table_hex(comp.truth_table),
        "cells": sorted(comp.member_cells),
    }
