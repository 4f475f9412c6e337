"""Dataflow graph over a netlist: structure, taint labels, signal probabilities.

The graph is timing-independent: DFFs appear as ordinary nodes whose output
edges are marked as register edges and removed for topological ordering, so
sequential feedback loops are legal while the combinational part stays a DAG.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .netlist import AnalysisConfig, BitRef, Netlist

# Driver tags: ("cell", index) | ("input", port, bit) | ("const", value)
Driver = tuple


@dataclass(frozen=True)
class FlowGraph:
    netlist: Netlist
    net_driver: dict[int, Driver]
    net_readers: dict[int, tuple[int, ...]]  # net -> reading cell indices
    input_bits: tuple[BitRef, ...]
    output_bits: tuple[BitRef, ...]
    topo_cells: tuple[int, ...]  # all cells, register output edges removed
    register_cells: frozenset[int]

    def register_edges(self) -> tuple[tuple[int, int], ...]:
        """Edges crossing a DFF, as (dff cell index, reader cell index) pairs."""
        edges = []
        for d in sorted(self.register_cells):
            q = self.netlist.cells[d].output
            for r in self.net_readers.get(q, ()):
                edges.append((d, r))
        return tuple(edges)


def build_graph(netlist: Netlist) -> FlowGraph:
    """Build the dataflow graph with register edges marked."""
    net_driver: dict[int, Driver] = {0: ("const", 0), 1: ("const", 1)}
    for p in netlist.ports:
        if p.direction != "in":
            continue
        for i, net in enumerate(p.bits):
            net_driver[net] = ("input", p.name, i)
    for i, c in enumerate(netlist.cells):
        net_driver[c.output] = ("cell", i)

    readers: dict[int, list[int]] = {}
    for i, c in enumerate(netlist.cells):
        for net in c.inputs:
            lst = readers.setdefault(net, [])
            if not lst or lst[-1] != i:
                lst.append(i)

    registers = frozenset(
        i for i, c in enumerate(netlist.cells) if c.kind == "DFF"
    )

    # Topological order via Kahn with a min-heap for a canonical result.
    indeg = [0] * len(netlist.cells)
    for i, c in enumerate(netlist.cells):
        for net in dict.fromkeys(c.inputs):  # dedupe: readers lists are per net
            d = net_driver.get(net)
            if d is not None and d[0] == "cell" and d[1] not in registers:
                indeg[i] += 1
    heap = [i for i, d in enumerate(indeg) if d == 0]
    heapq.heapify(heap)
    topo: list[int] = []
    while heap:
        i = heapq.heappop(heap)
        topo.append(i)
        if i in registers:
            continue
        for r in readers.get(netlist.cells[i].output, ()):
            indeg[r] -= 1
            if indeg[r] == 0:
                heapq.heappush(heap, r)

    return FlowGraph(
        netlist=netlist,
        net_driver=net_driver,
        net_readers={n: tuple(r) for n, r in readers.items()},
        input_bits=netlist.input_bits(),
        output_bits=netlist.output_bits(),
        topo_cells=tuple(topo),
        register_cells=registers,
    )


def propagate_taint(graph: FlowGraph, config: AnalysisConfig) -> frozenset[int]:
    """Least fixpoint of forward taint: nets reachable from any secret input bit.

    Taint crosses registers; a net is high iff it is in the returned set.
    """
    high: set[int] = set()
    work = sorted(b.net for b in config.secrets)
    for net in work:
        high.add(net)
    while work:
        net = work.pop()
        for ci in graph.net_readers.get(net, ()):
            out = graph.netlist.cells[ci].output
            if out not in high:
                high.add(out)
                work.append(out)
    return frozenset(high)


def _cell_prob(kind: str, p: list[float]) -> float:
    if kind == "NOT":
        return 1.0 - p[0]
    if kind == "BUF":
        return p[0]
    if kind == "AND":
        return p[0] * p[1]
    if kind == "NAND":
        return 1.0 - p[0] * p[1]
    if kind == "OR":
        return 1.0 - (1.0 - p[0]) * (1.0 - p[1])
    if kind == "NOR":
        return (1.0 - p[0]) * (1.0 - p[1])
    if kind == "XOR":
        return p[0] * (1.0 - p[1]) + p[1] * (1.0 - p[0])
    if kind == "XNOR":
        return 1.0 - (p[0] * (1.0 - p[1]) + p[1] * (1.0 - p[0]))
    if kind == "MUX":
        return (1.0 - p[0]) * p[1] + p[0] * p[2]
    raise ValueError(f"no probability rule for cell kind {kind}")


def estimate_probs(graph: FlowGraph, config: AnalysisConfig) -> dict[int, float]:
    """Per-net probability-of-1 under independent-bit propagation.

    A cell's inputs are treated as independent, so reconvergent fanout is
    approximated (e.g. XOR(a, a) estimates 0.5, not 0).  A DFF's steady-state
    output probability equals its input's probability; register feedback is
    resolved by bounded sweeps.
    """
    netlist = graph.netlist
    probs: dict[int, float] = {0: 0.0, 1: 1.0}
    for b in graph.input_bits:
        probs[b.net] = config.probabilities[b.net]
    dffs = sorted(graph.register_cells)
    for d in dffs:
        probs[netlist.cells[d].output] = 0.5

    for _ in range(512):
        for ci in graph.topo_cells:
            cell = netlist.cells[ci]
            if cell.kind == "DFF":
                continue
            probs[cell.output] = _cell_prob(
                cell.kind, [probs[n] for n in cell.inputs]
            )
        if not dffs:
            return probs
        delta = 0.0
        for d in dffs:
            cell = netlist.cells[d]
            new = probs[cell.inputs[0]]
            delta = max(delta, abs(new - probs[cell.output]))
            probs[cell.output] = new
        if delta <= 1e-12:
            break

    # Final combinational pass so downstream nets see the settled DFF values.
    for ci in graph.topo_cells:
        cell = netlist.cells[ci]
        if cell.kind != "DFF":
            probs[cell.output] = _cell_prob(
                cell.kind, [probs[n] for n in cell.inputs]
            )
    return probs
