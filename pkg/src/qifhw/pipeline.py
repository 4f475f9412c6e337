"""End-to-end analysis: parse -> graph -> cluster -> quantify -> propagate -> report."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import __version__
from .attack import apply_model, compute_controllability
from .channel import ChannelMultipliers, composition_multipliers
from .cluster import ClusterGraph, cluster
from .graph import FlowGraph, build_graph, estimate_probs, propagate_taint
from .netlist import AnalysisConfig, Netlist
from .propagate import SecretResult, propagate
from .report import AnalysisReport, build_report


@dataclass(frozen=True)
class AnalysisBundle:
    """All intermediate artifacts of one analysis run."""

    netlist: Netlist
    config: AnalysisConfig
    graph: FlowGraph
    taint: frozenset[int]
    probs: dict[int, float]
    clusters: ClusterGraph
    controllability: frozenset[int]
    multipliers: dict[tuple[int, int], ChannelMultipliers]
    results: tuple[SecretResult, ...]
    report: AnalysisReport


def multiplier_table(
    clusters: ClusterGraph,
    probs: dict[int, float],
    controllability: frozenset[int],
    model: str,
) -> dict[tuple[int, int], ChannelMultipliers]:
    """Attack-model-adjusted multipliers for every (composition, high input) pair."""
    table: dict[tuple[int, int], ChannelMultipliers] = {}
    for comp in clusters.compositions:
        for pos in comp.high_positions():
            base = composition_multipliers(comp, pos, probs)
            table[(comp.id, pos)] = apply_model(
                base, comp, pos, controllability, model, probs
            )
    return table


def analyze_design(
    netlist: Netlist, config: AnalysisConfig, threads: int = 1
) -> AnalysisBundle:
    """Run the full analysis for every configured secret bit."""
    start = time.perf_counter()
    graph = build_graph(netlist)
    taint = propagate_taint(graph, config)
    probs = estimate_probs(graph, config)
    clusters = cluster(graph, taint, config)
    controllability = compute_controllability(graph, taint)
    table = multiplier_table(clusters, probs, controllability, config.attack_model)

    def run_secret(secret) -> SecretResult:
        return propagate(clusters, table, graph, secret)

    if threads > 1 and len(config.secrets) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = tuple(pool.map(run_secret, config.secrets))
    else:
        results = tuple(run_secret(s) for s in config.secrets)

    report = build_report(
        netlist, config, list(results), time.perf_counter() - start, __version__
    )
    return AnalysisBundle(
        netlist=netlist,
        config=config,
        graph=graph,
        taint=taint,
        probs=probs,
        clusters=clusters,
        controllability=controllability,
        multipliers=table,
        results=results,
        report=report,
    )
