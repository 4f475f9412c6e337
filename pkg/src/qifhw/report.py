"""Threshold classification and report / plot-data emission.

Emitted bytes are canonical: secret bits ordered by port then index, JSON
floats rendered with 17 significant digits, and no timing or other
run-dependent data in the output stream, so identical analyses produce
byte-identical reports.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .netlist import AnalysisConfig, Netlist
from .propagate import LeakageVector, PathStep, SecretResult

DETECTED = "Detected"
WARNING = "Warning"
NEGLIGIBLE = "Negligible"


def classify(vector: LeakageVector, config: AnalysisConfig) -> str:
    """Classify on the advanced component; both thresholds are inclusive."""
    if vector.advanced >= config.detect_threshold:
        return DETECTED
    if vector.advanced >= config.warn_threshold:
        return WARNING
    return NEGLIGIBLE


@dataclass(frozen=True)
class SecretEntry:
    secret: str
    common: float
    advanced: float
    classification: str
    output: str | None
    path: tuple[int, ...]
    steps: tuple[PathStep, ...]


@dataclass(frozen=True)
class AnalysisReport:
    version: str
    design: str
    attack_model: str
    max_cluster_inputs: int
    detect_threshold: float
    warn_threshold: float
    secrets: tuple[str, ...]
    low_inputs: tuple[str, ...]
    probabilities: tuple[tuple[str, float], ...]
    entries: tuple[SecretEntry, ...]
    detected: int
    warning: int
    negligible: int
    avg_detected: tuple[float, float] | None
    avg_negligible: tuple[float, float] | None
    wall_clock_seconds: float  # diagnostic only, never serialized


def _component_average(entries: list[SecretEntry]) -> tuple[float, float] | None:
    if not entries:
        return None
    n = len(entries)
    return (
        sum(e.common for e in entries) / n,
        sum(e.advanced for e in entries) / n,
    )


def build_report(
    netlist: Netlist,
    config: AnalysisConfig,
    results: list[SecretResult],
    elapsed: float,
    version: str,
) -> AnalysisReport:
    entries = []
    for result in results:
        vec = result.final
        entries.append(
            SecretEntry(
                secret=result.secret.ref(),
                common=vec.common,
                advanced=vec.advanced,
                classification=classify(vec, config),
                output=result.winning_output.ref() if result.winning_output else None,
                path=tuple(step.composition for step in result.steps),
                steps=result.steps,
            )
        )
    by_class = {DETECTED: [], WARNING: [], NEGLIGIBLE: []}
    for e in entries:
        by_class[e.classification].append(e)
    net_to_ref = {b.net: b.ref() for b in netlist.input_bits()}
    return AnalysisReport(
        version=version,
        design=netlist.name,
        attack_model=config.attack_model,
        max_cluster_inputs=config.max_cluster_inputs,
        detect_threshold=config.detect_threshold,
        warn_threshold=config.warn_threshold,
        secrets=tuple(b.ref() for b in config.secrets),
        low_inputs=tuple(b.ref() for b in config.low_inputs),
        probabilities=tuple(
            (net_to_ref[b.net], config.probabilities[b.net])
            for b in sorted(netlist.input_bits())
        ),
        entries=tuple(entries),
        detected=len(by_class[DETECTED]),
        warning=len(by_class[WARNING]),
        negligible=len(by_class[NEGLIGIBLE]),
        avg_detected=_component_average(by_class[DETECTED]),
        avg_negligible=_component_average(by_class[NEGLIGIBLE]),
        wall_clock_seconds=elapsed,
    )


def _write_json(value, out: list[str]) -> None:
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(format(value, ".17g"))
    elif isinstance(value, dict):
        out.append("{")
        for i, (k, v) in enumerate(value.items()):
            if i:
                out.append(",")
            out.append(json.dumps(k))
            out.append(":")
            _write_json(v, out)
        out.append("}")
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, v in enumerate(value):
            if i:
                out.append(",")
            _write_json(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(value)!r}")


def dumps_canonical(value) -> bytes:
    """Deterministic JSON bytes with floats at 17 significant digits."""
    out: list[str] = []
    _write_json(value, out)
    out.append("\n")
    return "".join(out).encode("utf-8")


def _step_to_dict(step: PathStep) -> dict:
    return {
        "composition": step.composition,
        "input_net": step.input_net,
        "common": step.common,
        "advanced": step.advanced,
        "trigger": [list(pair) for pair in step.trigger]
        if step.trigger is not None
        else None,
    }


def report_to_dict(report: AnalysisReport) -> dict:
    return {
        "tool": "qifhw",
        "version": report.version,
        "design": report.design,
        "config": {
            "attack_model": report.attack_model,
            "max_cluster_inputs": report.max_cluster_inputs,
            "detect_threshold": report.detect_threshold,
            "warn_threshold": report.warn_threshold,
            "secrets": list(report.secrets),
            "low_inputs": list(report.low_inputs),
            "input_probabilities": {ref: p for ref, p in report.probabilities},
        },
        "results": [
            {
                "secret": e.secret,
                "common": e.common,
                "advanced": e.advanced,
                "class": e.classification,
                "output": e.output,
                "path": list(e.path),
                "steps": [_step_to_dict(s) for s in e.steps],
            }
            for e in report.entries
        ],
        "summary": {
            "detected": report.detected,
            "warning": report.warning,
            "negligible": report.negligible,
            "avg_detected": list(report.avg_detected)
            if report.avg_detected
            else None,
            "avg_negligible": list(report.avg_negligible)
            if report.avg_negligible
            else None,
            "any_detected": report.detected > 0,
        },
    }


def report_from_json(data: dict) -> AnalysisReport:
    """Rebuild a report from its JSON form (timing is not round-tripped)."""
    cfg = data["config"]
    entries = []
    for r in data["results"]:
        steps = tuple(
            PathStep(
                composition=s["composition"],
                input_net=s["input_net"],
                common=s["common"],
                advanced=s["advanced"],
                trigger=tuple((int(n), int(v)) for n, v in s["trigger"])
                if s["trigger"] is not None
                else None,
            )
            for s in r["steps"]
        )
        entries.append(
            SecretEntry(
                secret=r["secret"],
                common=r["common"],
                advanced=r["advanced"],
                classification=r["class"],
                output=r["output"],
                path=tuple(r["path"]),
                steps=steps,
            )
        )
    summary = data["summary"]
    return AnalysisReport(
        version=data["version"],
        design=data["design"],
        attack_model=cfg["attack_model"],
        max_cluster_inputs=cfg["max_cluster_inputs"],
        detect_threshold=cfg["detect_threshold"],
        warn_threshold=cfg["warn_threshold"],
        secrets=tuple(cfg["secrets"]),
        low_inputs=tuple(cfg["low_inputs"]),
        probabilities=tuple(
            (ref, p) for ref, p in cfg["input_probabilities"].items()
        ),
        entries=tuple(entries),
        detected=summary["detected"],
        warning=summary["warning"],
        negligible=summary["negligible"],
        avg_detected=tuple(summary["avg_detected"])
        if summary["avg_detected"]
        else None,
        avg_negligible=tuple(summary["avg_negligible"])
        if summary["avg_negligible"]
        else None,
        wall_clock_seconds=0.0,
    )


def _text_lines(report: AnalysisReport) -> list[str]:
    lines = [
        f"design {report.design}  model {report.attack_model}  "
        f"detect>={report.detect_threshold!r}  warn>={report.warn_threshold!r}"
    ]
    for e in report.entries:
        path = "->".join(str(c) for c in e.path) if e.path else "-"
        output = e.output if e.output else "-"
        lines.append(
            f"{e.secret}  {e.classification:<10}  common={e.common!r}  "
            f"advanced={e.advanced!r}  output={output}  path={path}"
        )
    lines.append(
        f"summary: detected {report.detected}  warning {report.warning}  "
        f"negligible {report.negligible}"
    )
    if report.avg_detected:
        c, a = report.avg_detected
        lines.append(f"avg detected: common={c!r} advanced={a!r}")
    if report.avg_negligible:
        c, a = report.avg_negligible
        lines.append(f"avg negligible: common={c!r} advanced={a!r}")
    return lines


def emit_report(report: AnalysisReport, fmt: str = "json") -> bytes:
    if fmt == "json":
        return dumps_canonical(report_to_dict(report))
    if fmt == "text":
        return ("\n".join(_text_lines(report)) + "\n").encode("utf-8")
    raise ValueError(f"unknown report format '{fmt}'")


def emit_plot_data(report: AnalysisReport) -> bytes:
    """CSV bar data: one row per secret bit plus threshold footer rows."""
    lines = ["secret,common,advanced,class"]
    for e in report.entries:
        lines.append(f"{e.secret},{e.common!r},{e.advanced!r},{e.classification}")
    lines.append(f"# detect_threshold,{report.detect_threshold!r}")
    lines.append(f"# warn_threshold,{report.warn_threshold!r}")
    return ("\n".join(lines) + "\n").encode("utf-8")
