"""Gate-level netlist ingestion and analysis configuration.

Netlist files are JSON: a design name, a net count, ports with per-bit net
ids, and cells with typed inputs and a single output net.  Net ids 0 and 1
are reserved for the constants logic-0 and logic-1 and may appear only as
cell inputs.  Validation enforces single drivers, matching cell arities,
driven output ports, and an acyclic combinational subgraph; cycles through
DFFs are legal.  Parsed models are immutable and safe to share.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace

from .errors import (
    BadArity,
    BadProbability,
    BadThresholdOrder,
    BitOutOfRange,
    CombinationalLoop,
    MalformedInput,
    MultipleDrivers,
    OverlappingLabels,
    UndrivenNet,
    UnknownPort,
)

CELL_ARITY = {
    "NOT": 1,
    "BUF": 1,
    "DFF": 1,
    "AND": 2,
    "OR": 2,
    "XOR": 2,
    "XNOR": 2,
    "NAND": 2,
    "NOR": 2,
    "MUX": 3,  # inputs are (sel, in0, in1); output = in1 when sel = 1
}

CONST_NETS = (0, 1)

ATTACK_MODELS = ("observe", "set-inputs", "set-conds")

DEFAULT_MAX_CLUSTER_INPUTS = 5
DEFAULT_DETECT_THRESHOLD = 0.3
DEFAULT_WARN_THRESHOLD = 0.01539

_BIT_REF_RE = re.compile(r"^(?P<port>[^\[\]]+)\[(?P<bit>\d+)\]$")


@dataclass(frozen=True, order=True)
class BitRef:
    """One bit of a named port: zero-based index into the port's bits list."""

    port: str
    bit: int
    net: int

    def ref(self) -> str:
        return f"{self.port}[{self.bit}]"


@dataclass(frozen=True)
class Port:
    name: str
    direction: str  # "in" | "out"
    bits: tuple[int, ...]


@dataclass(frozen=True)
class Cell:
    kind: str
    inputs: tuple[int, ...]
    output: int


@dataclass(frozen=True)
class Netlist:
    name: str
    net_count: int
    ports: tuple[Port, ...]
    cells: tuple[Cell, ...]

    def port(self, name: str) -> Port | None:
        for p in self.ports:
            if p.name == name:
                return p
        return None

    def input_bits(self) -> tuple[BitRef, ...]:
        """All input-port bits in port order, then bit order."""
        return tuple(
            BitRef(p.name, i, n)
            for p in self.ports
            if p.direction == "in"
            for i, n in enumerate(p.bits)
        )

    def output_bits(self) -> tuple[BitRef, ...]:
        """All output-port bits in port order, then bit order."""
        return tuple(
            BitRef(p.name, i, n)
            for p in self.ports
            if p.direction == "out"
            for i, n in enumerate(p.bits)
        )


@dataclass(frozen=True)
class AnalysisConfig:
    """Validated analysis configuration, cross-checked against a netlist.

    ``probabilities`` maps every input-bit net to its probability of being 1
    (default 0.5).  ``low_inputs`` defaults to all non-secret input bits and
    determines which inputs count as attacker-observable.
    """

    secrets: tuple[BitRef, ...]
    low_inputs: tuple[BitRef, ...]
    probabilities: dict[int, float]
    attack_model: str = "observe"
    max_cluster_inputs: int = DEFAULT_MAX_CLUSTER_INPUTS
    detect_threshold: float = DEFAULT_DETECT_THRESHOLD
    warn_threshold: float = DEFAULT_WARN_THRESHOLD


def _load_json(data: bytes | str):
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedInput(f"input is not valid UTF-8: {exc}") from exc
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"input is not valid JSON: {exc}") from exc


def _require(obj: dict, key: str, kind: type, where: str):
    if key not in obj:
        raise MalformedInput(f"{where}: missing required key '{key}'")
    value = obj[key]
    if kind is int and isinstance(value, bool):
        raise MalformedInput(f"{where}: key '{key}' must be an integer")
    if not isinstance(value, kind):
        raise MalformedInput(f"{where}: key '{key}' has the wrong type")
    return value


def _check_keys(obj: dict, allowed: set[str], where: str) -> None:
    extra = set(obj) - allowed
    if extra:
        raise MalformedInput(f"{where}: unknown key '{sorted(extra)[0]}'")


def _check_net_id(value, net_count: int, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedInput(f"{where}: net id must be an integer")
    if value < 0:
        raise MalformedInput(f"{where}: net id {value} is negative")
    if value >= net_count:
        raise MalformedInput(f"{where}: net id {value} exceeds net_count {net_count}")
    return value


def parse_netlist(data: bytes | str) -> Netlist:
    """Parse and validate a JSON netlist, preserving cell and port order."""
    raw = _load_json(data)
    if not isinstance(raw, dict):
        raise MalformedInput("netlist: top-level value must be an object")
    _check_keys(raw, {"name", "net_count", "ports", "cells"}, "netlist")
    name = _require(raw, "name", str, "netlist")
    net_count = _require(raw, "net_count", int, "netlist")
    if net_count < 0:
        raise MalformedInput("netlist: net_count must be non-negative")

    ports: list[Port] = []
    seen_port_names: set[str] = set()
    port_nets: dict[int, str] = {}
    for i, p in enumerate(_require(raw, "ports", list, "netlist")):
        where = f"port {i}"
        if not isinstance(p, dict):
            raise MalformedInput(f"{where}: must be an object")
        _check_keys(p, {"name", "dir", "bits"}, where)
        pname = _require(p, "name", str, where)
        if not pname:
            raise MalformedInput(f"{where}: name must be non-empty")
        if pname in seen_port_names:
            raise MalformedInput(f"{where}: duplicate port name '{pname}'")
        seen_port_names.add(pname)
        direction = _require(p, "dir", str, where)
        if direction not in ("in", "out"):
            raise MalformedInput(f"port '{pname}': dir must be 'in' or 'out'")
        bits_raw = _require(p, "bits", list, where)
        if not bits_raw:
            raise MalformedInput(f"port '{pname}': bits list must be non-empty")
        bits = []
        for j, b in enumerate(bits_raw):
            net = _check_net_id(b, net_count, f"port '{pname}' bit {j}")
            if net in CONST_NETS:
                raise MalformedInput(
                    f"port '{pname}' bit {j}: reserved constant net {net} "
                    "may appear only as a cell input"
                )
            if net in port_nets:
                raise MalformedInput(
                    f"port '{pname}' bit {j}: net {net} already appears "
                    f"in port '{port_nets[net]}'"
                )
            port_nets[net] = pname
            bits.append(net)
        ports.append(Port(pname, direction, tuple(bits)))

    cells: list[Cell] = []
    for i, c in enumerate(_require(raw, "cells", list, "netlist")):
        where = f"cell {i}"
        if not isinstance(c, dict):
            raise MalformedInput(f"{where}: must be an object")
        _check_keys(c, {"kind", "inputs", "output"}, where)
        kind = _require(c, "kind", str, where)
        if kind not in CELL_ARITY:
            raise MalformedInput(f"{where}: unknown cell kind '{kind}'")
        inputs_raw = _require(c, "inputs", list, where)
        if len(inputs_raw) != CELL_ARITY[kind]:
            raise BadArity(i, kind, CELL_ARITY[kind], len(inputs_raw))
        inputs = tuple(
            _check_net_id(b, net_count, f"{where} input {j}")
            for j, b in enumerate(inputs_raw)
        )
        output = _check_net_id(c["output"], net_count, f"{where} output")
        if output in CONST_NETS:
            raise MalformedInput(
                f"{where}: reserved constant net {output} may not be a cell output"
            )
        cells.append(Cell(kind, inputs, output))

    _validate_drivers(ports, cells)
    _validate_acyclic(cells)
    return Netlist(name, net_count, tuple(ports), tuple(cells))


def _validate_drivers(ports: list[Port], cells: list[Cell]) -> None:
    drivers: dict[int, str] = {}
    for p in ports:
        if p.direction != "in":
            continue
        for i, net in enumerate(p.bits):
            drivers[net] = f"port '{p.name}' bit {i}"
    for i, c in enumerate(cells):
        if c.output in drivers:
            raise MultipleDrivers(c.output, f"{drivers[c.output]} and cell {i}")
        drivers[c.output] = f"cell {i}"

    referenced: dict[int, str] = {}
    for i, c in enumerate(cells):
        for net in c.inputs:
            referenced.setdefault(net, f"read by cell {i}")
    for p in ports:
        if p.direction != "out":
            continue
        for i, net in enumerate(p.bits):
            referenced.setdefault(net, f"drives port '{p.name}' bit {i}")
    for net in sorted(referenced):
        if net not in CONST_NETS and net not in drivers:
            raise UndrivenNet(net, referenced[net])


def _validate_acyclic(cells: list[Cell]) -> None:
    # Kahn's algorithm over cell-to-cell edges, with edges out of DFFs removed.
    driver_cell = {c.output: i for i, c in enumerate(cells)}
    indeg = [0] * len(cells)
    readers: dict[int, list[int]] = {}
    for i, c in enumerate(cells):
        for net in c.inputs:
            d = driver_cell.get(net)
            if d is not None and cells[d].kind != "DFF":
                indeg[i] += 1
                readers.setdefault(d, []).append(i)
    ready = [i for i, d in enumerate(indeg) if d == 0]
    done = 0
    while ready:
        i = ready.pop()
        done += 1
        for r in readers.get(i, ()):
            indeg[r] -= 1
            if indeg[r] == 0:
                ready.append(r)
    if done != len(cells):
        stuck = min(i for i, d in enumerate(indeg) if d > 0)
        raise CombinationalLoop(stuck, cells[stuck].output)


def netlist_to_dict(netlist: Netlist) -> dict:
    return {
        "name": netlist.name,
        "net_count": netlist.net_count,
        "ports": [
            {"name": p.name, "dir": p.direction, "bits": list(p.bits)}
            for p in netlist.ports
        ],
        "cells": [
            {"kind": c.kind, "inputs": list(c.inputs), "output": c.output}
            for c in netlist.cells
        ],
    }


def serialize_netlist(netlist: Netlist) -> bytes:
    """Serialize a netlist so that re-parsing yields a structurally identical model."""
    return json.dumps(netlist_to_dict(netlist), separators=(",", ":")).encode("utf-8")


def _resolve_selection(entries, in_ports: dict[str, Port], where: str) -> list[BitRef]:
    if not isinstance(entries, list):
        raise MalformedInput(f"config: '{where}' must be a list")
    refs: dict[BitRef, None] = {}
    for i, entry in enumerate(entries):
        item = f"config {where}[{i}]"
        if not isinstance(entry, dict):
            raise MalformedInput(f"{item}: must be an object")
        _check_keys(entry, {"port", "bits"}, item)
        pname = _require(entry, "port", str, item)
        port = in_ports.get(pname)
        if port is None:
            raise UnknownPort(pname, f"{where} entry names no input port")
        bits = entry.get("bits", "all")
        if bits == "all":
            indices = range(len(port.bits))
        elif isinstance(bits, list):
            for b in bits:
                if isinstance(b, bool) or not isinstance(b, int):
                    raise MalformedInput(f"{item}: bits must be integers or 'all'")
                if b < 0 or b >= len(port.bits):
                    raise BitOutOfRange(pname, b, len(port.bits))
            indices = bits
        else:
            raise MalformedInput(f"{item}: bits must be a list or 'all'")
        for b in indices:
            refs.setdefault(BitRef(pname, b, port.bits[b]), None)
    return list(refs)


def _parse_bit_ref(text: str, in_ports: dict[str, Port], where: str) -> BitRef:
    m = _BIT_REF_RE.match(text)
    if m is None:
        raise MalformedInput(f"{where}: '{text}' is not of the form port[bit]")
    pname, bit = m.group("port"), int(m.group("bit"))
    port = in_ports.get(pname)
    if port is None:
        raise UnknownPort(pname, f"{where} names no input port")
    if bit >= len(port.bits):
        raise BitOutOfRange(pname, bit, len(port.bits))
    return BitRef(pname, bit, port.bits[bit])


def _validate_settings(
    attack_model: str, max_cluster_inputs: int, detect: float, warn: float
) -> None:
    if attack_model not in ATTACK_MODELS:
        raise MalformedInput(
            f"config: attack_model must be one of {', '.join(ATTACK_MODELS)}"
        )
    if isinstance(max_cluster_inputs, bool) or not isinstance(max_cluster_inputs, int):
        raise MalformedInput("config: max_cluster_inputs must be an integer")
    if max_cluster_inputs < 1:
        raise MalformedInput("config: max_cluster_inputs must be at least 1")
    for label, value in (("detect_threshold", detect), ("warn_threshold", warn)):
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise MalformedInput(f"config: {label} must be a number")
    if not 0.0 < detect <= 1.0:
        raise MalformedInput(f"config: detect_threshold {detect} must be in (0, 1]")
    if not 0.0 < warn < 1.0:
        raise MalformedInput(f"config: warn_threshold {warn} must be in (0, 1)")
    if warn >= detect:
        raise BadThresholdOrder(warn, detect)


def parse_config(data: bytes | str, netlist: Netlist) -> AnalysisConfig:
    """Parse a labels/configuration file and cross-check it against the netlist.

    Defaults: probability 0.5 per input bit, max_cluster_inputs 5, thresholds
    0.3 / 0.01539, attack model observe, low inputs = all non-secret inputs.
    """
    raw = _load_json(data)
    if not isinstance(raw, dict):
        raise MalformedInput("config: top-level value must be an object")
    _check_keys(
        raw,
        {
            "secrets",
            "low_inputs",
            "input_probabilities",
            "attack_model",
            "max_cluster_inputs",
            "detect_threshold",
            "warn_threshold",
        },
        "config",
    )
    in_ports = {p.name: p for p in netlist.ports if p.direction == "in"}

    secrets = _resolve_selection(raw.get("secrets", []), in_ports, "secrets")
    secret_set = set(secrets)
    if "low_inputs" in raw:
        lows = _resolve_selection(raw["low_inputs"], in_ports, "low_inputs")
        for ref in lows:
            if ref in secret_set:
                raise OverlappingLabels(ref.ref())
    else:
        lows = [b for b in netlist.input_bits() if b not in secret_set]

    probabilities = {b.net: 0.5 for b in netlist.input_bits()}
    probs_raw = raw.get("input_probabilities", {})
    if not isinstance(probs_raw, dict):
        raise MalformedInput("config: input_probabilities must be an object")
    for key in sorted(probs_raw):
        ref = _parse_bit_ref(key, in_ports, "input_probabilities")
        value = probs_raw[key]
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise BadProbability(key, value)
        if not 0.0 <= value <= 1.0:
            raise BadProbability(key, value)
        probabilities[ref.net] = float(value)

    attack_model = raw.get("attack_model", "observe")
    max_cluster_inputs = raw.get("max_cluster_inputs", DEFAULT_MAX_CLUSTER_INPUTS)
    detect = raw.get("detect_threshold", DEFAULT_DETECT_THRESHOLD)
    warn = raw.get("warn_threshold", DEFAULT_WARN_THRESHOLD)
    if not isinstance(attack_model, str):
        raise MalformedInput("config: attack_model must be a string")
    _validate_settings(attack_model, max_cluster_inputs, detect, warn)

    return AnalysisConfig(
        secrets=tuple(sorted(secrets)),
        low_inputs=tuple(sorted(lows)),
        probabilities=probabilities,
        attack_model=attack_model,
        max_cluster_inputs=max_cluster_inputs,
        detect_threshold=float(detect),
        warn_threshold=float(warn),
    )


def replace_config(config: AnalysisConfig, **changes) -> AnalysisConfig:
    """Return a copy with fields replaced, re-validating the scalar settings."""
    cfg = replace(config, **changes)
    _validate_settings(
        cfg.attack_model,
        cfg.max_cluster_inputs,
        cfg.detect_threshold,
        cfg.warn_threshold,
    )
    return cfg
