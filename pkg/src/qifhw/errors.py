"""Exception types raised during netlist ingestion, configuration, and analysis."""

from __future__ import annotations


class NetlistError(ValueError):
    """A netlist file is syntactically or structurally invalid."""


class MalformedInput(NetlistError):
    """Input bytes are not valid JSON, or violate the file schema."""


class MultipleDrivers(NetlistError):
    """A net is driven by more than one cell output or input-port bit."""

    def __init__(self, net: int, detail: str = ""):
        self.net = net
        suffix = f" ({detail})" if detail else ""
        super().__init__(f"net {net} has more than one driver{suffix}")


class UndrivenNet(NetlistError):
    """A referenced non-constant net has no driver."""

    def __init__(self, net: int, detail: str = ""):
        self.net = net
        suffix = f" ({detail})" if detail else ""
        super().__init__(f"net {net} is referenced but never driven{suffix}")


class BadArity(NetlistError):
    """A cell's input count does not match its kind."""

    def __init__(self, cell: int, kind: str, expected: int, got: int):
        self.cell = cell
        self.kind = kind
        super().__init__(
            f"cell {cell} of kind {kind} expects {expected} inputs, got {got}"
        )


class CombinationalLoop(NetlistError):
    """The combinational subgraph (all cells except registers) has a cycle."""

    def __init__(self, cell: int, net: int):
        self.cell = cell
        self.net = net
        super().__init__(f"combinational loop through cell {cell} (output net {net})")


class ConfigError(ValueError):
    """An analysis configuration is invalid or inconsistent with the netlist."""


class UnknownPort(ConfigError):
    """A configuration entry names a port that does not exist or is not an input."""

    def __init__(self, port: str, detail: str = "unknown port"):
        self.port = port
        super().__init__(f"{detail}: '{port}'")


class BitOutOfRange(ConfigError):
    """A bit index exceeds the width of the named port."""

    def __init__(self, port: str, bit: int, width: int):
        self.port = port
        self.bit = bit
        super().__init__(f"bit {bit} out of range for port '{port}' of width {width}")


class OverlappingLabels(ConfigError):
    """The same input bit is labeled both secret and low."""

    def __init__(self, ref: str):
        self.ref = ref
        super().__init__(f"input bit {ref} is labeled both secret and low")


class BadThresholdOrder(ConfigError):
    """The warning threshold is not strictly below the detection threshold."""

    def __init__(self, warn: float, detect: float):
        self.warn = warn
        self.detect = detect
        super().__init__(
            f"warn_threshold {warn} must be strictly below detect_threshold {detect}"
        )


class BadProbability(ConfigError):
    """An input probability is outside [0, 1]."""

    def __init__(self, ref: str, value: float):
        self.ref = ref
        self.value = value
        super().__init__(f"probability for {ref} must be in [0, 1], got {value}")


class BudgetExceeded(Exception):
    """A brute-force enumeration would exceed the configured input-bit budget."""

    def __init__(self, bits: int, budget: int):
        self.bits = bits
        self.budget = budget
        super().__init__(
            f"design has {bits} input bits, exceeding the enumeration budget of {budget}"
        )


class SequentialUnsupported(Exception):
    """Exact enumeration cannot handle this sequential design."""


class PathUnavailable(Exception):
    """The secret bit has no leakage path to any observable output."""

    def __init__(self, ref: str):
        self.ref = ref
        super().__init__(f"no leakage path from secret bit {ref} to any output")
