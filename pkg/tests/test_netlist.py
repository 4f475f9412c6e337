"""Netlist parsing, validation, and configuration tests."""

import json
import random

import pytest

import qifhw
from netgen import make_config, make_netlist


def buf_identity():
    return make_netlist(
        "ident",
        [("a", "in", [2]), ("y", "out", [3])],
        [("BUF", [2], 3)],
    )


def test_parse_identity_netlist():
    nl = qifhw.parse_netlist(buf_identity())
    assert len(nl.cells) == 1
    assert len(nl.ports) == 2
    assert nl.cells[0] == qifhw.Cell("BUF", (2,), 3)
    assert [p.name for p in nl.ports] == ["a", "y"]


def test_undriven_net_rejected():
    data = make_netlist(
        "bad", [("a", "in", [2]), ("y", "out", [4])], [("BUF", [3], 4)]
    )
    with pytest.raises(qifhw.UndrivenNet) as exc:
        qifhw.parse_netlist(data)
    assert exc.value.net == 3


def test_unconnected_output_port_rejected():
    data = make_netlist(
        "bad", [("a", "in", [2]), ("y", "out", [5])], [("BUF", [2], 3)]
    )
    with pytest.raises(qifhw.UndrivenNet) as exc:
        qifhw.parse_netlist(data)
    assert exc.value.net == 5


def test_multiple_drivers_rejected():
    data = make_netlist(
        "bad",
        [("a", "in", [2]), ("y", "out", [7])],
        [("BUF", [2], 7), ("NOT", [2], 7)],
    )
    with pytest.raises(qifhw.MultipleDrivers) as exc:
        qifhw.parse_netlist(data)
    assert exc.value.net == 7


def test_bad_arity_rejected():
    data = make_netlist(
        "bad", [("a", "in", [2]), ("y", "out", [3])], [("AND", [2], 3)]
    )
    with pytest.raises(qifhw.BadArity):
        qifhw.parse_netlist(data)


def test_unknown_kind_rejected():
    data = make_netlist(
        "bad", [("a", "in", [2]), ("y", "out", [3])], [("NOPE", [2], 3)]
    )
    with pytest.raises(qifhw.MalformedInput):
        qifhw.parse_netlist(data)


def test_constant_as_cell_output_rejected():
    data = make_netlist("bad", [("a", "in", [2])], [("BUF", [2], 1)])
    with pytest.raises(qifhw.MalformedInput):
        qifhw.parse_netlist(data)


def test_constant_in_port_rejected():
    data = make_netlist("bad", [("a", "in", [0])], [])
    with pytest.raises(qifhw.MalformedInput):
        qifhw.parse_netlist(data)


def test_net_in_two_ports_rejected():
    data = make_netlist("bad", [("a", "in", [2]), ("b", "in", [2])], [])
    with pytest.raises(qifhw.MalformedInput):
        qifhw.parse_netlist(data)


def test_combinational_loop_rejected():
    data = make_netlist(
        "bad",
        [("a", "in", [2]), ("y", "out", [4])],
        [("AND", [2, 4], 3), ("BUF", [3], 4)],
    )
    with pytest.raises(qifhw.CombinationalLoop):
        qifhw.parse_netlist(data)


def test_dff_feedback_loop_accepted():
    data = make_netlist(
        "toggler",
        [("y", "out", [4])],
        [("NOT", [3], 4), ("DFF", [4], 3)],
    )
    nl = qifhw.parse_netlist(data)
    graph = qifhw.build_graph(nl)
    assert graph.register_edges() == ((1, 0),)


def test_constants_allowed_as_cell_inputs():
    data = make_netlist(
        "consts",
        [("a", "in", [2]), ("y", "out", [3])],
        [("AND", [2, 1], 3)],
    )
    nl = qifhw.parse_netlist(data)
    assert nl.cells[0].inputs == (2, 1)


def test_round_trip_identity():
    nl = qifhw.parse_netlist(buf_identity())
    again = qifhw.parse_netlist(qifhw.serialize_netlist(nl))
    assert again == nl


def test_parse_is_deterministic_and_order_preserving():
    data = make_netlist(
        "order",
        [("b", "in", [2]), ("a", "in", [3]), ("y", "out", [5])],
        [("XOR", [2, 3], 4), ("NOT", [4], 5)],
    )
    one = qifhw.parse_netlist(data)
    two = qifhw.parse_netlist(data)
    assert one == two
    assert [p.name for p in one.ports] == ["b", "a", "y"]
    assert [c.kind for c in one.cells] == ["XOR", "NOT"]


def _mutations(obj):
    """Single mutations, each breaking one structural invariant."""
    dup_driver = json.loads(json.dumps(obj))
    dup_driver["cells"].append(
        {"kind": "NOT", "inputs": [2], "output": obj["cells"][0]["output"]}
    )
    yield dup_driver, qifhw.MultipleDrivers

    dangling = json.loads(json.dumps(obj))
    fresh = dangling["net_count"]
    dangling["net_count"] += 1
    dangling["cells"][0]["inputs"] = [fresh] * len(obj["cells"][0]["inputs"])
    yield dangling, qifhw.UndrivenNet

    arity = json.loads(json.dumps(obj))
    arity["cells"][0]["inputs"] = arity["cells"][0]["inputs"] + [2]
    yield arity, qifhw.BadArity

    loop = json.loads(json.dumps(obj))
    first = loop["cells"][0]
    first["inputs"] = [first["output"]] * len(first["inputs"])
    yield loop, qifhw.NetlistError

    const_out = json.loads(json.dumps(obj))
    const_out["cells"][0]["output"] = 0
    yield const_out, qifhw.NetlistError


def test_mutated_netlists_are_rejected():
    rng = random.Random(11)
    from netgen import random_netlist_design

    for _ in range(40):
        nl_bytes, _ = random_netlist_design(rng, sequential=rng.random() < 0.5)
        obj = json.loads(nl_bytes)
        if not obj["cells"]:
            continue
        qifhw.parse_netlist(nl_bytes)  # baseline must be valid
        mutated = 0
        for bad, expected in _mutations(obj):
            first = bad["cells"][0]
            if expected is qifhw.NetlistError and first["kind"] == "DFF":
                continue  # a self-loop through a DFF is legal
            with pytest.raises(expected):
                qifhw.parse_netlist(json.dumps(bad))
            mutated += 1
        assert mutated >= 3


# --- configuration ------------------------------------------------------------


def key_design():
    return make_netlist(
        "keys",
        [("key", "in", [2, 3, 4, 5, 6, 7, 8, 9]), ("d", "in", [10]), ("y", "out", [12])],
        [("XOR", [2, 10], 11), ("BUF", [11], 12)],
    )


def test_config_defaults():
    nl = qifhw.parse_netlist(key_design())
    cfg = qifhw.parse_config(make_config(secrets=[("key", "all")]), nl)
    assert len(cfg.secrets) == 8
    assert cfg.detect_threshold == 0.3
    assert cfg.warn_threshold == 0.01539
    assert cfg.max_cluster_inputs == 5
    assert cfg.attack_model == "observe"
    assert all(p == 0.5 for p in cfg.probabilities.values())
    # low inputs default to every non-secret input bit
    assert [b.ref() for b in cfg.low_inputs] == ["d[0]"]


def test_bad_threshold_order():
    nl = qifhw.parse_netlist(key_design())
    data = make_config(
        secrets=[("key", [0])], warn_threshold=0.5, detect_threshold=0.3
    )
    with pytest.raises(qifhw.BadThresholdOrder):
        qifhw.parse_config(data, nl)


def test_probability_out_of_range():
    nl = qifhw.parse_netlist(key_design())
    data = make_config(secrets=[("key", [0])], probabilities={"d[0]": 1.5})
    with pytest.raises(qifhw.BadProbability):
        qifhw.parse_config(data, nl)


def test_unknown_port():
    nl = qifhw.parse_netlist(key_design())
    with pytest.raises(qifhw.UnknownPort):
        qifhw.parse_config(make_config(secrets=[("nope", "all")]), nl)
    # output ports are not valid secret carriers
    with pytest.raises(qifhw.UnknownPort):
        qifhw.parse_config(make_config(secrets=[("y", "all")]), nl)


def test_bit_out_of_range():
    nl = qifhw.parse_netlist(key_design())
    with pytest.raises(qifhw.BitOutOfRange):
        qifhw.parse_config(make_config(secrets=[("key", [8])]), nl)
    with pytest.raises(qifhw.BitOutOfRange):
        qifhw.parse_config(
            make_config(secrets=[("key", [0])], probabilities={"key[9]": 0.5}), nl
        )


def test_overlapping_labels():
    nl = qifhw.parse_netlist(key_design())
    data = make_config(secrets=[("key", [0])], low_inputs=[("key", [0, 1])])
    with pytest.raises(qifhw.OverlappingLabels):
        qifhw.parse_config(data, nl)


def test_unknown_config_key_rejected():
    nl = qifhw.parse_netlist(key_design())
    with pytest.raises(qifhw.MalformedInput):
        qifhw.parse_config(b'{"secrts": []}', nl)


def test_secret_order_is_canonical():
    nl = qifhw.parse_netlist(key_design())
    cfg = qifhw.parse_config(make_config(secrets=[("key", [3, 1, 2])]), nl)
    assert [b.ref() for b in cfg.secrets] == ["key[1]", "key[2]", "key[3]"]


def test_replace_config_revalidates():
    nl = qifhw.parse_netlist(key_design())
    cfg = qifhw.parse_config(make_config(secrets=[("key", [0])]), nl)
    with pytest.raises(qifhw.BadThresholdOrder):
        qifhw.replace_config(cfg, detect_threshold=0.001)
