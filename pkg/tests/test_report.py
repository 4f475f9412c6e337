"""Classification, report emission, and plot data."""

import json

from hypothesis import given, strategies as st

import qifhw
from netgen import copy_design, make_config, make_netlist, run, trigger_mux_leak


def default_config():
    nl = qifhw.parse_netlist(copy_design(1)[0])
    return qifhw.parse_config(make_config(secrets=[("key", "all")]), nl)


def vec(common, advanced):
    return qifhw.LeakageVector(common, advanced)


def test_classify_reference_vectors():
    cfg = default_config()
    assert qifhw.classify(vec(1.0, 1.0), cfg) == qifhw.DETECTED
    assert qifhw.classify(vec(1.0, 1.31e-4), cfg) == qifhw.NEGLIGIBLE
    assert qifhw.classify(vec(5.02e-41, 1.0), cfg) == qifhw.DETECTED
    assert qifhw.classify(vec(0.9, 0.02), cfg) == qifhw.WARNING


def test_classify_boundaries_are_inclusive():
    cfg = default_config()
    assert qifhw.classify(vec(0.0, 0.3), cfg) == qifhw.DETECTED
    assert qifhw.classify(vec(0.0, 0.01539), cfg) == qifhw.WARNING


@given(st.floats(min_value=0.0, max_value=1.0))
def test_classify_total_and_exclusive(advanced):
    cfg = default_config()
    cls = qifhw.classify(vec(0.5, advanced), cfg)
    if advanced >= cfg.detect_threshold:
        assert cls == qifhw.DETECTED
    elif advanced >= cfg.warn_threshold:
        assert cls == qifhw.WARNING
    else:
        assert cls == qifhw.NEGLIGIBLE


def test_empty_secret_set_yields_valid_report():
    nl_bytes = copy_design(2)[0]
    bundle = run(nl_bytes, make_config())
    assert bundle.report.entries == ()
    data = json.loads(qifhw.emit_report(bundle.report, "json"))
    assert data["results"] == []
    assert data["summary"]["detected"] == 0
    assert data["summary"]["avg_detected"] is None


def test_eight_bit_copy_all_detected():
    nl_bytes, cfg_bytes = copy_design(8)
    bundle = run(nl_bytes, cfg_bytes)
    report = bundle.report
    assert report.detected == 8
    assert report.avg_detected == (1.0, 1.0)
    text = qifhw.emit_report(report, "text").decode()
    per_bit = [l for l in text.splitlines() if l.startswith("key[")]
    assert len(per_bit) == 8
    assert all("Detected" in l for l in per_bit)


def test_report_emission_deterministic():
    nl_bytes, cfg_bytes = trigger_mux_leak(8)
    one = qifhw.emit_report(run(nl_bytes, cfg_bytes).report, "json")
    two = qifhw.emit_report(run(nl_bytes, cfg_bytes).report, "json")
    assert one == two
    assert qifhw.emit_report(run(nl_bytes, cfg_bytes).report, "text") == \
        qifhw.emit_report(run(nl_bytes, cfg_bytes).report, "text")


def test_json_floats_have_17_significant_digits():
    nl_bytes, cfg_bytes = trigger_mux_leak(8)
    raw = qifhw.emit_report(run(nl_bytes, cfg_bytes).report, "json").decode()
    assert '"detect_threshold":0.29999999999999999' in raw
    assert '"warn_threshold":0.015389999999999999' in raw
    parsed = json.loads(raw)
    assert parsed["config"]["detect_threshold"] == 0.3


def test_json_round_trip():
    nl_bytes, cfg_bytes = trigger_mux_leak(8)
    report = run(nl_bytes, cfg_bytes).report
    again = qifhw.report_from_json(json.loads(qifhw.emit_report(report, "json")))
    assert again.entries == report.entries
    assert again.detect_threshold == report.detect_threshold
    assert again.avg_detected == report.avg_detected


def test_aggregates_recomputable_from_entries():
    nl_bytes, cfg_bytes = trigger_mux_leak(8)
    report = run(nl_bytes, cfg_bytes).report
    detected = [e for e in report.entries if e.classification == qifhw.DETECTED]
    negligible = [e for e in report.entries if e.classification == qifhw.NEGLIGIBLE]
    assert report.detected == len(detected)
    assert report.negligible == len(negligible)
    if detected:
        assert report.avg_detected == (
            sum(e.common for e in detected) / len(detected),
            sum(e.advanced for e in detected) / len(detected),
        )


def test_entries_in_canonical_order():
    nl_bytes = make_netlist(
        "two",
        [("zkey", "in", [2]), ("akey", "in", [3]), ("y", "out", [4]), ("z", "out", [5])],
        [("BUF", [2], 4), ("BUF", [3], 5)],
    )
    cfg_bytes = make_config(secrets=[("zkey", "all"), ("akey", "all")])
    report = run(nl_bytes, cfg_bytes).report
    assert [e.secret for e in report.entries] == ["akey[0]", "zkey[0]"]


def test_plot_data_shape_and_thresholds():
    nl_bytes, cfg_bytes = copy_design(8)
    report = run(nl_bytes, cfg_bytes).report
    lines = qifhw.emit_plot_data(report).decode().splitlines()
    assert lines[0] == "secret,common,advanced,class"
    assert len(lines) == 1 + 8 + 2
    assert lines[1] == "key[0],1.0,1.0,Detected"
    assert lines[-2] == "# detect_threshold,0.3"
    assert lines[-1] == "# warn_threshold,0.01539"


def test_plot_data_empty_secrets():
    nl_bytes = copy_design(2)[0]
    report = run(nl_bytes, make_config()).report
    lines = qifhw.emit_plot_data(report).decode().splitlines()
    assert len(lines) == 3  # header + two threshold rows


def test_wall_clock_not_serialized():
    nl_bytes, cfg_bytes = copy_design(2)
    report = run(nl_bytes, cfg_bytes).report
    assert report.wall_clock_seconds > 0.0
    raw = qifhw.emit_report(report, "json").decode()
    assert "wall_clock" not in raw and "seconds" not in raw
