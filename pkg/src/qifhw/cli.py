"""Command-line driver: analyze, oracle, path, and plot-data subcommands."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .cluster import composition_to_dict
from .errors import (
    BudgetExceeded,
    ConfigError,
    NetlistError,
    SequentialUnsupported,
)
from .netlist import ATTACK_MODELS, parse_config, parse_netlist, replace_config
from .oracle import EnumerationBudget, exact_bayes_vulnerability
from .pipeline import analyze_design
from .report import (
    dumps_canonical,
    emit_plot_data,
    emit_report,
    report_from_json,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="qifhw", description=__doc__)
    parser.add_argument("--version", action="version", version=f"qifhw {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="analyze a netlist for secret leakage")
    analyze.add_argument("--netlist", required=True, help="netlist JSON file")
    analyze.add_argument("--labels", required=True, help="labels/config JSON file")
    analyze.add_argument("--attack-model", choices=ATTACK_MODELS)
    analyze.add_argument("--max-cluster-inputs", type=int)
    analyze.add_argument("--detect-threshold", type=float)
    analyze.add_argument("--warn-threshold", type=float)
    analyze.add_argument("--format", choices=("json", "text"), default="json")
    analyze.add_argument("--out", help="write the report here instead of stdout")
    analyze.add_argument(
        "--dump-clusters",
        action="store_true",
        help="emit each channel composition as a JSON line on stderr",
    )
    analyze.add_argument(
        "--fail-on-detect",
        action="store_true",
        help="exit 3 when any secret bit is classified Detected",
    )
    analyze.add_argument("--threads", type=int, default=1)
    analyze.set_defaults(func=_cmd_analyze)

    oracle = sub.add_parser(
        "oracle", help="exact Bayes vulnerability by brute-force enumeration"
    )
    oracle.add_argument("--netlist", required=True)
    oracle.add_argument("--labels", required=True)
    oracle.add_argument("--budget-bits", type=int, default=20)
    oracle.set_defaults(func=_cmd_oracle)

    path = sub.add_parser("path", help="show the leakage path of one secret bit")
    path.add_argument("--report", required=True, help="JSON report file")
    path.add_argument("--secret", required=True, help='bit reference, e.g. "key[0]"')
    path.set_defaults(func=_cmd_path)

    plot = sub.add_parser("plot-data", help="emit per-bit CSV bar data")
    plot.add_argument("--report", required=True, help="JSON report file")
    plot.add_argument("--out", help="write CSV here instead of stdout")
    plot.set_defaults(func=_cmd_plot_data)
    return parser


def _emit(data: bytes, out: str | None) -> None:
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()


def _cmd_analyze(args) -> int:
    netlist = parse_netlist(Path(args.netlist).read_bytes())
    config = parse_config(Path(args.labels).read_bytes(), netlist)
    overrides = {}
    if args.attack_model is not None:
        overrides["attack_model"] = args.attack_model
    if args.max_cluster_inputs is not None:
        overrides["max_cluster_inputs"] = args.max_cluster_inputs
    if args.detect_threshold is not None:
        overrides["detect_threshold"] = args.detect_threshold
    if args.warn_threshold is not None:
        overrides["warn_threshold"] = args.warn_threshold
    if overrides:
        config = replace_config(config, **overrides)

    bundle = analyze_design(netlist, config, threads=max(1, args.threads))
    if args.dump_clusters:
        for comp in bundle.clusters.compositions:
            print(json.dumps(composition_to_dict(comp)), file=sys.stderr)
    _emit(emit_report(bundle.report, args.format), args.out)
    print(
        f"analyzed {len(config.secrets)} secret bits in "
        f"{bundle.report.wall_clock_seconds:.3f}s",
        file=sys.stderr,
    )
    if args.fail_on_detect and bundle.report.detected > 0:
        return 3
    return 0


def _cmd_oracle(args) -> int:
    netlist = parse_netlist(Path(args.netlist).read_bytes())
    config = parse_config(Path(args.labels).read_bytes(), netlist)
    budget = EnumerationBudget(max_total_input_bits=args.budget_bits)
    results = []
    for secret in config.secrets:
        prior, posterior = exact_bayes_vulnerability(netlist, secret, config, budget)
        results.append(
            {"secret": secret.ref(), "prior": prior, "posterior": posterior}
        )
    _emit(dumps_canonical({"design": netlist.name, "secrets": results}), None)
    return 0


def _cmd_path(args) -> int:
    report = report_from_json(json.loads(Path(args.report).read_text("utf-8")))
    for entry in report.entries:
        if entry.secret == args.secret:
            break
    else:
        print(f"error: secret '{args.secret}' not in report", file=sys.stderr)
        return 2
    print(
        f"{entry.secret}  {entry.classification}  common={entry.common!r}  "
        f"advanced={entry.advanced!r}  output={entry.output or '-'}"
    )
    if not entry.steps:
        print("no leakage path")
        return 0
    for i, step in enumerate(entry.steps, start=1):
        trigger = (
            " ".join(f"net{n}={v}" for n, v in step.trigger)
            if step.trigger
            else "-"
        )
        print(
            f"step {i}: composition {step.composition} via net {step.input_net}  "
            f"common={step.common!r} advanced={step.advanced!r}  trigger: {trigger}"
        )
    return 0


def _cmd_plot_data(args) -> int:
    report = report_from_json(json.loads(Path(args.report).read_text("utf-8")))
    _emit(emit_plot_data(report), args.out)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (NetlistError, ConfigError, BudgetExceeded, SequentialUnsupported) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
