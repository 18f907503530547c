"""Command-line front end: ``table``, ``run`` and ``sweep``.

Each command reads an optional config file, computes, then writes CSV files
(and a ``manifest.json``) into ``--out``. The exit status is 0 only when all
computations succeeded and all built-in checks passed.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np

from . import experiments
from .config import axis_to_config_units, load_config
from .csvio import write_csv
from .errors import ConfigError, CqedStirapError, IntegratorDivergedError

log = logging.getLogger("cqed_stirap")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2


def tool_version():
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "unknown"


def _prepare_out(path):
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(out, command, config_path, status):
    manifest = {
        "command": command,
        "config_path": str(config_path) if config_path else None,
        "output_dir": str(out),
        "deterministic": True,
        "version": tool_version(),
        "exit_status": status,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


def cmd_table(args):
    cfg = load_config(args.config)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        report = experiments.reproduce_table1(cfg.protocol.system)
    out = _prepare_out(args.out)
    rows = [(r.quantity, r.computed, r.paper_value, r.abs_dev, r.passed) for r in report.rows]
    if not report.nesting_ok:
        rows.append(("nesting_ok", 0, 1, 1, False))
        log.error("drive frequency is outside the nesting window; no Lambda system extracted")
    write_csv(out / "table1_comparison.csv",
              ["quantity", "computed", "paper_value", "abs_dev", "pass"], rows)
    for r in report.rows if report.nesting_ok else ():
        if not r.passed:
            log.warning("%s: computed %.6g vs reference %.6g (|dev| %.3g > %.3g)",
                        r.quantity, r.computed, r.paper_value, r.abs_dev, r.tolerance)
    if report.truncation is not None and not report.truncation_ok:
        log.warning("truncation check failed: %s", report.truncation)
    return EXIT_OK if report.all_passed else EXIT_CHECK_FAILED


def cmd_run(args):
    cfg = load_config(args.config)
    out = _prepare_out(args.out)
    try:
        result = experiments.run_protocol(cfg.protocol)
        status = EXIT_OK
    except IntegratorDivergedError as exc:
        log.error("%s", exc)
        result = experiments.run_protocol(cfg.protocol, raise_on_divergence=False)
        status = EXIT_CHECK_FAILED
    ev = result.evolution
    pops = ev.populations
    write_csv(out / "populations.csv", ["t_ns", "P1", "P2", "P3"],
              ((t, p[0], p[1], p[2]) for t, p in zip(ev.times, pops)))
    summary = result.summary() + [("status", "ok" if status == EXIT_OK else "diverged")]
    write_csv(out / "summary.csv", ["key", "value"], summary)
    return status


def cmd_sweep(args):
    cfg = load_config(args.config)
    spec = cfg.sweep
    if spec is None:
        raise ConfigError("sweep needs a [sweep] section with axis1/axis1_values/axis2/axis2_values")
    metric = args.metric or spec.metric
    grid = experiments.sweep2d(cfg.protocol, spec.axis1, spec.axis2, metric=metric,
                               threads=args.threads)
    out = _prepare_out(args.out)
    (name1, v1), (name2, v2) = grid.axis1, grid.axis2
    u1, u2 = axis_to_config_units(name1, v1), axis_to_config_units(name2, v2)
    rows = []
    for i in range(len(v1)):
        for j in range(len(v2)):
            rows.append((name1, u1[i], name2, u2[j], metric, grid.cells[i, j]))
    write_csv(out / "sweep.csv",
              ["axis1_name", "axis1_value", "axis2_name", "axis2_value", "metric", "value"], rows)
    n_failed = int(np.sum(grid.failed))
    if n_failed:
        log.error("%d sweep cell(s) failed; written as nan", n_failed)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cqed-stirap",
        description="STIRAP / saSTIRAP with circuit-QED polaritons: transition-table check, runs and sweeps.")
    parser.add_argument("--version", action="version", version=tool_version())
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, default=None, help="INI config file (default: built-in)")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")

    p = sub.add_parser("table", help="compare the Lambda-system transition table with the reference")
    common(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("run", help="integrate one protocol; write populations.csv and summary.csv")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="2-D parameter sweep; write sweep.csv")
    common(p)
    p.add_argument("--metric", choices=experiments.METRICS, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        log.error("--threads must be >= 1")
        return EXIT_CONFIG
    try:
        status = args.func(args)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except CqedStirapError as exc:
        log.error("%s", exc)
        status = EXIT_CHECK_FAILED
    if args.out.is_dir():
        _write_manifest(args.out, args.command, args.config, status)
    return status


if __name__ == "__main__":
    sys.exit(main())
