"""Command-line front end: ``holoqd run CONFIG``, ``holoqd recipe NAME``, ``holoqd list``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import io as hio
from .dynamics import ExtendTimeError, StepSizeError
from .experiments import CATALOG, RECIPES, ConfigError, list_experiments, load_config, run_experiment, validate
from .holonomy import DegeneracyBrokenError, NonCommutingConnectionError, PathTooCoarseError
from .verify import checks_for

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_VERIFY = 4

NUMERICAL_ERRORS = (
    StepSizeError,
    ExtendTimeError,
    DegeneracyBrokenError,
    PathTooCoarseError,
    NonCommutingConnectionError,
    np.linalg.LinAlgError,
    FloatingPointError,
)


def write_outputs(config: dict, result, out: hio.OutputSet, plot: bool = False) -> None:
    chash = hio.config_hash(config)
    for tr in result.traces:
        csv_path = out.write_text(f"{tr.name}.csv", hio.trace_csv_text(tr.trace, tr.phase_label, tr.every))
        sidecar = {
            "experiment": config["experiment"],
            "config_hash": chash,
            "parameters": config.get("parameters", {}),
            "labels": list(tr.trace.labels),
            "columns": hio.trace_columns(tr.trace.labels, tr.phase_label),
            "record_every": tr.every,
            "info": tr.trace.info,
            "norm_drift": tr.trace.norm_drift,
            **tr.meta,
        }
        out.write_text(f"{tr.name}.json", hio.dumps(sidecar))
        if plot:
            from .plotting import plot_trace_csv

            out.add(plot_trace_csv(csv_path))
    for tb in result.tables:
        csv_path = out.write_text(f"{tb.name}.csv", hio.table_csv_text(tb.header, tb.rows))
        if plot and tb.kind == "scan":
            from .plotting import plot_scan_csv

            out.add(plot_scan_csv(csv_path))
    out.write_text("summary.json", hio.dumps({"experiment": config["experiment"], **result.summary}))


def execute(config: dict, output_dir, threads: int = 1, verify: bool = False, plot: bool = False, stream=None) -> int:
    stream = stream or sys.stdout
    try:
        validate(config)
    except ConfigError as e:
        print(f"validation error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    out = hio.OutputSet(output_dir)
    started = time.perf_counter()
    try:
        result = run_experiment(config, threads)
        write_outputs(config, result, out, plot)
    except NUMERICAL_ERRORS as e:
        out.remove_all()
        diag = {"experiment": config["experiment"], "error": type(e).__name__, "message": str(e), "config_hash": hio.config_hash(config)}
        Path(output_dir).mkdir(parents=True, exist_ok=True)
        (Path(output_dir) / "error.json").write_text(hio.dumps(diag))
        print(f"numerical error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except BaseException:
        out.remove_all()
        raise
    manifest = {
        "config_hash": hio.config_hash(config),
        "version": __version__,
        "wall_clock_s": round(time.perf_counter() - started, 3),
        "outputs": out.checksums(),
    }
    (Path(output_dir) / "manifest.json").write_text(hio.dumps(manifest))
    s = result.summary
    name = config["experiment"]
    if name == "alpha":
        print(f"alpha = {s['alpha']:.6f}", file=stream)
    for key in ("fidelity", "max_leakage", "mismatch", "max_intermediate_population", "log_slope", "solid_angle", "rows"):
        if key in s and not isinstance(s[key], list):
            print(f"{key} = {s[key]}", file=stream)
    print(f"outputs written to {output_dir}", file=stream)
    if verify:
        failed = False
        for c in checks_for(name, s):
            print(f"verify {c.name}: {'PASS' if c.passed else 'FAIL'} ({c.value} {c.threshold})", file=stream)
            failed |= not c.passed
        if failed:
            return EXIT_VERIFY
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="holoqd", description="Holonomic exciton gates in quantum dots: experiments and figure data.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def add_run_flags(p):
        p.add_argument("--output-dir", "-o", help="directory for CSV/JSON outputs (default: config output_dir or ./out/<experiment>)")
        p.add_argument("--threads", type=int, default=1, help="worker threads for parameter scans")
        p.add_argument("--verify", action="store_true", help="check the summary against the expected thresholds (exit 4 on failure)")
        p.add_argument("--plot", action="store_true", help="also render PNG figures next to the CSV files")

    r = sub.add_parser("run", help="run an experiment from a JSON config")
    r.add_argument("config")
    add_run_flags(r)
    rc = sub.add_parser("recipe", help="run the built-in config that reproduces one figure or table")
    rc.add_argument("name", choices=sorted(RECIPES))
    rc.add_argument("--print-config", action="store_true", help="print the recipe config and exit")
    add_run_flags(rc)
    sub.add_parser("list", help="list experiment kinds and the figure each reproduces")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        for name, desc, fig in list_experiments():
            print(f"{name:22s} {fig:32s} {desc}")
        print("recipes: " + ", ".join(sorted(RECIPES)))
        return EXIT_OK
    if args.threads < 1:
        print("validation error: --threads must be >= 1", file=sys.stderr)
        return EXIT_VALIDATION
    if args.command == "recipe":
        config = json.loads(json.dumps(RECIPES[args.name]))
        if args.print_config:
            print(json.dumps(config, indent=2))
            return EXIT_OK
    else:
        try:
            config = load_config(args.config)
        except (ConfigError, OSError) as e:
            print(f"validation error: {e}", file=sys.stderr)
            return EXIT_VALIDATION
    if not isinstance(config, dict) or config.get("experiment") not in CATALOG:
        try:
            validate(config)
        except ConfigError as e:
            print(f"validation error: {e}", file=sys.stderr)
            return EXIT_VALIDATION
    output_dir = args.output_dir or config.get("output_dir") or str(Path("out") / config["experiment"])
    return execute(config, output_dir, args.threads, args.verify, args.plot)


if __name__ == "__main__":
    sys.exit(main())
