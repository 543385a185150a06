"""Command line entry point.

    fiberheat run <config>        run an experiment and write its artifacts
    fiberheat validate <config>   parse and check a configuration only
    fiberheat list-experiments    names and one-line descriptions

Exit status: 0 success, 1 configuration error, 2 numerical failure,
3 invariant violation. The default output root is ``$FIBERHEAT_OUTPUT_ROOT``
(falling back to ``./fiberheat-output``); results go to ``<root>/<name>``
unless the configuration sets ``output_dir``.

Artifacts: the experiment's data CSVs, ``summary.csv``, ``solve_log.csv``
(solver iterations and wall-clock seconds, the only non-reproducible file),
``plot_<name>.py`` and ``manifest.json`` (config hash, module versions and the
sha256 of every data file).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import platform
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import load_config
from .errors import ConfigError, FiberHeatError, InvariantViolation
from .experiments import EXPERIMENTS, CaseFailed, default_config
from .plots import plot_script
from .solver import append_solve_log

log = logging.getLogger("fiberheat")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_INVARIANT = 0, 1, 2, 3
SUMMARY_COLUMNS = ("quantity", "value", "target", "passed")
TIMING_LOG = "solve_log.csv"


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(path: Path, columns, rows):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(v) for v in row])
    return path


def _sha256(path: Path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run_experiment(cfg) -> Path:
    """Run ``cfg`` and write all artifacts; returns the output directory."""
    exp = EXPERIMENTS[cfg.name]
    out = cfg.resolved_output_dir()
    out.mkdir(parents=True, exist_ok=True)
    log.info("running %s into %s", cfg.name, out)
    result = exp.runner(cfg, workers=cfg.workers)

    data = [write_csv(out / t.filename, t.columns, t.rows) for t in result.tables]
    data.append(write_csv(out / "summary.csv", SUMMARY_COLUMNS, result.summary))
    script = out / f"plot_{cfg.name.replace('-', '_')}.py"
    script.write_text(plot_script(cfg.name))
    timing = out / TIMING_LOG
    timing.unlink(missing_ok=True)
    append_solve_log(timing, result.solves)

    manifest = {
        "experiment": cfg.name,
        "config_hash": cfg.content_hash(),
        "config": {k: v for k, v in asdict(cfg).items() if k not in ("output_dir", "workers")},
        "versions": {"fiberheat": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
        "files": [{"name": p.name, "sha256": _sha256(p)} for p in data + [script]]
                 + [{"name": TIMING_LOG, "sha256": None, "note": "timing, not reproducible"}],
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    for quantity, value, target, passed in result.summary:
        mark = "" if passed == "" else ("PASS" if passed else "FAIL")
        print(f"{mark:4} {quantity} = {_cell(value)} {target}".rstrip())
    return out


def build_parser():
    parser = argparse.ArgumentParser(prog="fiberheat", description="Anisotropic heat conduction experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run the experiment described by a config file")
    p_run.add_argument("config")
    p_val = sub.add_parser("validate", help="check a config file without running it")
    p_val.add_argument("config")
    sub.add_parser("list-experiments", help="list the available experiments")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "list-experiments":
        for name, exp in EXPERIMENTS.items():
            print(f"{name:20} {exp.description}")
        return EXIT_OK
    try:
        cfg = load_config(args.config, default_config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "validate":
        print(f"{args.config}: ok ({cfg.name}, config hash {cfg.content_hash()[:12]})")
        return EXIT_OK
    try:
        out = run_experiment(cfg)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except CaseFailed as exc:
        print(f"{'invariant violation' if exc.invariant else 'numerical failure'}: {exc}", file=sys.stderr)
        return EXIT_INVARIANT if exc.invariant else EXIT_NUMERICAL
    except FiberHeatError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"artifacts in {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
