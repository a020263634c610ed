"""Command line entry point: ``tentspace run --experiment NAME [options]``.

Flags override values from ``--config`` (JSON or YAML), which override the
built-in defaults.  For every experiment a CSV table ``<name>.csv`` is
written to ``--out``, plus ``summary.json`` with the pass/fail verdicts.
The exit status is 0 iff every experiment passed.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import yaml

from .runner import COLUMNS, EXPERIMENTS, PRESETS, RunConfig, config_dict, run

log = logging.getLogger("tentspace")


def _p_value(text: str) -> float:
    v = math.inf if text.strip().lower() in ("inf", "infinity") else float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"p must be positive, got {text}")
    return v


def _csv_floats(conv):
    def parse(text: str):
        try:
            return [conv(x) for x in text.split(",") if x.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None

    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tentspace", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run named experiments")
    r.add_argument("--experiment", help="comma separated names, or 'all': " + ", ".join(EXPERIMENTS))
    r.add_argument("--config", type=Path, help="JSON/YAML file with default option values")
    r.add_argument("--n", type=int, help="spatial dimension (1, 2 or 3)")
    r.add_argument("--p", type=_csv_floats(_p_value), help="exponent(s), e.g. 1 or 0.5,1,inf")
    r.add_argument("--alphas", type=_csv_floats(float), help="apertures, e.g. 2,4,8,16,32")
    r.add_argument("--lambda", dest="lam", type=_csv_floats(float), help="grand square function exponent(s)")
    r.add_argument("--grid-preset", choices=sorted(PRESETS))
    r.add_argument("--seed", type=int)
    r.add_argument("--out", type=Path, help="output directory (default: results)")
    r.add_argument("--jobs", type=int, help="worker processes (default: all cores)")
    r.add_argument("-v", "--verbose", action="store_true")
    return parser


def _load_config(path: Path | None) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ValueError(f"config file {path} must hold a mapping")
    return {k.replace("-", "_"): v for k, v in data.items()}


def _listify(v):
    if v is None or isinstance(v, list):
        return v
    return [v]


def write_csv(path: Path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=COLUMNS)
        w.writeheader()
        for row in rows:
            w.writerow({k: ("" if row[k] is None else row[k]) for k in COLUMNS})


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")

    try:
        merged = _load_config(args.config)
    except (OSError, ValueError, yaml.YAMLError) as exc:
        parser.error(f"cannot read config: {exc}")
    for key in ("experiment", "n", "p", "alphas", "lam", "grid_preset", "seed", "out", "jobs"):
        val = getattr(args, key)
        if val is not None:
            merged[key] = val

    names = str(merged.pop("experiment", "") or "")
    names = list(EXPERIMENTS) if names == "all" else [x.strip() for x in names.split(",") if x.strip()]
    if not names:
        parser.error("--experiment is required")
    unknown = [x for x in names if x not in EXPERIMENTS]
    if unknown:
        parser.error(f"unknown experiment(s) {unknown}; choose from {', '.join(EXPERIMENTS)}")
    out = Path(merged.pop("out", "results"))
    for key in ("p", "alphas", "lam"):
        merged[key] = _listify(merged.get(key))

    configs = []
    for name in names:
        try:
            configs.append(RunConfig(experiment=name, **merged))
        except (TypeError, ValueError) as exc:
            parser.error(str(exc))

    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        parser.error(f"output directory {out} is not writable: {exc}")

    summary = {"passed": True, "experiments": []}
    for cfg in configs:
        outcome = run(cfg)
        write_csv(out / f"{cfg.experiment}.csv", outcome.rows)
        entry = outcome.to_json()
        entry["config"] = config_dict(cfg)
        summary["experiments"].append(entry)
        summary["passed"] &= outcome.passed
        print(f"{cfg.experiment}: {'PASS' if outcome.passed else 'FAIL'}")
        log.info(json.dumps(outcome.summary, default=str, indent=1))
    (out / "summary.json").write_text(json.dumps(summary, indent=2, default=_json_default))
    return 0 if summary["passed"] else 1


def _json_default(o):
    if isinstance(o, float) and math.isinf(o):
        return "inf"
    try:
        return float(o)
    except (TypeError, ValueError):
        return str(o)


if __name__ == "__main__":
    sys.exit(main())
