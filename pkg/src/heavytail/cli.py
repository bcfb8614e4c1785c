"""Command-line front end.

Exit codes: 0 ok, 1 configuration or output error, 2 numerical
nonconvergence, 3 a hypothesis fails, 4 a hypothesis is inconclusive.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import diagnostics as diag
from .config import SCHEMA_VERSION, ExperimentConfig, load_config, parse_config
from .errors import ConfigError, HeavyTailError, NoConvergenceError, PivotNotInSupportError, ZeroTailError
from .montecarlo import mc_stopped_tail_grid
from .tail_algebra import stopped_tail

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_FAIL, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4
CSV_HEADER = ("experiment_id", "functional", "x", "lower", "estimate", "upper", "method", "seed")

EXAMPLES = {
    "1": {
        "schema_version": SCHEMA_VERSION,
        "experiment_id": "example1",
        "functional": "random_max",
        "theorem": "4",
        "seq": {
            "rule": "periodic",
            "pattern": [
                {"kind": "degenerate_at_zero"},
                {"kind": "degenerate_at_zero"},
                {"kind": "exponential", "rate": 1.0},
            ],
            "head": {"1": {"kind": "cai_tang", "q": 0.5}},
            "pivot": 1,
            "phi_exponent": 1.0,
        },
        # any law with a finite mean and 1 in its support fits; this one is a default
        "eta": {"kind": "geometric", "q": 0.5},
        "x": [32.0, 100.0, 1000.0, 10000.0],
        "mc": {"samples": 1000000, "seed": 0},
    },
    "2": {
        "schema_version": SCHEMA_VERSION,
        "experiment_id": "example2",
        "functional": "random_max_of_sums",
        "theorem": "5",
        "seq": {
            "rule": "periodic",
            "pattern": [
                {"kind": "pareto_shifted", "shift": 0.0, "alpha": 3.0},
                {"kind": "pareto_shifted", "shift": 1.0, "alpha": 3.0},
            ],
            "pivot": 1,
            "phi_exponent": 1.0,
        },
        "eta": {"kind": "zeta", "s": 6.0},
        "x": [20.0, 50.0, 100.0],
        "mc": {"samples": 1000000, "seed": 0},
    },
}


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def jsonable(obj):
    """Plain JSON types; non-finite floats become the strings ``inf``, ``-inf``, ``nan``."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n"


def _fmt(v) -> str:
    return repr(float(v))


def csv_text(rows, header=CSV_HEADER) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out_dir, name: str, explicit=None):
    """Write ``text`` to ``explicit`` or ``out_dir/name``; print it when neither is given."""
    if explicit:
        path = Path(explicit)
    elif out_dir:
        path = Path(out_dir) / name
    else:
        sys.stdout.write(text)
        return None
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _tail_rows(cfg: ExperimentConfig):
    rows = []
    status = EXIT_OK
    brackets = []
    for x in cfg.x:
        try:
            est = stopped_tail(cfg.functional, cfg.seq, cfg.eta, x, tol=cfg.tol, h=cfg.h)
            method = est.method
        except NoConvergenceError as exc:
            est = exc.estimate
            method = "no_convergence"
            status = EXIT_NUMERIC
            print(f"x={x:g}: {exc}", file=sys.stderr)
        brackets.append(est)
        rows.append([cfg.experiment_id, cfg.functional.value, _fmt(x), _fmt(est.lower), _fmt(est.value), _fmt(est.upper), method, ""])
    if cfg.run_mc and cfg.x:
        for x, est, mc in zip(cfg.x, brackets, mc_stopped_tail_grid(cfg.functional, cfg.seq, cfg.eta, cfg.x, cfg.mc)):
            rows.append([cfg.experiment_id, cfg.functional.value, _fmt(x), _fmt(mc.lower), _fmt(mc.value), _fmt(mc.upper), mc.method, str(cfg.mc.seed)])
            if est is not None and (mc.upper < est.lower or mc.lower > est.upper):
                print(f"warning: x={x:g}: Monte Carlo interval misses the series bracket", file=sys.stderr)
    return rows, status


def cmd_tail(cfg: ExperimentConfig, out_dir=None) -> int:
    if not cfg.x:
        raise ConfigError("x", "tail needs at least one x value")
    rows, status = _tail_rows(cfg)
    _emit(csv_text(rows), out_dir, f"{cfg.experiment_id}_tail.csv", cfg.outputs.get("csv"))
    return status


def cmd_mc(cfg: ExperimentConfig, out_dir=None) -> int:
    if not cfg.x:
        raise ConfigError("x", "mc needs at least one x value")
    rows = [
        [cfg.experiment_id, cfg.functional.value, _fmt(x), _fmt(e.lower), _fmt(e.value), _fmt(e.upper), e.method, str(cfg.mc.seed)]
        for x, e in zip(cfg.x, mc_stopped_tail_grid(cfg.functional, cfg.seq, cfg.eta, cfg.x, cfg.mc))
    ]
    _emit(csv_text(rows), out_dir, f"{cfg.experiment_id}_mc.csv", cfg.outputs.get("csv"))
    return EXIT_OK


def diagnose_sequence(cfg: ExperimentConfig, depth: int = 64):
    """One report per distinct component law among the probed indices."""
    seen = {}
    for k in cfg.seq.representative_indices(depth):
        seen.setdefault(cfg.seq.dist_at(k), []).append(k)
    entries, rows = [], []
    for law, ks in seen.items():
        entry = {"indices": ks, "law": law.to_dict()}
        try:
            rep = diag.diagnose(law, cfg.grid, cfg.mc)
        except ZeroTailError as exc:
            entry["error"] = {"code": exc.code, "message": str(exc)}
            rows.append([cfg.experiment_id, ks[0], "*", "", exc.code])
        else:
            entry["report"] = rep.to_dict()
            rows.extend([cfg.experiment_id, ks[0], c, _fmt(s), v] for c, s, v in rep.csv_rows())
        entries.append(entry)
    return entries, rows


def cmd_diagnose(cfg: ExperimentConfig, out_dir=None) -> int:
    entries, rows = diagnose_sequence(cfg)
    _emit(dumps({"experiment_id": cfg.experiment_id, "laws": entries}), out_dir, "diagnosis.json", cfg.outputs.get("json"))
    if out_dir:
        _emit(csv_text(rows, ("experiment_id", "index", "class", "statistic", "verdict")), out_dir, "diagnosis.csv")
    return EXIT_OK


def _check_exit(report) -> int:
    return {diag.PASS: EXIT_OK, diag.FAIL: EXIT_FAIL, diag.INCONCLUSIVE: EXIT_INCONCLUSIVE}[report.verdict]


def run_check(cfg: ExperimentConfig, theorem):
    try:
        report = diag.check(theorem, cfg.seq, cfg.eta, cfg.grid, cfg.mc)
    except PivotNotInSupportError as exc:
        return {"theorem": str(theorem), "verdict": diag.FAIL, "error": {"code": exc.code, "message": str(exc)}}, EXIT_FAIL
    return report.to_dict(), _check_exit(report)


def cmd_check(cfg: ExperimentConfig, theorem, out_dir=None) -> int:
    payload, code = run_check(cfg, theorem)
    _emit(dumps(payload), out_dir, "check.json", cfg.outputs.get("json"))
    return code


def cmd_reproduce(example: str, out_dir, seed=None, samples=None) -> int:
    if example not in EXAMPLES:
        raise ConfigError("example", f"unknown example {example!r}; choose 1 or 2")
    raw = copy.deepcopy(EXAMPLES[example])
    if seed is not None:
        raw["mc"]["seed"] = seed
    if samples is not None:
        raw["mc"]["samples"] = samples
    theorem = raw.pop("theorem")
    cfg = parse_config(raw)
    out = Path(out_dir or f"reproduce_{example}")
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.json").write_text(dumps(raw))
    except OSError as exc:
        raise ConfigError(str(out), f"cannot write output: {exc.strerror}") from None
    entries, rows = diagnose_sequence(cfg)
    _emit(dumps({"experiment_id": cfg.experiment_id, "laws": entries}), out, "diagnosis.json")
    _emit(csv_text(rows, ("experiment_id", "index", "class", "statistic", "verdict")), out, "diagnosis.csv")
    payload, code = run_check(cfg, theorem)
    _emit(dumps(payload), out, "check.json")
    tail_rows, status = _tail_rows(cfg)
    _emit(csv_text(tail_rows), out, "tail.csv")
    print(f"example {example}: theorem {theorem} {payload['verdict']}; outputs in {out}")
    return status or code


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heavytail", description="Tails of randomly stopped sums, maxima and maxima of sums.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True):
        if config:
            sp.add_argument("--config", required=True, help="experiment JSON")
        sp.add_argument("--seed", type=int, help="override mc.seed")
        sp.add_argument("--samples", type=int, help="override mc.samples")
        sp.add_argument("--out", help="output directory")

    common(sub.add_parser("tail", help="series brackets for the stopped tail, with an optional Monte Carlo cross-check"))
    common(sub.add_parser("mc", help="stratified Monte Carlo estimate of the stopped tail"))
    common(sub.add_parser("diagnose", help="class diagnostics for each distinct component law"))
    ck = sub.add_parser("check", help="check the hypotheses of a closure theorem")
    common(ck)
    ck.add_argument("--theorem", required=True, help="1, 2, 3, 4, 5, cor1 or cor2")
    rp = sub.add_parser("reproduce", help="run a bundled example end to end")
    rp.add_argument("example", help="1 or 2")
    common(rp, config=False)
    return p


def _with_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    kw = {}
    if args.seed is not None:
        kw["seed"] = args.seed
    if args.samples is not None:
        kw["samples"] = args.samples
    if not kw:
        return cfg
    try:
        return replace(cfg, mc=replace(cfg.mc, **kw), run_mc=cfg.run_mc or args.samples is not None)
    except ValueError as exc:
        raise ConfigError("mc", str(exc)) from None


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "reproduce":
            return cmd_reproduce(args.example, args.out, args.seed, args.samples)
        cfg = _with_overrides(load_config(args.config), args)
        if args.command == "tail":
            return cmd_tail(cfg, args.out)
        if args.command == "mc":
            return cmd_mc(cfg, args.out)
        if args.command == "diagnose":
            return cmd_diagnose(cfg, args.out)
        if str(args.theorem).lower() not in diag.CHECKERS:
            raise ConfigError("--theorem", f"unknown theorem {args.theorem!r}")
        return cmd_check(cfg, args.theorem, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HeavyTailError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
