"""
Command-line front end.

Usage::

    hybridlab list-scenarios
    hybridlab run --config cfg.json --format json --out result.json
    hybridlab verify --theorem 2 --trials 1000 --labels 4 --qdim 4 --slices 20 --seed 42
    hybridlab counterexample --t 1.5707963267948966

Exit codes: 0 when the physics verdict is the expected one, 1 on a verdict
mismatch, 2 on bad flags, bad configs or shape errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import config as cfgmod
from . import nogo
from .errors import HybridLabError
from .rng import SEED_ENV, check_seed, seed_from_env

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2

SCENARIO_HELP = {
    "momentum_quantum": "S-E-M ring with a quantum mediator; total quasimomentum conserved while S and M exchange it",
    "momentum_hybrid": "E replaced by a classical register; audits O_C + P_S + P_M",
    "cow": "path qubit acquiring a gravitational phase with no momentum transfer",
    "energy": "kinetic energy of S against total energy (hybrid.mediator selects quantum or classical E)",
}


def _plain(obj):
    """``json.dumps`` fallback for numpy scalars and arrays."""
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, default=_plain) + "\n"


def format_csv(columns, records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for rec in records:
        w.writerow([v if isinstance(v, (int, np.integer)) else format(float(v), ".17g") for v in rec])
    return buf.getvalue()


def result_document(cfg: dict, result) -> dict:
    report = result.report.to_dict()
    report["extras"] = dict(
        report["extras"],
        scenario=result.extras,
        summary=result.verdict_text,
        expected=sorted(v.value for v in result.expected),
    )
    return {
        "config": cfg,
        "records": [dict(zip(result.columns, rec)) for rec in result.records],
        "report": report,
        "verdict": result.verdict.value,
    }


def _emit(text: str, path) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _resolve_seed(flag, fallback=None) -> int:
    if flag is not None:
        return check_seed(flag)
    if fallback is not None:
        return check_seed(fallback)
    return seed_from_env(0)


def cmd_list(args) -> int:
    for name in cfgmod.SCENARIOS:
        print(f"{name:18s} {SCENARIO_HELP[name]}")
    return EXIT_OK


def cmd_run(args) -> int:
    if args.config:
        raw = cfgmod.read_config_file(args.config)
    elif args.scenario:
        raw = {"scenario": args.scenario}
    else:
        raise HybridLabError("run needs --config or --scenario")
    seed = _resolve_seed(args.seed, raw.get("seed"))
    cfg = cfgmod.resolve(raw)
    cfg["seed"] = seed
    if args.tol_global is not None:
        cfg["tolerances"]["tol_global"] = args.tol_global
    if args.tol_local is not None:
        cfg["tolerances"]["tol_local"] = args.tol_local
    if args.format:
        cfg["output"]["format"] = args.format
    if args.out:
        cfg["output"]["path"] = args.out
    cfgmod.validate(cfg)

    result = cfgmod.run_config(cfg)
    if cfg["output"]["format"] == "json":
        text = dumps(result_document(cfg, result))
    else:
        text = format_csv(result.columns, result.records)
    _emit(text, cfg["output"]["path"])
    print(f"{cfg['scenario']}: {result.verdict.value} ({result.verdict_text})", file=sys.stderr)
    if not result.ok:
        print("verdict outside the scenario's expected class", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_verify(args) -> int:
    seed = _resolve_seed(args.seed)
    tg = nogo.TOL_GLOBAL if args.tol_global is None else args.tol_global
    tl = nogo.TOL_LOCAL if args.tol_local is None else args.tol_local
    if args.theorem == 1:
        summary = nogo.verify_theorem1_trials(args.labels, args.qdim, args.trials, seed)
    elif args.mode == "unconstrained":
        summary = nogo.conditional_filter_trials(args.labels, args.qdim, args.slices, args.trials, seed, tg, tl)
    else:
        summary = nogo.verify_theorem2_trials(args.labels, args.qdim, args.slices, args.trials, seed, tg, tl)
    _emit(dumps(summary.to_dict()), args.out)
    return EXIT_OK if summary.n_fail == 0 else EXIT_MISMATCH


def cmd_counterexample(args) -> int:
    tg = nogo.TOL_GLOBAL if args.tol_global is None else args.tol_global
    tl = nogo.TOL_LOCAL if args.tol_local is None else args.tol_local
    report = nogo.quantum_exchange_counterexample(args.t, args.points, tg, tl)
    _emit(dumps(report.to_dict()), args.out)
    ok = report.extras["global_conserved"] and report.extras["local_moved"]
    return EXIT_OK if ok else EXIT_MISMATCH


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {v}")
    return v


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not v > 0 or not np.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be a positive finite number, got {text}")
    return v


def _finite_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not np.isfinite(v):
        raise argparse.ArgumentTypeError("must be finite")
    return v


def _seed(text):
    try:
        return check_seed(text)
    except HybridLabError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybridlab",
        description="Hybrid quantum-classical dynamics: scenarios and conservation no-go checks.",
        epilog=f"The seed falls back to ${SEED_ENV} when --seed is not given.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def tol_flags(p):
        p.add_argument("--tol-global", type=_positive_float, default=None, help="global drift tolerance")
        p.add_argument("--tol-local", type=_positive_float, default=None, help="local drift tolerance")

    p = sub.add_parser("list-scenarios", help="list the available scenarios")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("run", help="run a scenario from a JSON config")
    p.add_argument("--config", help="path to a scenario config (JSON)")
    p.add_argument("--scenario", choices=cfgmod.SCENARIOS, help="run a scenario with its default config")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--seed", type=_seed, default=None)
    tol_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="randomized no-go theorem checks")
    p.add_argument("--theorem", type=int, choices=(1, 2), required=True)
    p.add_argument("--trials", type=_positive_int, default=100)
    p.add_argument("--labels", type=_positive_int, default=4, help="maximum number of classical labels")
    p.add_argument("--qdim", type=_positive_int, default=4, help="maximum quantum dimension")
    p.add_argument("--slices", type=_positive_int, default=20)
    p.add_argument("--mode", choices=("conserving", "unconstrained"), default="conserving",
                   help="theorem 2 only: conserving maps, or the conditional filter over unconstrained maps")
    p.add_argument("--seed", type=_seed, default=None)
    p.add_argument("--out", help="output path (default: stdout)")
    tol_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("counterexample", help="two-qubit exchange that conserves the total but moves the locals")
    p.add_argument("--t", type=_finite_float, default=np.pi / 2, help="final time (default pi/2)")
    p.add_argument("--points", type=_positive_int, default=50)
    p.add_argument("--out", help="output path (default: stdout)")
    tol_flags(p)
    p.set_defaults(func=cmd_counterexample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except HybridLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
