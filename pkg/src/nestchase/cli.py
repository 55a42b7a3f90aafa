"""Command-line front end.

Verbs::

    nestchase gen random-nested --dimension 3 --requests 20 --seed 7 --out inst.json
    nestchase gen covering-lp   --dimension 2 --requests 10 --seed 0 --out cov.json
    nestchase run --alg chase --instance inst.json --out-dir runs/chase-7
    nestchase run --alg ellipsoid --adversary alternating-cuts --requests 50 \
        --out-dir runs/ell
    nestchase opt --instance inst.json
    nestchase report runs/* --out summary.csv

Exit codes: 0 success; 2 infeasible input or contract violation; 3 parse
error; 4 convergence failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .adversary import (DEFAULT_ALPHA, DEFAULT_INDEX_CAP, AlternatingCutAdversary,
                        gen_covering_lp, gen_random_nested)
from .baselines import ALGORITHM_NAMES
from .errors import (ContractViolation, ConvergenceError, DegenerateBodyError,
                     EmptyBodyError, ParseError, UnboundedBodyError)
from . import harness

GENERATORS = {
    "random-nested": gen_random_nested,
    "covering-lp": gen_covering_lp,
}

ADVERSARIES = ("alternating-cuts",)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nestchase",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    p_gen = sub.add_parser("gen", help="generate an instance file")
    p_gen.add_argument("generator", choices=sorted(GENERATORS))
    p_gen.add_argument("--dimension", "-d", type=int, required=True)
    p_gen.add_argument("--requests", "-n", type=int, required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True)

    p_run = sub.add_parser("run", help="run one algorithm on one request source")
    p_run.add_argument("--alg", choices=ALGORITHM_NAMES, required=True)
    src = p_run.add_mutually_exclusive_group(required=True)
    src.add_argument("--instance", help="instance JSON file")
    src.add_argument("--adversary", choices=ADVERSARIES,
                     help="adaptive request source")
    p_run.add_argument("--requests", "-n", type=int, default=None,
                       help="request cap (required with --adversary)")
    p_run.add_argument("--alpha", type=float, default=DEFAULT_ALPHA,
                       help="adversary oscillation parameter in (0, 1)")
    p_run.add_argument("--index-cap", type=int, default=DEFAULT_INDEX_CAP)
    p_run.add_argument("--start", default=None,
                       help="comma-separated start point override")
    p_run.add_argument("--strict", action="store_true",
                       help="validate the request stream while running")
    p_run.add_argument("--out-dir", default=None,
                       help="write report.json and trajectory.json here "
                            "(default: print the report)")

    p_opt = sub.add_parser("opt", help="print the offline optimum of an instance")
    p_opt.add_argument("--instance", required=True)

    p_rep = sub.add_parser("report", help="collect run reports into a CSV summary")
    p_rep.add_argument("run_dirs", nargs="+")
    p_rep.add_argument("--out", required=True)
    return parser


def _parse_start(text: str) -> np.ndarray:
    try:
        return np.array([float(tok) for tok in text.split(",")])
    except ValueError as exc:
        raise ContractViolation(f"bad --start value {text!r}") from exc


def _cmd_gen(args) -> int:
    instance = GENERATORS[args.generator](args.dimension, args.requests, args.seed)
    harness.save_instance(instance, args.out)
    print(f"wrote {args.out} ({args.generator}, d={args.dimension}, "
          f"n={args.requests}, seed={args.seed})")
    return 0


def _cmd_run(args) -> int:
    start = _parse_start(args.start) if args.start else None
    if args.instance:
        source = harness.load_instance(args.instance)
        instance_id = Path(args.instance).stem
    else:
        source = AlternatingCutAdversary(alpha=args.alpha, index_cap=args.index_cap)
        instance_id = f"{args.adversary}-a{args.alpha:g}"
        if args.requests is None:
            raise ContractViolation("--adversary runs need --requests")
    report, trajectory = harness.run(
        args.alg, source, n=args.requests, start=start, strict=args.strict,
        instance_id=instance_id)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        harness.save_report(report, out / "report.json")
        harness.save_trajectory(trajectory, out / "trajectory.json")
        print(f"wrote {out}/report.json (cost={report.total_cost:.6g}, "
              f"opt={report.opt_cost:.6g})")
    else:
        doc = report.to_dict()
        doc.pop("phase_events")
        print(json.dumps(doc, indent=1))
    return 0


def _cmd_opt(args) -> int:
    instance = harness.load_instance(args.instance)
    print(repr(harness.opt(instance)))
    return 0


def _cmd_report(args) -> int:
    reports = []
    for run_dir in args.run_dirs:
        path = Path(run_dir)
        if path.is_dir():
            path = path / "report.json"
        if not path.exists():
            raise ParseError(f"{run_dir}: no report.json found")
        reports.append(harness.load_report(path))
    harness.emit_summary(reports, args.out)
    print(f"wrote {args.out} ({len(reports)} rows)")
    return 0


_VERBS = {"gen": _cmd_gen, "run": _cmd_run, "opt": _cmd_opt, "report": _cmd_report}


def exit_code_for(exc: Exception) -> int:
    if isinstance(exc, ParseError):
        return 3
    if isinstance(exc, ConvergenceError):
        return 4
    if isinstance(exc, (ContractViolation, EmptyBodyError, UnboundedBodyError,
                        DegenerateBodyError)):
        return 2
    return 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _VERBS[args.verb](args)
    except (ParseError, ConvergenceError, ContractViolation, EmptyBodyError,
            UnboundedBodyError, DegenerateBodyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
