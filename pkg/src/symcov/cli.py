"""Command line entry point: ``symcov simulate | estimate | verify``."""

import argparse
import sys

from .errors import InvalidInput, IoError, SymcovError
from .estimators import FixedPointConfig, constrained_estimate
from .harness import ExperimentConfig, run_experiment, write_report
from .objectives import RhoObjective
from .sampling import read_samples
from .symmetry import load_group_file, make_group, make_trivial_group
from .verification import SUITES, run_suite

GROUP_CHOICES = ("circulant", "persymmetric", "proper-complex", "proper-quaternion", "none")


def group_for_dim(spec, dim):
    """Resolve a ``--group`` value against the sample dimension."""
    if spec.startswith("file:"):
        K = load_group_file(spec[5:])
        if K.dim != dim:
            raise InvalidInput(f"group file has dim={K.dim} but samples have {dim} columns")
        return K
    if spec == "none":
        return make_trivial_group(dim)
    divisor = {"proper-complex": 2, "proper-quaternion": 4}.get(spec, 1)
    if spec not in GROUP_CHOICES:
        raise InvalidInput(f"unknown group {spec!r}")
    if dim % divisor:
        raise InvalidInput(f"{spec} needs a dimension divisible by {divisor}, got {dim}")
    return make_group(spec, dim // divisor)


def write_matrix(path, Q):
    text = "".join(",".join(format(float(v), ".17g") for v in row) + "\n" for row in Q)
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc


def _simulate(args):
    cfg = ExperimentConfig.from_file(args.config)
    report = run_experiment(cfg, workers=args.workers)
    write_report(report, args.out)
    for row in report.summary:
        print(f"{row.estimator:>12} n={row.n:<5} mean={row.mean_error:.4f} se={row.std_error:.4f}")
    if report.failures:
        print(f"{len(report.failures)} estimator cells failed; see {args.out}.failures.csv")
    return 0


def _estimate(args):
    X, _ = read_samples(args.samples)
    K = group_for_dim(args.group, X.shape[1])
    if args.objective == "tyler":
        obj = RhoObjective.tyler(X.shape[1])
    else:
        obj = RhoObjective.mggd(X.shape[1], args.beta)
    cfg = FixedPointConfig(tol=args.tol, max_iter=args.max_iter)
    result = constrained_estimate(X, K, obj, cfg)
    write_matrix(args.out, result.estimate)
    status = "converged" if result.converged else "did NOT converge"
    print(
        f"{status} after {result.iterations} iterations "
        f"(relative change {result.final_relative_change:.3e}); wrote {args.out}"
    )
    return 0


def _verify(args):
    results = run_suite(args.suite, seed=args.seed)
    for r in results:
        print(f"[{'PASS' if r.ok else 'FAIL'}] {r.name}: {r.detail}")
    return 0 if all(r.ok for r in results) else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="symcov", description="Robust scatter estimation with group-symmetry constraints."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the Monte Carlo estimator comparison")
    sim.add_argument("--config", required=True, help="key = value experiment config file")
    sim.add_argument("--out", required=True, help="output prefix for the report CSVs")
    sim.add_argument("--workers", type=int, default=None, help="worker processes (default: SYMCOV_THREADS or CPU count)")
    sim.set_defaults(func=_simulate)

    est = sub.add_parser("estimate", help="estimate one scatter matrix from a sample CSV")
    est.add_argument("--samples", required=True)
    est.add_argument("--group", default="none", help="|".join(GROUP_CHOICES) + "|file:PATH")
    est.add_argument("--objective", choices=("tyler", "mggd"), default="tyler")
    est.add_argument("--beta", type=float, default=0.5, help="MGGD shape in (0, 1]")
    est.add_argument("--tol", type=float, default=1e-8)
    est.add_argument("--max-iter", type=int, default=500)
    est.add_argument("--out", required=True)
    est.set_defaults(func=_estimate)

    ver = sub.add_parser("verify", help="run numerical verification suites")
    ver.add_argument("--suite", choices=tuple(SUITES) + ("all",), default="all")
    ver.add_argument("--seed", type=int, default=0)
    ver.set_defaults(func=_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "estimate" and not (
        args.group in GROUP_CHOICES or args.group.startswith("file:")
    ):
        parser.print_usage(sys.stderr)
        print(f"symcov estimate: error: invalid --group {args.group!r}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except SymcovError as exc:
        print(f"symcov {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
