"""Command-line entry point: ``sampleproj <subcommand> ...``.

Exit codes: 0 success, 1 validation error or bad usage, 2 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import os
import sys
import time

import numpy as np

from .csvio import parse_vector, read_matrix_csv, read_vector_csv
from .errors import EnumerationTooLarge
from .estimators import ols_fit, sample_ls_fit, sample_proj_fit
from .experiments import ExperimentConfig, emit_csv, run_experiment
from .linalg import build_design, leverage_profile, pseudo_inverse
from .plotting import emit_svg
from .sampling import draw_with_replacement, write_draws_csv
from .scores import FAMILIES, compute_scores
from .synth import SynthSpec, gen_instance, write_instance
from .theory import MSE_CSV_HEADER, NOISE_MODELS, ProblemSpec, enumerate_mse, exact_mse, monte_carlo_mse, mse_upper_bound
from .verification import oracle_suite


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _seed(text):
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _vector_arg(text):
    """Comma-separated literal, or a path to a one-column CSV."""
    return read_vector_csv(text) if os.path.isfile(text) else parse_vector(text)


def _design_inputs(args):
    X = build_design(read_matrix_csv(args.matrix))
    beta0 = _vector_arg(args.beta0) if args.beta0 is not None else None
    return X, beta0


def cmd_scores(args):
    X, beta0 = _design_inputs(args)
    profile = leverage_profile(X)
    fams = args.family or [
        f for f in FAMILIES
        if f in ("uniform", "lev", "sqrt-lev")
        or (f.startswith("nsr") and (args.nsr is not None or beta0 is not None))
        or (f.startswith("opt") and beta0 is not None)
    ]
    sigma2 = args.sigma2 if args.sigma2 is not None else (0.0 if beta0 is not None else None)
    cols = [compute_scores(f, X, profile, beta0, sigma2, args.nsr).pi for f in fams]
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["row", *fams])
    for i in range(X.n):
        w.writerow([i, *(repr(float(c[i])) for c in cols)])
    return 0


def cmd_fit(args):
    X, beta0 = _design_inputs(args)
    y = read_vector_csv(args.y)
    xdag = pseudo_inverse(X)
    if args.method == "ols":
        fit = ols_fit(xdag, y)
    else:
        scores = compute_scores(args.family, X, leverage_profile(X, xdag), beta0, args.sigma2, args.nsr)
        draw = draw_with_replacement(scores, args.m, args.seed)
        ys = y[draw.indices] if len(y) == X.n else None
        if ys is None:
            raise ValueError(f"y has length {len(y)}, expected {X.n}")
        fit = sample_proj_fit(xdag, draw, ys) if args.method == "proj" else sample_ls_fit(X, draw, ys)
        if args.draws_out:
            write_draws_csv([draw], args.draws_out)
    print(f"{fit.method}: " + ",".join(repr(float(b)) for b in fit.beta_hat))
    return 0


def cmd_mse(args):
    X, beta0 = _design_inputs(args)
    if beta0 is None:
        raise ValueError("mse needs --beta0")
    scores = compute_scores(args.family, X, leverage_profile(X), beta0, args.sigma2, args.nsr)
    spec = ProblemSpec(X, beta0, args.sigma2, args.m, scores)
    reports = [exact_mse(spec, args.noise)]
    reports.append(mse_upper_bound(X, beta0 @ beta0, args.sigma2, args.m, scores, spec.signal @ spec.signal, args.noise))
    try:
        reports.append(enumerate_mse(spec, args.noise))
    except EnumerationTooLarge as e:
        print(f"enumeration skipped: {e}")
    if args.trials >= 2:
        reports.append(monte_carlo_mse(spec, args.trials, args.seed, args.noise))
    for r in reports:
        line = f"{r.method}: estimator_mse={r.estimator_mse!r} predictor_mse={r.predictor_mse!r}"
        if r.estimator_stderr is not None:
            line += f" stderr={r.estimator_stderr!r}"
        print(line)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(MSE_CSV_HEADER)
            for r in reports:
                w.writerow(r.csv_row(args.family, args.m, args.sigma2))
    return 0


def cmd_synth(args):
    inst = gen_instance(SynthSpec(args.n, args.p, args.df, sigma=args.sigma, seed=args.seed))
    write_instance(inst, args.out)
    print(f"wrote {args.out}: nsr={inst.nsr!r} noise_energy_ratio={inst.noise_energy_ratio!r}")
    return 0


def run_config(cfg: ExperimentConfig, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    records = run_experiment(cfg)
    emit_csv(records, os.path.join(out_dir, "results.csv"))
    for axis, tag in (("by_m", "m"), ("by_sigma", "sigma")):
        for metric in ("est", "pred"):
            emit_svg(records, axis, metric, os.path.join(out_dir, f"{metric}_vs_{tag}.svg"))
    return records


def cmd_experiment(args):
    cfg = ExperimentConfig.from_json(args.config)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.out is not None:
        changes["out_dir"] = args.out
    if changes:
        cfg = ExperimentConfig.from_dict({**cfg.__dict__, **changes})
    t0 = time.perf_counter()
    records = run_config(cfg, cfg.out_dir)
    degenerate = sum(r.degenerate for r in records)
    print(f"{len(records)} cells written to {cfg.out_dir} in {time.perf_counter() - t0:.1f}s"
          + (f" ({degenerate} degenerate)" if degenerate else ""))
    return 0


def cmd_verify(args):
    res = oracle_suite(args.seed, args.instances, args.noise)
    print(
        f"verify: {res.instances} instances, max oracle deviation {res.max_mse_deviation:.3e}, "
        f"max bias {res.max_bias:.3e}, covariance deviation {res.max_covariance_deviation:.3e}, "
        f"bound violations {res.bound_violations}, optimality violations {res.optimality_violations}: "
        + ("PASS" if res.passed else "FAIL")
    )
    return 0 if res.passed else 1


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0, help="unsigned 64-bit seed")

    design = _Parser(add_help=False)
    design.add_argument("--matrix", required=True, help="CSV design matrix, no header")
    design.add_argument("--beta0", help="true coefficients: comma separated, or a CSV file")
    design.add_argument("--sigma2", type=float, default=None, help="noise variance")
    design.add_argument("--nsr", type=float, default=None, help="noise-to-signal ratio for nsr-* families")

    p = _Parser(prog="sampleproj", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("scores", parents=[design], help="print sampling distributions for a matrix")
    s.add_argument("--family", action="append", choices=FAMILIES)
    s.set_defaults(func=cmd_scores)

    s = sub.add_parser("fit", parents=[common, design], help="one SampleProj / SampleLS / OLS fit")
    s.add_argument("--y", required=True, help="CSV response vector")
    s.add_argument("--family", default="lev", choices=FAMILIES)
    s.add_argument("--m", type=int, default=10)
    s.add_argument("--method", default="proj", choices=("proj", "ls", "ols"))
    s.add_argument("--draws-out", help="write the draw as trial,position,index,weight CSV")
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("mse", parents=[common, design], help="closed form vs bound vs enumeration vs Monte Carlo")
    s.add_argument("--family", default="uniform", choices=FAMILIES)
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--trials", type=int, default=100000)
    s.add_argument("--noise", default="per-draw", choices=NOISE_MODELS)
    s.add_argument("--csv", help="also write the reports as CSV")
    s.set_defaults(func=cmd_mse, sigma2_default=True)

    s = sub.add_parser("synth", parents=[common], help="generate a heavy-tailed instance")
    s.add_argument("--n", type=int, default=1000)
    s.add_argument("--p", type=int, default=20)
    s.add_argument("--df", type=int, default=1)
    s.add_argument("--sigma", type=float, default=0.0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("experiment", help="run a JSON experiment config")
    s.add_argument("--config", required=True)
    s.add_argument("--out", default=None)
    s.add_argument("--seed", type=_seed, default=None)
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("verify", parents=[common], help="oracle-equivalence suite on random small instances")
    s.add_argument("--instances", type=int, default=50)
    s.add_argument("--noise", default="per-draw", choices=NOISE_MODELS)
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 1
        if getattr(args, "sigma2_default", False) and args.sigma2 is None:
            args.sigma2 = 0.0
        return args.func(args)
    except UsageError as e:
        print(e, file=sys.stderr)
        return 1
    except OSError as e:
        print(f"sampleproj: I/O error: {e}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as e:
        print(f"sampleproj: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
