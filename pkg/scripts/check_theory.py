"""Closed form vs enumeration vs Monte Carlo on a handful of random instances.

    python scripts/check_theory.py [--instances 10] [--trials 100000] [--seed 0]
"""
import argparse

import numpy as np

from sampleproj.theory import enumerate_mse, exact_mse, monte_carlo_mse
from sampleproj.verification import oracle_suite, random_instance


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=10)
    ap.add_argument("--trials", type=int, default=100000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    gen = np.random.default_rng(args.seed)
    print(f"{'n':>2} {'p':>2} {'m':>2} {'sigma2':>6} {'noise':>8} {'closed':>12} {'enumerated':>12} {'monte carlo':>22}")
    for i in range(args.instances):
        spec = random_instance(gen)
        for noise in ("per-draw", "per-row"):
            ex = exact_mse(spec, noise).estimator_mse
            en = enumerate_mse(spec, noise).estimator_mse
            mc = monte_carlo_mse(spec, args.trials, args.seed + i, noise)
            print(
                f"{spec.X.n:>2} {spec.X.p:>2} {spec.m:>2} {spec.sigma2:>6g} {noise:>8} {ex:>12.6f} {en:>12.6f}"
                f" {mc.estimator_mse:>12.6f} +- {mc.estimator_stderr:.4f}"
            )
    res = oracle_suite(args.seed, 200)
    print(f"\noracle suite over {res.instances} instances: max deviation {res.max_mse_deviation:.2e}, "
          f"max bias {res.max_bias:.2e}, passed={res.passed}")


if __name__ == "__main__":
    main()
