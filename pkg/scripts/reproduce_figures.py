"""Error-vs-sample-size and error-vs-noise sweeps on the t_1 design.

    python scripts/reproduce_figures.py [--trials 500] [--seed 1] [--out results]

Writes results.csv and four SVG plots per sweep, then prints the err_Est and
err_Pred tables.  With --with-nsr the practical NSR-based scores are added.
"""
import argparse
import dataclasses
import os

from sampleproj.cli import run_config
from sampleproj.experiments import ExperimentConfig
from sampleproj.scores import FAMILIES, CORE_FAMILIES

HERE = os.path.dirname(os.path.abspath(__file__))


def table(records, key):
    fams = sorted({r.family for r in records}, key=FAMILIES.index)
    cols = sorted({key(r) for r in records})
    by = {(r.family, key(r)): r for r in records}
    print("family".ljust(10) + "".join(f"{c:>16}" for c in cols))
    for f in fams:
        cells = (by[(f, c)] for c in cols)
        print(f.ljust(10) + "".join(f"{r.mean_err_est:>8.3f}/{r.mean_err_pred:<7.3f}" for r in cells))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", default="results")
    ap.add_argument("--with-nsr", action="store_true")
    args = ap.parse_args()
    fams = FAMILIES if args.with_nsr else CORE_FAMILIES
    for name, key in (("sample_size_sweep", lambda r: r.m), ("noise_sweep", lambda r: r.sigma)):
        cfg = ExperimentConfig.from_json(os.path.join(HERE, "..", "configs", f"{name}.json"))
        cfg = dataclasses.replace(cfg, trials=args.trials, seed=args.seed, families=fams, out_dir=os.path.join(args.out, name))
        records = run_config(cfg, cfg.out_dir)
        for sigma in cfg.sigma_list if name == "sample_size_sweep" else [None]:
            sub = [r for r in records if sigma is None or r.sigma == sigma]
            print(f"\n{name}" + ("" if sigma is None else f", sigma = {sigma:g}") + "  (err_Est/err_Pred)")
            table(sub, key)
        print(f"-> {cfg.out_dir}")


if __name__ == "__main__":
    main()
