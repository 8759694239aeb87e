"""Exit criteria, one test each, at the stated tolerances and time budgets."""
import json
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from sampleproj import (
    ProblemSpec,
    build_design,
    enumerate_mse,
    exact_mse,
    leverage_profile,
    leverage_scores,
    monte_carlo_mse,
    mse_upper_bound,
    nsr_estimator_scores,
    nsr_predictor_scores,
    oracle_estimator_scores,
    oracle_predictor_scores,
    sqrt_leverage_scores,
    uniform_scores,
)
from sampleproj.cli import main
from sampleproj.experiments import ExperimentConfig, run_experiment
from sampleproj.scores import CORE_FAMILIES, from_probabilities
from sampleproj.verification import grid_search_mse, random_instance

INSTANCE_SEED = 20240611


def record(name, ok, detail, elapsed, budget):
    status = "PASS" if ok and elapsed < budget else "FAIL"
    line = f"[{status}] {name}: {detail} ({elapsed:.2f}s, budget {budget:.0f}s)"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line
    assert elapsed < budget, line


@pytest.fixture(scope="module")
def instances():
    gen = np.random.default_rng(INSTANCE_SEED)
    return [random_instance(gen) for _ in range(50)]


def test_c1_oracle_equivalence(instances):
    t0 = time.perf_counter()
    worst = 0.0
    ok = True
    for spec in instances:
        ex, en = exact_mse(spec), enumerate_mse(spec)
        for a, b in ((en.estimator_mse, ex.estimator_mse), (en.predictor_mse, ex.predictor_mse)):
            ok &= abs(a - b) <= 1e-10 * (1 + b)
            worst = max(worst, abs(a - b) / (1 + b))
    record("C1 closed form == enumeration", ok, f"50 instances, max rel deviation {worst:.2e} <= 1e-10", time.perf_counter() - t0, 5)


def test_c2_unbiasedness(instances):
    t0 = time.perf_counter()
    bias = max(float(np.max(np.abs(enumerate_mse(s).mean - s.beta0))) for s in instances)
    gen = np.random.default_rng(7)
    X = build_design(gen.standard_normal((10, 3)))
    beta0 = gen.standard_normal(3)
    spec = ProblemSpec(X, beta0, 0.5, 5, sqrt_leverage_scores(leverage_profile(X)))
    mc = monte_carlo_mse(spec, 200000, master_seed=2024)
    z = np.abs(mc.mean - beta0) / mc.mean_stderr
    ok = bias <= 1e-10 and bool(np.all(z < 4))
    record("C2 unbiasedness", ok, f"enumerated max |E b - b0| {bias:.2e}; Monte Carlo z-scores {np.round(z, 2).tolist()} < 4", time.perf_counter() - t0, 30)


def test_c3_monte_carlo_vs_closed_form():
    t0 = time.perf_counter()
    spec = ProblemSpec(build_design(np.eye(2)), [1, 1], 1.0, 2, uniform_scores(2))
    closed = exact_mse(spec).estimator_mse
    mc = monte_carlo_mse(spec, 200000, master_seed=31337)
    z = abs(mc.estimator_mse - closed) / mc.estimator_stderr
    record("C3 Monte Carlo vs closed form", z < 4 and closed == 3.0, f"MC {mc.estimator_mse:.4f} vs {closed}, z = {z:.2f} < 4", time.perf_counter() - t0, 10)


def test_c4_oracle_scores_are_optimal():
    t0 = time.perf_counter()
    gen = np.random.default_rng(INSTANCE_SEED + 4)
    ok, worst_gap = True, -math.inf
    for _ in range(20):
        spec = random_instance(gen)
        prof = spec.profile
        est = exact_mse(spec.with_scores(oracle_estimator_scores(spec.X, prof, spec.beta0, spec.sigma2))).estimator_mse
        pred = exact_mse(spec.with_scores(oracle_predictor_scores(spec.X, prof, spec.beta0, spec.sigma2))).predictor_mse
        for sc in (uniform_scores(spec.X.n), leverage_scores(prof), sqrt_leverage_scores(prof)):
            r = exact_mse(spec.with_scores(sc))
            # exact ties occur (p = 1 and sigma2 = 0 make opt-est equal lev); allow rounding
            ok &= est <= r.estimator_mse + 1e-12 * (1 + abs(r.estimator_mse))
            ok &= pred <= r.predictor_mse + 1e-12 * (1 + abs(r.predictor_mse))
        g_est, g_pred = grid_search_mse(spec, "estimator"), grid_search_mse(spec, "predictor")
        ok &= est <= g_est + 1e-9 and pred <= g_pred + 1e-9
        worst_gap = max(worst_gap, est - g_est, pred - g_pred)
    record("C4 oracle scores optimal", ok, f"20 instances, max (oracle - grid min) = {worst_gap:.2e} <= 1e-9", time.perf_counter() - t0, 60)


def test_c5_corollary_limits():
    t0 = time.perf_counter()
    gen = np.random.default_rng(55)
    q, _ = np.linalg.qr(gen.standard_normal((50, 5)))
    pr = leverage_profile(build_design(q))
    d0 = float(np.max(np.abs(nsr_estimator_scores(pr, 0).pi - leverage_scores(pr).pi)))
    sq = sqrt_leverage_scores(pr).pi
    d1 = float(np.max(np.abs(nsr_estimator_scores(pr, 1e12).pi / sq - 1)))
    pr2 = leverage_profile(build_design(gen.standard_normal((50, 5)) @ np.diag([1, 3, 0.2, 7, 1])))
    d2 = float(np.max(np.abs(nsr_predictor_scores(pr2, 1e12).pi / sqrt_leverage_scores(pr2).pi - 1)))
    ok = d0 <= 1e-12 and d1 <= 1e-4 and d2 <= 1e-4
    record("C5 NSR limits", ok, f"nsr=0 vs lev {d0:.1e}; nsr=1e12 vs sqrt-lev {d1:.1e} (orthonormal), {d2:.1e} (general)", time.perf_counter() - t0, 1)


def _pooled(a, b, attr):
    return 2 * math.hypot(getattr(a, f"stderr_{attr}"), getattr(b, f"stderr_{attr}"))


def test_c6_full_scale_comparison():
    t0 = time.perf_counter()
    cfg = ExperimentConfig(n=1000, p=20, df=1, sigma_list=[40.0], sample_sizes=[100, 200, 400], families=CORE_FAMILIES, trials=100, seed=0)
    recs = {(r.family, r.m): r for r in run_experiment(cfg)}
    fails = []
    for m in (100, 200, 400):
        for best, attr in (("opt-est", "est"), ("opt-pred", "pred")):
            b = recs[(best, m)]
            for fam in CORE_FAMILIES:
                o = recs[(fam, m)]
                if getattr(b, f"mean_err_{attr}") > getattr(o, f"mean_err_{attr}") + _pooled(b, o, attr):
                    fails.append(f"{best} vs {fam} err_{attr} m={m}")
    for fam in CORE_FAMILIES:
        lo, hi = recs[(fam, 400)], recs[(fam, 100)]
        for attr in ("est", "pred"):
            if getattr(lo, f"mean_err_{attr}") >= getattr(hi, f"mean_err_{attr}") + _pooled(lo, hi, attr):
                fails.append(f"{fam} err_{attr} not decreasing")
    summary = ", ".join(f"{f}:{recs[(f, 200)].mean_err_est:.3f}/{recs[(f, 200)].mean_err_pred:.3f}" for f in CORE_FAMILIES)
    record("C6 full-scale ordering", not fails, f"err_Est/err_Pred at m=200: {summary}" + (f"; failures {fails}" if fails else ""), time.perf_counter() - t0, 300)


def test_c7_bound_dominance(instances):
    t0 = time.perf_counter()
    ok, margin = True, math.inf
    for s in instances:
        ex = exact_mse(s)
        ub = mse_upper_bound(s.X, s.beta0 @ s.beta0, s.sigma2, s.m, s.scores, s.signal @ s.signal)
        ok &= ub.estimator_mse >= ex.estimator_mse - 1e-12 and ub.predictor_mse >= ex.predictor_mse - 1e-12
        margin = min(margin, ub.estimator_mse - ex.estimator_mse, ub.predictor_mse - ex.predictor_mse)
    record("C7 Cauchy-Schwarz bound dominates", ok, f"50 instances, min (bound - exact) = {margin:.2e}", time.perf_counter() - t0, 5)


def test_c8_experiment_determinism(tmp_path):
    t0 = time.perf_counter()
    cfg = {"n": 300, "p": 6, "df": 1, "sigma_list": [0, 10], "sample_sizes": [30, 90], "families": list(CORE_FAMILIES), "trials": 50, "seed": 11}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    outs = []
    for tag in ("a", "b"):
        assert main(["experiment", "--config", str(path), "--out", str(tmp_path / tag)]) == 0
        outs.append({p.name: p.read_bytes() for p in sorted((tmp_path / tag).iterdir())})
    ok = outs[0] == outs[1] and len(outs[0]) == 5
    record("C8 byte-identical experiment outputs", ok, f"{len(outs[0])} files compared", time.perf_counter() - t0, 60)
