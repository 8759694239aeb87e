"""Randomized checks of the closed forms against the independent oracles."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .linalg import build_design
from .scores import from_probabilities, leverage_scores, oracle_estimator_scores, oracle_predictor_scores, sqrt_leverage_scores, uniform_scores
from .theory import ProblemSpec, enumerate_mse, exact_mse, mse_upper_bound

SIGMA2_CHOICES = (0.0, 0.5, 2.0)


def random_instance(gen: np.random.Generator, n_max=5, p_max=2, m_max=3, sigma2_choices=SIGMA2_CHOICES, scores="random"):
    """A small random ProblemSpec: Gaussian X and beta0, Dirichlet scores."""
    while True:
        p = int(gen.integers(1, p_max + 1))
        n = int(gen.integers(p + 1, n_max + 1)) if n_max > p else p
        try:
            X = build_design(gen.standard_normal((n, p)))
            break
        except ValueError:
            continue
    beta0 = gen.standard_normal(p)
    sigma2 = float(gen.choice(sigma2_choices))
    m = int(gen.integers(1, m_max + 1))
    pi = gen.dirichlet(np.ones(n)) if scores == "random" else np.full(n, 1.0 / n)
    return ProblemSpec(X, beta0, sigma2, m, from_probabilities(pi))


@lru_cache(maxsize=None)
def compositions(total: int, parts: int) -> np.ndarray:
    """All nonnegative integer vectors of length ``parts`` summing to ``total``."""
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    blocks = []
    for k in range(total + 1):
        sub = compositions(total - k, parts - 1)
        blocks.append(np.column_stack([np.full(len(sub), k, dtype=np.int64), sub]))
    return np.vstack(blocks)


def grid_min(a, steps: int = 100) -> float:
    """min of sum_l a_l / pi_l over the simplex grid with spacing 1/steps.

    Rows with a_l = 0 get pi_l = 0 (their term vanishes).  Brute force,
    independent of any closed-form optimum.
    """
    a = np.asarray(a, dtype=float)
    active = a[a > 0]
    k = active.size
    if k == 0:
        return 0.0
    best = math.inf
    heads = range(steps + 1) if k > 4 else [None]
    for head in heads:
        if head is None:
            grid = compositions(steps, k).astype(float)
        else:
            tail = compositions(steps - head, k - 1).astype(float)
            grid = np.column_stack([np.full(len(tail), float(head)), tail])
        grid = grid[np.all(grid > 0, axis=1)]
        if len(grid):
            best = min(best, float(np.min((active / (grid / steps)).sum(axis=1))))
    return best


def grid_search_mse(spec: ProblemSpec, which="estimator", steps=100) -> float:
    """Smallest closed-form MSE over grid score vectors (per-draw noise)."""
    diag = spec.profile.g if which == "estimator" else spec.profile.h
    a = (spec.signal**2 + spec.sigma2) * diag / spec.m
    const = (spec.beta0 @ spec.beta0 if which == "estimator" else spec.signal @ spec.signal) / spec.m
    return grid_min(a, steps) - const


@dataclass
class SuiteResult:
    instances: int
    max_mse_deviation: float
    max_bias: float
    max_covariance_deviation: float
    bound_violations: int
    optimality_violations: int

    @property
    def passed(self) -> bool:
        return (
            self.max_mse_deviation <= 1e-10
            and self.max_bias <= 1e-10
            and self.max_covariance_deviation <= 1e-10
            and self.bound_violations == 0
            and self.optimality_violations == 0
        )


def oracle_suite(seed: int, instances: int = 50, noise="per-draw") -> SuiteResult:
    """Closed form vs enumeration, unbiasedness, bound dominance and score optimality.

    Deviations are relative: |a - b| / (1 + |b|).
    """
    gen = np.random.default_rng(seed)
    dev = bias = cov = 0.0
    bound_bad = opt_bad = 0
    for _ in range(instances):
        spec = random_instance(gen)
        ex = exact_mse(spec, noise)
        en = enumerate_mse(spec, noise)
        dev = max(
            dev,
            abs(en.estimator_mse - ex.estimator_mse) / (1 + ex.estimator_mse),
            abs(en.predictor_mse - ex.predictor_mse) / (1 + ex.predictor_mse),
        )
        bias = max(bias, float(np.max(np.abs(en.mean - spec.beta0))))
        cov = max(cov, abs(en.covariance_trace - ex.covariance_trace) / (1 + ex.covariance_trace))
        ub = mse_upper_bound(spec.X, spec.beta0 @ spec.beta0, spec.sigma2, spec.m, spec.scores, spec.signal @ spec.signal, noise)
        slack = 1e-12 * (1 + abs(ex.estimator_mse) + abs(ex.predictor_mse))
        if ub.estimator_mse < ex.estimator_mse - slack or ub.predictor_mse < ex.predictor_mse - slack:
            bound_bad += 1
        opt_bad += optimality_violations(spec)
    return SuiteResult(instances, dev, bias, cov, bound_bad, opt_bad)


def optimality_violations(spec: ProblemSpec, tol=1e-12) -> int:
    """Count baseline families that beat the oracle scores on exact MSE."""
    prof = spec.profile
    est = exact_mse(spec.with_scores(oracle_estimator_scores(spec.X, prof, spec.beta0, spec.sigma2))).estimator_mse
    pred = exact_mse(spec.with_scores(oracle_predictor_scores(spec.X, prof, spec.beta0, spec.sigma2))).predictor_mse
    bad = 0
    for sc in (uniform_scores(spec.X.n), leverage_scores(prof), sqrt_leverage_scores(prof), spec.scores):
        r = exact_mse(spec.with_scores(sc))
        bad += est > r.estimator_mse + tol * (1 + abs(r.estimator_mse))
        bad += pred > r.predictor_mse + tol * (1 + abs(r.predictor_mse))
    return bad
