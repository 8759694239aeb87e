"""Closed-form MSE of SampleProj, its Cauchy-Schwarz bound, and two oracles.

Two noise models are supported:

``"per-draw"``
    every one of the m draws observes its row with an independent noise
    realization.  The classical closed form is exact under this model.
``"per-row"``
    a single noisy response vector y is generated and then sampled, so a row
    drawn twice contributes the same noise twice.  The MSE picks up the
    score-independent term ``(m-1)/m * sigma2 * Tr((X^T X)^{-1})`` for the
    estimator and ``(m-1)/m * sigma2 * p`` for the predictor; the optimal
    scores do not change.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import rng
from .errors import DimensionMismatch, InvalidScores
from .linalg import DesignMatrix, leverage_profile, pseudo_inverse
from .sampling import ENUMERATION_CAP, all_draws, cumulative, indices_from_uniforms
from .scores import SamplingScores

NOISE_MODELS = ("per-draw", "per-row")
# stream position where noise variates start; index uniforms use 0 .. m-1
NOISE_OFFSET = 1 << 40


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    X: DesignMatrix
    beta0: np.ndarray
    sigma2: float
    m: int
    scores: SamplingScores

    def __post_init__(self):
        beta0 = np.array(self.beta0, dtype=float).ravel()
        if beta0.size != self.X.p:
            raise DimensionMismatch(f"beta0 has length {beta0.size}, expected {self.X.p}")
        if self.scores.n != self.X.n:
            raise DimensionMismatch(f"scores have length {self.scores.n}, expected {self.X.n}")
        if not self.sigma2 >= 0:
            raise InvalidScores("sigma2 must be nonnegative")
        if self.m < 1:
            raise ValueError("m must be at least 1")
        beta0.flags.writeable = False
        object.__setattr__(self, "beta0", beta0)
        object.__setattr__(self, "sigma2", float(self.sigma2))
        object.__setattr__(self, "m", int(self.m))

    @cached_property
    def xdag(self):
        return pseudo_inverse(self.X)

    @cached_property
    def profile(self):
        return leverage_profile(self.X, self.xdag)

    @cached_property
    def signal(self) -> np.ndarray:
        return self.X.entries @ self.beta0

    def with_scores(self, scores):
        return ProblemSpec(self.X, self.beta0, self.sigma2, self.m, scores)


@dataclass(frozen=True)
class MseReport:
    """MSE of the estimator and of the predictor X beta_hat.

    For closed forms ``*_mse == *_trace - *_correction``.  ``mean`` is the
    enumerated or simulated E[beta_hat] where available.
    """

    estimator_mse: float
    predictor_mse: float
    method: str  # ClosedForm, UpperBound, Enumeration, MonteCarlo
    estimator_trace: float | None = None
    estimator_correction: float | None = None
    predictor_trace: float | None = None
    predictor_correction: float | None = None
    estimator_stderr: float | None = None
    predictor_stderr: float | None = None
    covariance_trace: float | None = None
    mean: np.ndarray | None = field(default=None, compare=False)
    mean_stderr: np.ndarray | None = field(default=None, compare=False)
    noise: str = "per-draw"

    def csv_row(self, family, m, sigma2):
        """Row for the ``family,method,m,sigma2,estimator_mse,predictor_mse,stderr`` layout."""
        stderr = "" if self.estimator_stderr is None else repr(self.estimator_stderr)
        return [family, self.method, m, repr(float(sigma2)), repr(self.estimator_mse), repr(self.predictor_mse), stderr]


MSE_CSV_HEADER = ["family", "method", "m", "sigma2", "estimator_mse", "predictor_mse", "stderr"]


def _check_noise(noise):
    if noise not in NOISE_MODELS:
        raise ValueError(f"noise must be one of {NOISE_MODELS}, got {noise!r}")


def _row_weights(numer, scores, profile, m):
    """numer_l / (m pi_l) on informative rows, 0 elsewhere."""
    scores.check_support(profile)
    informative = profile.informative
    w = np.zeros(scores.n)
    w[informative] = numer[informative] / (m * scores.pi[informative])
    return w


def _repeat_terms(spec, noise):
    if noise == "per-draw":
        return 0.0, 0.0
    frac = (spec.m - 1) / spec.m
    return frac * spec.sigma2 * math.fsum(spec.profile.g), frac * spec.sigma2 * math.fsum(spec.profile.h)


def exact_mse(spec: ProblemSpec, noise: str = "per-draw") -> MseReport:
    """Closed-form MSE: Tr(X^+ W X^+T) - ||beta0||^2/m and Tr(H W) - ||X beta0||^2/m.

    W is diagonal with ((X beta0)_l^2 + sigma2) / (m pi_l).  Only diagonals
    are used.  Raises InvalidScores if an informative row has pi_l = 0.
    """
    _check_noise(noise)
    w = _row_weights(spec.signal**2 + spec.sigma2, spec.scores, spec.profile, spec.m)
    extra_est, extra_pred = _repeat_terms(spec, noise)
    est_trace = math.fsum(w * spec.profile.g) + extra_est
    pred_trace = math.fsum(w * spec.profile.h) + extra_pred
    est_corr = math.fsum(spec.beta0**2) / spec.m
    pred_corr = math.fsum(spec.signal**2) / spec.m
    return MseReport(
        estimator_mse=est_trace - est_corr,
        predictor_mse=pred_trace - pred_corr,
        method="ClosedForm",
        estimator_trace=est_trace,
        estimator_correction=est_corr,
        predictor_trace=pred_trace,
        predictor_correction=pred_corr,
        covariance_trace=est_trace - est_corr,
        noise=noise,
    )


def mse_upper_bound(
    X: DesignMatrix,
    beta_norm2: float,
    sigma2: float,
    m: int,
    scores: SamplingScores,
    xbeta_norm2: float | None = None,
    noise: str = "per-draw",
) -> MseReport:
    """Bound obtained by replacing (X beta0)_l^2 with ||x_l||^2 ||beta0||^2.

    Without ``xbeta_norm2`` the predictor correction is unknown and the
    predictor value is the trace term alone (a looser bound).
    """
    _check_noise(noise)
    beta_norm2, sigma2 = float(beta_norm2), float(sigma2)
    profile = leverage_profile(X)
    w = _row_weights(profile.r * beta_norm2 + sigma2, scores, profile, m)
    frac = (m - 1) / m if noise == "per-row" else 0.0
    est_trace = math.fsum(w * profile.g) + frac * sigma2 * math.fsum(profile.g)
    pred_trace = math.fsum(w * profile.h) + frac * sigma2 * math.fsum(profile.h)
    est_corr = beta_norm2 / m
    pred_corr = 0.0 if xbeta_norm2 is None else float(xbeta_norm2) / m
    return MseReport(
        estimator_mse=est_trace - est_corr,
        predictor_mse=pred_trace - pred_corr,
        method="UpperBound",
        estimator_trace=est_trace,
        estimator_correction=est_corr,
        predictor_trace=pred_trace,
        predictor_correction=pred_corr,
        noise=noise,
    )


def enumerate_mse(spec: ProblemSpec, noise: str = "per-draw", cap: int = ENUMERATION_CAP) -> MseReport:
    """Exact expectation over all n**m ordered draws.

    The sampling part is enumerated; the noise is integrated analytically
    through its second moment, so the result is exact up to rounding.
    """
    _check_noise(noise)
    spec.scores.check_support(spec.profile)
    X, xdag = spec.X.entries, spec.xdag.entries
    beta0, xb, s2 = spec.beta0, spec.signal, spec.sigma2
    n, p = X.shape
    probs, means, est_terms, pred_terms, noise_terms = [], [], [], [], []
    for draw, prob in all_draws(spec.scores, spec.m, cap):
        if prob == 0.0:
            continue
        cols = xdag[:, draw.indices] * draw.weights  # beta_hat = cols @ y_sampled
        b = cols @ xb[draw.indices]
        if noise == "per-draw":
            a = cols
        else:
            a = np.zeros((p, n))
            np.add.at(a.T, draw.indices, cols.T)
        xa = X @ a
        err = b - beta0
        perr = X @ err
        probs.append(prob)
        means.append(b)
        noise_terms.append(s2 * math.fsum(a.ravel() ** 2))
        est_terms.append(math.fsum(err**2) + noise_terms[-1])
        pred_terms.append(math.fsum(perr**2) + s2 * math.fsum(xa.ravel() ** 2))
    probs = np.array(probs)
    means = np.array(means)
    mean = np.array([math.fsum(probs * means[:, i]) for i in range(p)])
    est = math.fsum(probs * np.array(est_terms))
    pred = math.fsum(probs * np.array(pred_terms))
    # E||beta_hat - E beta_hat||^2, computed without assuming unbiasedness
    cov_trace = math.fsum(probs * np.sum((means - mean) ** 2, axis=1)) + math.fsum(probs * np.array(noise_terms))
    return MseReport(
        estimator_mse=est,
        predictor_mse=pred,
        method="Enumeration",
        covariance_trace=cov_trace,
        mean=mean,
        noise=noise,
    )


def _mean_and_stderr(values):
    t = len(values)
    mean = math.fsum(values) / t
    var = math.fsum((values - mean) ** 2) / (t - 1)
    return mean, math.sqrt(var / t)


def simulate_proj_trials(xdag, X, beta0, sigma, scores, m, seeds, noise="per-draw"):
    """beta_hat - beta0 for one SampleProj trial per seed, shape (trials, p).

    Trial t uses stream ``seeds[t]``: positions 0..m-1 choose the indices, and
    noise is read at ``NOISE_OFFSET + j`` (draw j) or ``NOISE_OFFSET + l``
    (row l) depending on the noise model.
    """
    seeds = np.asarray(seeds, dtype=np.uint64)[:, None]
    u = rng.to_open_uniform(rng.raw(seeds, np.arange(m, dtype=np.uint64)[None, :]))
    idx = indices_from_uniforms(cumulative(scores.pi), u)
    w = 1.0 / (m * scores.pi[idx])
    y = (X @ beta0)[idx]
    if sigma > 0:
        if noise == "per-draw":
            pos = NOISE_OFFSET + np.arange(m, dtype=np.uint64)[None, :]
        else:
            pos = NOISE_OFFSET + idx.astype(np.uint64)
        y = y + sigma * rng.to_normal(rng.raw(seeds, pos))
    beta_hat = np.einsum("pbm,bm->bp", xdag[:, idx], w * y)
    return beta_hat - beta0


def monte_carlo_mse(
    spec: ProblemSpec,
    trials: int,
    master_seed: int,
    noise: str = "per-draw",
    chunk: int = 32768,
) -> MseReport:
    """Empirical MSE over independent trials with fresh draws and fresh noise.

    Trial t uses the stream ``master_seed ^ mix64(t)``, so results do not
    depend on ``chunk`` or on the order trials are evaluated.
    """
    _check_noise(noise)
    if trials < 2:
        raise ValueError("monte_carlo_mse needs at least 2 trials")
    spec.scores.check_support(spec.profile)
    xdag, X = spec.xdag.entries, spec.X.entries
    gram = X.T @ X
    sigma = math.sqrt(spec.sigma2)
    est, pred, errs = [], [], []
    for start in range(0, trials, chunk):
        seeds = rng.derive_seeds(master_seed, np.arange(start, min(start + chunk, trials)))
        e = simulate_proj_trials(xdag, X, spec.beta0, sigma, spec.scores, spec.m, seeds, noise)
        errs.append(e)
        est.append(np.sum(e**2, axis=1))
        pred.append(np.einsum("bp,pq,bq->b", e, gram, e))
    errs = np.concatenate(errs)
    est_mean, est_se = _mean_and_stderr(np.concatenate(est))
    pred_mean, pred_se = _mean_and_stderr(np.concatenate(pred))
    stats = [_mean_and_stderr(errs[:, i]) for i in range(errs.shape[1])]
    return MseReport(
        estimator_mse=est_mean,
        predictor_mse=pred_mean,
        method="MonteCarlo",
        estimator_stderr=est_se,
        predictor_stderr=pred_se,
        mean=spec.beta0 + np.array([s[0] for s in stats]),
        mean_stderr=np.array([s[1] for s in stats]),
        noise=noise,
    )


@dataclass(frozen=True)
class GapRow:
    family: str
    estimator_mse: float
    predictor_mse: float


def optimal_gap(X, beta0, sigma2, m, families=None, nsr=None, noise="per-draw", rtol=1e-12):
    """Exact MSE for each score family on one instance.

    Raises OptimalityViolated if opt-est (opt-pred) is beaten on estimator
    (predictor) MSE by any other evaluated family beyond ``rtol``.
    """
    from .errors import OptimalityViolated
    from .scores import FAMILIES, compute_scores

    families = list(families or FAMILIES)
    base = ProblemSpec(X, beta0, sigma2, m, compute_scores("uniform", X, None))
    rows = []
    for fam in families:
        sc = compute_scores(fam, X, base.profile, base.beta0, sigma2, nsr)
        rep = exact_mse(base.with_scores(sc), noise)
        rows.append(GapRow(fam, rep.estimator_mse, rep.predictor_mse))
    by = {r.family: r for r in rows}
    for fam, attr in (("opt-est", "estimator_mse"), ("opt-pred", "predictor_mse")):
        if fam not in by:
            continue
        best = getattr(by[fam], attr)
        for r in rows:
            other = getattr(r, attr)
            if best > other + rtol * (1 + abs(other)):
                raise OptimalityViolated(f"{fam} {attr}={best!r} beaten by {r.family} ({other!r})")
    return rows
