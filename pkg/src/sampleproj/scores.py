"""Sampling-score families and their normalization into distributions."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateScores, DimensionMismatch, InvalidScores
from .linalg import DesignMatrix, LeverageProfile

FAMILIES = ("uniform", "lev", "sqrt-lev", "opt-est", "opt-pred", "nsr-est", "nsr-pred")
CORE_FAMILIES = FAMILIES[:5]
CUSTOM = "custom"

LABELS = {
    "uniform": "Uniform",
    "lev": "Lev",
    "sqrt-lev": "sql-Lev",
    "opt-est": "opt-Est",
    "opt-pred": "opt-Pred",
    "nsr-est": "nsr-Est",
    "nsr-pred": "nsr-Pred",
    CUSTOM: "custom",
}

# relative to the total raw weight
FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class SamplingScores:
    pi: np.ndarray
    family: str
    nsr: float | None = None

    def __post_init__(self):
        pi = np.array(self.pi, dtype=float, copy=True)
        if pi.ndim != 1 or pi.size == 0:
            raise InvalidScores("scores must be a nonempty vector")
        if not np.all(np.isfinite(pi)) or np.any(pi < 0):
            raise InvalidScores("scores must be finite and nonnegative")
        if abs(math.fsum(pi) - 1.0) > 1e-12:
            raise InvalidScores(f"scores sum to {math.fsum(pi)!r}, not 1")
        pi.flags.writeable = False
        object.__setattr__(self, "pi", pi)

    @property
    def n(self) -> int:
        return self.pi.size

    def check_support(self, profile: LeverageProfile):
        """Raise InvalidScores if an informative row has zero probability."""
        if profile.n != self.n:
            raise DimensionMismatch(f"scores have length {self.n}, design has {profile.n} rows")
        bad = np.flatnonzero(profile.informative & (self.pi <= 0))
        if bad.size:
            raise InvalidScores(f"rows {bad.tolist()} are informative but have zero probability")


def from_probabilities(pi, family=CUSTOM, nsr=None) -> SamplingScores:
    """Wrap a user-supplied distribution, renormalizing away rounding drift."""
    pi = np.asarray(pi, dtype=float)
    total = math.fsum(pi)
    if not np.isfinite(total) or abs(total - 1.0) > 1e-9:
        raise InvalidScores(f"probabilities sum to {total!r}")
    return SamplingScores(pi / total, family, nsr)


def _normalize(raw, profile, family, nsr=None):
    raw = np.asarray(raw, dtype=float)
    informative = profile.informative
    total = math.fsum(raw[informative])
    if not total > 0 or not np.isfinite(total):
        raise DegenerateScores(f"{family}: all sampling weights are zero")
    # informative rows with zero weight would break unbiasedness
    raw = np.where(informative, np.maximum(raw, FLOOR * total / raw.size), 0.0)
    return SamplingScores(raw / math.fsum(raw), family, nsr)


def uniform_scores(n: int) -> SamplingScores:
    if n < 1:
        raise InvalidScores("n must be at least 1")
    return SamplingScores(np.full(n, 1.0 / n), "uniform")


def leverage_scores(profile: LeverageProfile) -> SamplingScores:
    return _normalize(profile.h, profile, "lev")


def sqrt_leverage_scores(profile: LeverageProfile) -> SamplingScores:
    return _normalize(np.sqrt(profile.h), profile, "sqrt-lev")


def _signal_weights(X, beta0, sigma2):
    beta0 = np.asarray(beta0, dtype=float).ravel()
    if beta0.size != X.p:
        raise DimensionMismatch(f"beta0 has length {beta0.size}, expected {X.p}")
    if sigma2 < 0:
        raise InvalidScores("sigma2 must be nonnegative")
    return (X.entries @ beta0) ** 2 + sigma2


def oracle_estimator_scores(X: DesignMatrix, profile: LeverageProfile, beta0, sigma2: float) -> SamplingScores:
    """pi_l proportional to sqrt(g_l ((X beta0)_l^2 + sigma2)); needs the true beta0."""
    return _normalize(np.sqrt(profile.g * _signal_weights(X, beta0, sigma2)), profile, "opt-est")


def oracle_predictor_scores(X: DesignMatrix, profile: LeverageProfile, beta0, sigma2: float) -> SamplingScores:
    return _normalize(np.sqrt(profile.h * _signal_weights(X, beta0, sigma2)), profile, "opt-pred")


def nsr_estimator_scores(profile: LeverageProfile, nsr: float) -> SamplingScores:
    """pi_l proportional to sqrt(g_l (r_l + nsr)), with nsr = sigma^2 / ||beta0||^2."""
    if nsr < 0:
        raise InvalidScores("nsr must be nonnegative")
    return _normalize(np.sqrt(profile.g * (profile.r + nsr)), profile, "nsr-est", float(nsr))


def nsr_predictor_scores(profile: LeverageProfile, nsr: float) -> SamplingScores:
    if nsr < 0:
        raise InvalidScores("nsr must be nonnegative")
    return _normalize(np.sqrt(profile.h * (profile.r + nsr)), profile, "nsr-pred", float(nsr))


def noise_to_signal(sigma2, beta0) -> float:
    return float(sigma2) / float(np.dot(beta0, beta0))


def compute_scores(family, X, profile, beta0=None, sigma2=None, nsr=None) -> SamplingScores:
    """Dispatch on a family name.

    Oracle families need ``beta0`` and ``sigma2``.  NSR families use ``nsr``
    if given, otherwise the true ratio ``sigma2 / ||beta0||^2``.
    """
    if family == "uniform":
        return uniform_scores(X.n)
    if family == "lev":
        return leverage_scores(profile)
    if family == "sqrt-lev":
        return sqrt_leverage_scores(profile)
    if family in ("opt-est", "opt-pred"):
        if beta0 is None or sigma2 is None:
            raise InvalidScores(f"{family} needs beta0 and sigma2")
        fn = oracle_estimator_scores if family == "opt-est" else oracle_predictor_scores
        return fn(X, profile, beta0, sigma2)
    if family in ("nsr-est", "nsr-pred"):
        if nsr is None:
            if beta0 is None or sigma2 is None:
                raise InvalidScores(f"{family} needs nsr, or beta0 and sigma2")
            nsr = noise_to_signal(sigma2, beta0)
        fn = nsr_estimator_scores if family == "nsr-est" else nsr_predictor_scores
        return fn(profile, nsr)
    raise InvalidScores(f"unknown score family {family!r}; expected one of {', '.join(FAMILIES)}")
