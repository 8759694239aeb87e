"""Full least squares, SampleLS and SampleProj fits.

SampleProj zero-fills the unobserved responses, rescales each observed one by
1/(m pi) (accumulating repeated indices) and applies the full pseudo-inverse.
After the one-time factorization of X a fit costs O(p m), which is what makes
it cheap to reuse across many response vectors on the same design.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidEntry, SampledRankDeficient
from .linalg import DesignMatrix, PseudoInverse, rank_tolerance
from .sampling import SampleDraw


@dataclass(frozen=True, eq=False)
class FitResult:
    beta_hat: np.ndarray
    method: str  # "OLS", "SampleLS" or "SampleProj"

    def __post_init__(self):
        if not np.all(np.isfinite(self.beta_hat)):
            raise InvalidEntry(f"{self.method} produced non-finite coefficients")


def _vector(y, name):
    y = np.asarray(y, dtype=float).ravel()
    if not np.all(np.isfinite(y)):
        raise InvalidEntry(f"{name} contains non-finite entries")
    return y


def ols_fit(Xdag: PseudoInverse, y) -> FitResult:
    y = _vector(y, "y")
    if y.size != Xdag.n:
        raise DimensionMismatch(f"y has length {y.size}, expected {Xdag.n}")
    return FitResult(Xdag.entries @ y, "OLS")


def _check_draw(draw: SampleDraw, y_sampled, n):
    y_sampled = _vector(y_sampled, "y_sampled")
    if y_sampled.size != draw.m:
        raise DimensionMismatch(f"{y_sampled.size} sampled responses for {draw.m} draws")
    if draw.indices.max() >= n:
        raise DimensionMismatch(f"draw references row {draw.indices.max()} of an {n}-row design")
    return y_sampled


def zero_fill(draw: SampleDraw, y_sampled, n) -> np.ndarray:
    """Length-n vector z with z_l = sum of weights_i * y_l over draws hitting l."""
    y_sampled = _check_draw(draw, y_sampled, n)
    return np.bincount(draw.indices, weights=draw.weights * y_sampled, minlength=n)


def sample_proj_fit(Xdag: PseudoInverse, draw: SampleDraw, y_sampled) -> FitResult:
    y_sampled = _check_draw(draw, y_sampled, Xdag.n)
    return FitResult(Xdag.entries[:, draw.indices] @ (draw.weights * y_sampled), "SampleProj")


def sample_ls_fit(X: DesignMatrix, draw: SampleDraw, y_sampled) -> FitResult:
    """Weighted least squares on the sampled rows, rows scaled by sqrt(1/(m pi)).

    Raises SampledRankDeficient when the sampled rows do not determine beta.
    """
    y_sampled = _check_draw(draw, y_sampled, X.n)
    d = np.sqrt(draw.weights)
    a = d[:, None] * X.entries[draw.indices]
    b = d * y_sampled
    if a.shape[0] < X.p:
        raise SampledRankDeficient(a.shape[0], X.p)
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    rank = int(np.sum(s > rank_tolerance(s, *a.shape)))
    if rank < X.p:
        raise SampledRankDeficient(rank, X.p)
    return FitResult(vt.T @ ((u.T @ b) / s), "SampleLS")


def multitask_proj_fit(Xdag: PseudoInverse, tasks) -> list[FitResult]:
    """SampleProj for many (draw, y_sampled) pairs sharing one pseudo-inverse."""
    return [sample_proj_fit(Xdag, draw, ys) for draw, ys in tasks]
