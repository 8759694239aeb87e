"""Design matrix validation, pseudo-inverse and leverage diagonals.

Everything is derived from one thin SVD of ``X`` computed at construction.
The n x n hat matrix is never formed; only its diagonal and the two other
row-wise diagonals used by the score formulas are returned.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidEntry, RankDeficient


def _frozen(a):
    a = np.array(a, dtype=float, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """An n x p (n >= p) full-column-rank data matrix with its cached thin SVD."""

    entries: np.ndarray
    u: np.ndarray
    s: np.ndarray
    vt: np.ndarray
    rank: int

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def p(self) -> int:
        return self.entries.shape[1]

    def __repr__(self):
        return f"DesignMatrix(n={self.n}, p={self.p}, rank={self.rank})"


@dataclass(frozen=True, eq=False)
class PseudoInverse:
    """The p x n matrix ``X^+ = (X^T X)^{-1} X^T``."""

    entries: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    @property
    def p(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class LeverageProfile:
    """Row-wise diagonals of three n x n matrices built from X.

    h: diag(X X^+), the leverage scores.
    g: diag(X (X^T X)^{-2} X^T), the column sums of squares of X^+.
    r: diag(X X^T), the squared row norms.
    """

    h: np.ndarray
    g: np.ndarray
    r: np.ndarray

    @property
    def n(self) -> int:
        return self.h.shape[0]

    @property
    def informative(self) -> np.ndarray:
        """Boolean mask of rows that are not identically zero."""
        return self.r > 0


def rank_tolerance(s, n, p):
    smax = s[0] if len(s) else 0.0
    return max(n, p) * np.finfo(float).eps * smax


def build_design(entries) -> DesignMatrix:
    """Validate ``entries`` and factorize it.

    Raises InvalidEntry for non-finite values or a bad shape and
    RankDeficient when the numerical rank is below p.
    """
    a = np.asarray(entries, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise InvalidEntry(f"expected a 2-d matrix, got shape {a.shape}")
    n, p = a.shape
    if p < 1 or n < p:
        raise InvalidEntry(f"need n >= p >= 1, got n={n}, p={p}")
    if not np.all(np.isfinite(a)):
        raise InvalidEntry("matrix contains non-finite entries")
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    rank = int(np.sum(s > rank_tolerance(s, n, p)))
    if rank < p:
        raise RankDeficient(rank, p)
    # zero rows of X must give exactly zero rows of U
    u[~np.any(a != 0, axis=1)] = 0.0
    return DesignMatrix(_frozen(a), _frozen(u), _frozen(s), _frozen(vt), rank)


def from_row_major(values, n, p) -> DesignMatrix:
    values = np.asarray(values, dtype=float).ravel()
    if values.size != n * p:
        raise DimensionMismatch(f"{values.size} values cannot fill a {n}x{p} matrix")
    return build_design(values.reshape(n, p))


def pseudo_inverse(X: DesignMatrix) -> PseudoInverse:
    """X^+ = V diag(1/s) U^T from the cached SVD."""
    return PseudoInverse(_frozen((X.vt.T / X.s) @ X.u.T))


def leverage_profile(X: DesignMatrix, Xdag: PseudoInverse | None = None) -> LeverageProfile:
    if Xdag is None:
        Xdag = pseudo_inverse(X)
    h = np.sum(X.u**2, axis=1)
    g = np.sum(Xdag.entries**2, axis=0)
    r = np.sum(X.entries**2, axis=1)
    return LeverageProfile(_frozen(h), _frozen(g), _frozen(r))
