"""Drawing row indices with replacement and the 1/(m pi) reweighting."""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import EnumerationTooLarge, InvalidScores
from .scores import SamplingScores

ENUMERATION_CAP = 10**6


@dataclass(frozen=True, eq=False)
class SampleDraw:
    """Ordered indices drawn with replacement and their weights 1/(m pi)."""

    indices: np.ndarray
    weights: np.ndarray
    source_family: str

    @property
    def m(self) -> int:
        return self.indices.size

    def __eq__(self, other):
        if not isinstance(other, SampleDraw):
            return NotImplemented
        return (
            self.source_family == other.source_family
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = None


def make_draw(scores: SamplingScores, indices) -> SampleDraw:
    indices = np.array(indices, dtype=np.int64).ravel()
    if indices.size == 0:
        raise InvalidScores("a draw needs at least one index")
    if indices.min() < 0 or indices.max() >= scores.n:
        raise InvalidScores(f"indices must lie in [0, {scores.n})")
    with np.errstate(divide="ignore"):
        weights = 1.0 / (indices.size * scores.pi[indices])
    indices.flags.writeable = False
    weights.flags.writeable = False
    return SampleDraw(indices, weights, scores.family)


def cumulative(pi) -> np.ndarray:
    """Cumulative array with the tail after the last positive entry pinned to 1."""
    cdf = np.cumsum(pi)
    last = np.flatnonzero(pi > 0)[-1]
    cdf[last:] = 1.0
    return cdf


def indices_from_uniforms(cdf, u) -> np.ndarray:
    """Inverse CDF: first index whose cumulative probability is >= u."""
    return np.searchsorted(cdf, u, side="left")


def draw_with_replacement(scores: SamplingScores, m: int, seed: int, offset: int = 0) -> SampleDraw:
    """Draw ``m`` i.i.d. indices from ``scores.pi``.

    Uses positions ``offset .. offset+m-1`` of the stream ``seed``.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    u = rng.to_open_uniform(rng.raw(np.uint64(int(seed) & rng.MASK), np.arange(offset, offset + m, dtype=np.uint64)))
    return make_draw(scores, indices_from_uniforms(cumulative(scores.pi), u))


def all_draws(scores: SamplingScores, m: int, cap: int = ENUMERATION_CAP):
    """Yield every ordered index sequence of length ``m`` with its probability.

    Sequences touching zero-probability rows are included with probability 0
    (their weights are infinite).
    """
    n = scores.n
    if n**m > cap:
        raise EnumerationTooLarge(f"{n}**{m} = {n**m} sequences exceeds the cap of {cap}")
    pi = scores.pi
    for seq in itertools.product(range(n), repeat=m):
        prob = math.prod(float(pi[i]) for i in seq)
        yield make_draw(scores, seq), prob


def write_draws_csv(draws, path):
    """Write ``(trial, position, index, weight)`` rows for a sequence of draws."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial", "position", "index", "weight"])
        for t, d in enumerate(draws):
            for i, (idx, wt) in enumerate(zip(d.indices, d.weights)):
                w.writerow([t, i, int(idx), repr(float(wt))])


def read_draws_csv(path, scores: SamplingScores):
    rows = {}
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.setdefault(int(rec["trial"]), []).append((int(rec["position"]), int(rec["index"])))
    return [make_draw(scores, [i for _, i in sorted(rows[t])]) for t in sorted(rows)]
