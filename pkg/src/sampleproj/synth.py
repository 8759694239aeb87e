"""Heavy-tailed synthetic regression instances.

Rows of X are multivariate t: ``x = L z / sqrt(u / df)`` with ``L L^T`` the
scale matrix, ``z`` standard normal and ``u`` chi-squared with ``df`` degrees
of freedom (a sum of ``df`` squared normals).  With df = 1 the covariance
does not exist and the matrix is only a scale parameter.

Stream layout for one generation attempt (seed ``s``; attempt k > 0 uses
``derive_seed(s, k)``):

    [0, n*p)                     z, row-major
    [n*p, n*p + n*df)            normals squared and summed into u, row-major
    next p                       beta0 ~ U[0, 1)
    next n                       standard normals scaled by sigma into epsilon

X and beta0 therefore do not depend on sigma: changing only sigma keeps the
same design and coefficients.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass

import numpy as np

from . import rng
from .errors import GenerationFailed, InvalidEntry, RankDeficient
from .csvio import read_matrix_csv, write_matrix_csv, write_vector_csv
from .linalg import DesignMatrix, build_design

MAX_RETRIES = 10


@dataclass(frozen=True)
class SynthSpec:
    n: int = 1000
    p: int = 20
    df: int = 1
    scale_base: float = 2.0
    scale_decay: float = 0.5
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not (self.n >= self.p >= 1):
            raise InvalidEntry(f"need n >= p >= 1, got n={self.n}, p={self.p}")
        if int(self.df) != self.df or self.df < 1:
            raise InvalidEntry("df must be a positive integer")
        if not self.sigma >= 0:
            raise InvalidEntry("sigma must be nonnegative")


@dataclass(frozen=True, eq=False)
class SynthInstance:
    spec: SynthSpec
    X: DesignMatrix
    beta0: np.ndarray
    y: np.ndarray
    epsilon: np.ndarray
    nsr: float
    noise_energy_ratio: float
    retries: int = 0

    @property
    def diagnostics(self):
        return self.nsr, self.noise_energy_ratio


def scale_matrix(p: int, base: float = 2.0, decay: float = 0.5) -> np.ndarray:
    """Sigma_ij = base * decay**|i - j|; raises InvalidEntry unless positive definite."""
    if p < 1:
        raise InvalidEntry("p must be at least 1")
    i = np.arange(p)
    s = base * float(decay) ** np.abs(i[:, None] - i[None, :])
    try:
        np.linalg.cholesky(s)
    except np.linalg.LinAlgError:
        raise InvalidEntry(f"scale matrix with base={base}, decay={decay} is not positive definite") from None
    return s


def diagnostics(beta0, y, epsilon, sigma):
    """(nsr, noise_energy_ratio) = (sigma^2/||beta0||^2, ||eps||^2/||y||^2)."""
    nsr = sigma**2 / math.fsum(np.asarray(beta0) ** 2)
    yy = math.fsum(np.asarray(y) ** 2)
    ratio = math.fsum(np.asarray(epsilon) ** 2) / yy if yy > 0 else 0.0
    return nsr, ratio


def _attempt(spec, seed, chol):
    n, p, df = spec.n, spec.p, int(spec.df)
    stream = rng.Stream(seed)
    z = stream.normal(n * p).reshape(n, p)
    u = np.sum(stream.normal(n * df).reshape(n, df) ** 2, axis=1)
    beta0 = stream.uniform(p)
    eps = spec.sigma * stream.normal(n)
    x = (z @ chol.T) / np.sqrt(u / df)[:, None]
    return x, beta0, eps


def gen_instance(spec: SynthSpec) -> SynthInstance:
    chol = np.linalg.cholesky(scale_matrix(spec.p, spec.scale_base, spec.scale_decay))
    for k in range(MAX_RETRIES + 1):
        seed = spec.seed if k == 0 else rng.derive_seed(spec.seed, k)
        x, beta0, eps = _attempt(spec, seed, chol)
        try:
            X = build_design(x)
        except (RankDeficient, InvalidEntry):
            continue
        return _assemble(spec, X, beta0, eps, k)
    raise GenerationFailed(f"no full-rank design after {MAX_RETRIES} retries")


def _assemble(spec, X, beta0, eps, retries):
    y = X.entries @ beta0 + eps
    nsr, ratio = diagnostics(beta0, y, eps, spec.sigma)
    for a in (beta0, y, eps):
        a.flags.writeable = False
    return SynthInstance(spec, X, beta0, y, eps, nsr, ratio, retries)


def write_instance(inst: SynthInstance, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    write_matrix_csv(os.path.join(out_dir, "X.csv"), inst.X.entries)
    write_vector_csv(os.path.join(out_dir, "beta0.csv"), inst.beta0)
    write_vector_csv(os.path.join(out_dir, "y.csv"), inst.y)
    write_vector_csv(os.path.join(out_dir, "epsilon.csv"), inst.epsilon)
    meta = dict(asdict(inst.spec), nsr=inst.nsr, noise_energy_ratio=inst.noise_energy_ratio, retries=inst.retries)
    with open(os.path.join(out_dir, "meta.json"), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_instance(in_dir) -> SynthInstance:
    with open(os.path.join(in_dir, "meta.json")) as fh:
        meta = json.load(fh)
    spec = SynthSpec(**{k: meta[k] for k in SynthSpec.__dataclass_fields__})
    X = build_design(read_matrix_csv(os.path.join(in_dir, "X.csv")))
    beta0 = read_matrix_csv(os.path.join(in_dir, "beta0.csv")).ravel()
    eps = read_matrix_csv(os.path.join(in_dir, "epsilon.csv")).ravel()
    return _assemble(spec, X, beta0, eps, meta.get("retries", 0))
