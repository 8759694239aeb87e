"""Relative-error sweeps over score families, sample sizes and noise levels.

One design X and one beta0 are generated from the config seed and shared by
every noise level; each trial draws fresh noise and a fresh sample.  Within a
(sigma, m) cell all families see the same trial streams (common random
numbers), which sharpens the comparison between families without biasing any
single one.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, fields

import numpy as np

from . import rng
from .errors import InvalidEntry, SampledRankDeficient
from .estimators import sample_ls_fit
from .linalg import leverage_profile, pseudo_inverse
from .sampling import cumulative, indices_from_uniforms, make_draw
from .scores import FAMILIES, CORE_FAMILIES, compute_scores
from .synth import SynthSpec, gen_instance
from .theory import NOISE_MODELS, NOISE_OFFSET, simulate_proj_trials

CSV_HEADER = ["family", "m", "sigma", "mean_err_est", "stderr_est", "mean_err_pred", "stderr_pred", "trials", "redraws"]
MAX_ATTEMPTS = 100


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 1000
    p: int = 20
    df: int = 1
    sigma_list: tuple = (40.0,)
    sample_sizes: tuple = (100, 200, 400)
    families: tuple = CORE_FAMILIES
    trials: int = 500
    seed: int = 0
    out_dir: str = "results"
    estimator: str = "proj"  # "ls" runs SampleLS instead
    noise: str = "per-row"
    scale_base: float = 2.0
    scale_decay: float = 0.5

    def __post_init__(self):
        for name in ("sigma_list", "sample_sizes", "families"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not self.families:
            raise InvalidEntry("families must be nonempty")
        bad = [f for f in self.families if f not in FAMILIES]
        if bad:
            raise InvalidEntry(f"unknown families {bad}")
        if self.trials < 1:
            raise InvalidEntry("trials must be at least 1")
        if not self.sample_sizes or any(m < 1 or m > self.n for m in self.sample_sizes):
            raise InvalidEntry(f"sample sizes must lie in [1, n={self.n}]")
        if not self.sigma_list or any(s < 0 for s in self.sigma_list):
            raise InvalidEntry("sigma_list must be nonempty and nonnegative")
        if self.estimator not in ("proj", "ls"):
            raise InvalidEntry(f"estimator must be 'proj' or 'ls', got {self.estimator!r}")
        if self.noise not in NOISE_MODELS:
            raise InvalidEntry(f"noise must be one of {NOISE_MODELS}")

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise InvalidEntry(f"unknown config keys {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            try:
                d = json.load(fh)
            except json.JSONDecodeError as e:
                raise InvalidEntry(f"{path}: {e}") from None
        if "out_dir" not in d:
            d["out_dir"] = cls.out_dir
        return cls.from_dict(d)

    def synth_spec(self, sigma) -> SynthSpec:
        return SynthSpec(self.n, self.p, self.df, self.scale_base, self.scale_decay, float(sigma), self.seed)


@dataclass(frozen=True)
class ErrorRecord:
    family: str
    m: int
    sigma: float
    mean_err_est: float
    stderr_est: float
    mean_err_pred: float
    stderr_pred: float
    trials: int
    redraws: int = 0

    @property
    def degenerate(self) -> bool:
        """More than half of the SampleLS draw attempts were rank deficient."""
        return self.redraws > self.trials

    def row(self):
        return [
            self.family, str(self.m), repr(float(self.sigma)),
            repr(self.mean_err_est), repr(self.stderr_est),
            repr(self.mean_err_pred), repr(self.stderr_pred),
            str(self.trials), str(self.redraws),
        ]


@dataclass
class TrialLog:
    err_est: np.ndarray
    err_pred: np.ndarray
    extra: dict = field(default_factory=dict)


def cell_seed(master, sigma_index, m):
    return rng.derive_seed(rng.derive_seed(master, sigma_index + 1), m)


def _mean_stderr(x):
    t = len(x)
    if t == 0:
        return math.nan, math.nan
    mean = math.fsum(x) / t
    if t < 2:
        return mean, 0.0
    return mean, math.sqrt(math.fsum((x - mean) ** 2) / (t - 1) / t)


def _ls_trials(X, beta0, sigma, scores, m, seeds, noise):
    """Per-trial beta_hat - beta0 for SampleLS with redraws; returns (errors, redraws)."""
    cdf = cumulative(scores.pi)
    xb = X.entries @ beta0
    errs, redraws = [], 0
    for s in seeds:
        s = np.uint64(s)
        for k in range(MAX_ATTEMPTS):
            u = rng.to_open_uniform(rng.raw(s, np.arange(k * m, (k + 1) * m, dtype=np.uint64)))
            draw = make_draw(scores, indices_from_uniforms(cdf, u))
            pos = np.arange(m, dtype=np.uint64) if noise == "per-draw" else draw.indices.astype(np.uint64)
            y = xb[draw.indices] + sigma * rng.to_normal(rng.raw(s, NOISE_OFFSET + pos))
            try:
                fit = sample_ls_fit(X, draw, y)
            except SampledRankDeficient:
                redraws += 1
                continue
            errs.append(fit.beta_hat - beta0)
            break
    return np.array(errs).reshape(-1, X.p), redraws


def run_experiment(config: ExperimentConfig, trial_logs: dict | None = None) -> list[ErrorRecord]:
    """Mean relative estimation/prediction error for every (family, sigma, m) cell.

    err_est = ||beta_hat - beta0|| / ||beta0||, err_pred = ||X(beta_hat - beta0)|| / ||X beta0||.
    Pass a dict as ``trial_logs`` to receive the per-trial errors keyed by
    ``(family, m, sigma)``.
    """
    records = []
    for si, sigma in enumerate(config.sigma_list):
        inst = gen_instance(config.synth_spec(sigma))
        X, beta0 = inst.X, inst.beta0
        xdag = pseudo_inverse(X)
        profile = leverage_profile(X, xdag)
        beta_norm = math.sqrt(math.fsum(beta0**2))
        xb_norm = math.sqrt(math.fsum((X.entries @ beta0) ** 2))
        for fam in config.families:
            scores = compute_scores(fam, X, profile, beta0, float(sigma) ** 2)
            for m in config.sample_sizes:
                seeds = rng.derive_seeds(cell_seed(config.seed, si, m), np.arange(config.trials))
                redraws = 0
                if config.estimator == "proj":
                    e = simulate_proj_trials(xdag.entries, X.entries, beta0, float(sigma), scores, m, seeds, config.noise)
                else:
                    e, redraws = _ls_trials(X, beta0, float(sigma), scores, m, seeds, config.noise)
                err_est = np.sqrt(np.sum(e**2, axis=1)) / beta_norm
                err_pred = np.sqrt(np.sum((e @ X.entries.T) ** 2, axis=1)) / xb_norm
                me, se = _mean_stderr(err_est)
                mp, sp = _mean_stderr(err_pred)
                records.append(ErrorRecord(fam, int(m), float(sigma), me, se, mp, sp, len(err_est), redraws))
                if trial_logs is not None:
                    trial_logs[(fam, int(m), float(sigma))] = TrialLog(err_est, err_pred)
    records.sort(key=lambda r: (r.family, r.sigma, r.m))
    return records


def emit_csv(records, path):
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for r in records:
                w.writerow(r.row())
    except OSError as e:
        raise OSError(f"cannot write results to {path}: {e.strerror or e}") from e


def read_csv(path) -> list[ErrorRecord]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise InvalidEntry(f"{path}: unexpected header {header}")
        for row in reader:
            fam, m, sigma, me, se, mp, sp, t, rd = row
            out.append(ErrorRecord(fam, int(m), float(sigma), float(me), float(se), float(mp), float(sp), int(t), int(rd)))
    return out
