"""Simulated regression designs and the replication harness.

Every replication draws its own design matrix and response from a stream
derived from ``(scenario.seed, replication index)``; chains get further
sub-streams per prior, so a study is reproducible cell by cell regardless of
execution order.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from .diagnostics import iact_initial_monotone, mean_defined, misclassification_rate
from .model import Dataset, McmcConfig, load_dataset
from .samplers import make_rng, run_mcmc

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Scenario:
    """A data-generating design.

    ``effects`` lists the true coefficients in column order; ``rho = 0``
    gives independent regressors, otherwise ``C_jk = rho**|j-k|``.  ``focus``
    holds the 0-based columns over which misclassification and efficiency
    are averaged (default: every column whose effect is smaller in magnitude
    than the largest one).
    """

    N: int
    effects: tuple
    mu_true: float = 1.0
    sigma2_true: float = 1.0
    rho: float = 0.0
    replications: int = 100
    seed: int = 0
    focus: Optional[tuple] = None
    name: str = "custom"

    def __post_init__(self):
        if not 0 <= self.rho < 1:
            raise ValueError("rho must lie in [0, 1)")
        if self.replications < 0:
            raise ValueError("replications must be non-negative")
        object.__setattr__(self, "effects", tuple(float(a) for a in self.effects))
        if self.focus is None:
            mags = np.abs(self.effects)
            object.__setattr__(self, "focus",
                               tuple(int(j) for j in np.flatnonzero(mags < mags.max())))

    @property
    def d(self) -> int:
        return len(self.effects)

    def covariance(self) -> np.ndarray:
        lags = np.abs(np.subtract.outer(np.arange(self.d), np.arange(self.d)))
        return self.rho ** lags.astype(float)


def independent_scenario(replications=100, seed=0) -> Scenario:
    """Nine independent N(0, 1) regressors: three effects each of 2, 0.2 and 0."""
    return Scenario(N=40, effects=(2, 2, 2, 0.2, 0.2, 0.2, 0, 0, 0), rho=0.0,
                    replications=replications, seed=seed, name="independent")


def correlated_scenario(replications=100, seed=0) -> Scenario:
    """Nine regressors with C_jk = 0.8**|j-k|.

    Strong effects sit in columns 1, 2, 4, weak effects in 5, 8, 9 and zero
    effects in 3, 6, 7 (1-based).
    """
    effects = (2, 2, 0, 2, 0.2, 0, 0, 0.2, 0.2)
    return Scenario(N=40, effects=effects, rho=0.8, replications=replications,
                    seed=seed, name="correlated")


def signal_sweep_scenario(replications=100, seed=0) -> Scenario:
    """N = 200 with 21 independent regressors and effects 0, 0.02, ..., 0.4."""
    effects = tuple(round(0.02 * k, 2) for k in range(21))
    return Scenario(N=200, effects=effects, rho=0.0, replications=replications,
                    seed=seed, focus=tuple(range(21)), name="signal-sweep")


def generate_dataset(scenario: Scenario, replication_index: int) -> tuple[Dataset, np.ndarray]:
    """Draw (Dataset, true effects) for one replication."""
    rng = make_rng(scenario.seed, (replication_index, 0))
    Z = rng.standard_normal((scenario.N, scenario.d))
    if scenario.rho > 0:
        Z = Z @ np.linalg.cholesky(scenario.covariance()).T
    alpha = np.asarray(scenario.effects)
    eps = math.sqrt(scenario.sigma2_true) * rng.standard_normal(scenario.N)
    y = scenario.mu_true + Z @ alpha + eps
    return load_dataset(y, Z), alpha


@dataclass
class PriorSummary:
    """Per-prior aggregates over the successful replications."""

    name: str
    p_hat: np.ndarray                 # replications x d, NaN rows for failures
    iact: list                        # per replication, list of per-regressor tau or None
    ess_per_sec: list
    wall_time: np.ndarray
    misclassification: np.ndarray
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> np.ndarray:
        return ~np.isnan(self.p_hat).any(axis=1)

    def inclusion_counts(self) -> np.ndarray:
        return (self.p_hat[self.ok] > 0.5).sum(axis=0)

    def mean_inclusion(self) -> np.ndarray:
        if not self.ok.any():
            return np.full(self.p_hat.shape[1], np.nan)
        return self.p_hat[self.ok].mean(axis=0)

    def averaged_iact(self, columns) -> tuple[Optional[float], int]:
        vals = [row[j] for row in self.iact if row is not None for j in columns]
        return mean_defined(vals)

    def averaged_ess_per_sec(self, columns) -> tuple[Optional[float], int]:
        vals = [row[j] for row in self.ess_per_sec if row is not None for j in columns]
        return mean_defined(vals)

    def mean_misclassification(self) -> float:
        m = self.misclassification[self.ok]
        return float(m.mean()) if m.size else math.nan


@dataclass
class StudyResult:
    scenario: Scenario
    priors: dict

    def inclusion_count_table(self):
        """Rows: focus regressors (1-based j, alpha_j); columns: priors."""
        rows = []
        for j in self.scenario.focus:
            row = {"j": j + 1, "alpha": self.scenario.effects[j]}
            for name, s in self.priors.items():
                row[name] = int(s.inclusion_counts()[j])
            rows.append(row)
        return rows

    def mean_inclusion_table(self):
        rows = []
        for j in range(self.scenario.d):
            row = {"j": j + 1, "alpha": self.scenario.effects[j]}
            for name, s in self.priors.items():
                row[name] = float(s.mean_inclusion()[j])
            rows.append(row)
        return rows

    def efficiency_table(self):
        """Averaged IACT, ESS/sec and misclassification over the focus columns."""
        rows = []
        for name, s in self.priors.items():
            tau, tau_skipped = s.averaged_iact(self.scenario.focus)
            ess, _ = s.averaged_ess_per_sec(self.scenario.focus)
            rows.append({"prior": name, "iact": tau, "iact_skipped": tau_skipped,
                         "ess_per_sec": ess,
                         "misclassification": s.mean_misclassification(),
                         "failed_replications": len(s.failures)})
        return rows


def _one_replication(scenario, priors, cfg, rep):
    data, alpha = generate_dataset(scenario, rep)
    out = []
    for k, prior in enumerate(priors):
        rng = make_rng(scenario.seed, (rep, k + 1))
        try:
            chain = run_mcmc(data, prior, cfg, rng=rng)
        except Exception as exc:  # recorded per replication, study continues
            logger.warning("replication %d, prior %s failed: %s", rep, prior.name, exc)
            out.append((prior.name, None, repr(exc)))
            continue
        p = chain.inclusion_probabilities()
        taus = [iact_initial_monotone(chain.incl_prob[:, j]) for j in range(chain.d)]
        wall = chain.wall_time_seconds
        ess_sec = [None if t is None or wall <= 0 else chain.M / t / wall for t in taus]
        mis = misclassification_rate(p > 0.5, alpha, scenario.focus)
        out.append((prior.name, (p, taus, ess_sec, wall, mis), None))
    return rep, out


def run_study(scenario: Scenario, priors: Sequence, cfg: McmcConfig,
              n_jobs: int = 1) -> StudyResult:
    """Run every prior on every replication of ``scenario``.

    Traces are not kept; only per-chain summaries.  ``cfg.seed`` is ignored:
    all randomness derives from ``scenario.seed``.
    """
    cfg = McmcConfig(M=cfg.M, burn_in=cfg.burn_in, full_model_warmup=cfg.full_model_warmup,
                     seed=None, store_traces=False)
    R, d = scenario.replications, scenario.d
    names = [p.name for p in priors]
    if len(set(names)) != len(names):
        raise ValueError("priors must have distinct names within a study")
    if n_jobs == 1:
        results = [_one_replication(scenario, priors, cfg, r) for r in range(R)]
    else:
        results = Parallel(n_jobs=n_jobs)(
            delayed(_one_replication)(scenario, priors, cfg, r) for r in range(R))
    summaries = {}
    for name in names:
        summaries[name] = PriorSummary(
            name=name, p_hat=np.full((R, d), np.nan), iact=[None] * R,
            ess_per_sec=[None] * R, wall_time=np.full(R, np.nan),
            misclassification=np.full(R, np.nan))
    for rep, per_prior in sorted(results, key=lambda t: t[0]):
        for name, res, err in per_prior:
            s = summaries[name]
            if res is None:
                s.failures.append((rep, err))
                continue
            p, taus, ess_sec, wall, mis = res
            s.p_hat[rep] = p
            s.iact[rep] = taus
            s.ess_per_sec[rep] = ess_sec
            s.wall_time[rep] = wall
            s.misclassification[rep] = mis
    return StudyResult(scenario=scenario, priors=summaries)
