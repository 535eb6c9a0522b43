"""Chain diagnostics and selection summaries.

The inefficiency factor (integrated autocorrelation time) is

    tau = 1 + 2 * sum_{l=1}^{L} rho(l)

with the window L chosen by Geyer's initial monotone sequence estimator.  A
series with no variation has no defined tau; such values are reported as
``None`` and skipped (and counted) when averaging.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import fft

from .exceptions import SeriesTooShortError
from .model import ChainOutput

MIN_SERIES_LENGTH = 10
CONSTANT_ATOL = 1e-12


def autocorrelation(x, max_lag=None) -> np.ndarray:
    """Empirical autocorrelations rho(0..max_lag) with the biased (1/M) estimator."""
    x = np.asarray(x, dtype=float)
    M = x.shape[0]
    if max_lag is None:
        max_lag = M - 1
    xc = x - x.mean()
    n = fft.next_fast_len(2 * M)
    f = fft.rfft(xc, n)
    acov = fft.irfft(f * np.conjugate(f), n)[: max_lag + 1] / M
    return acov / acov[0]


def _pair_sums(rho):
    n_pairs = (rho.shape[0]) // 2
    return rho[0: 2 * n_pairs: 2] + rho[1: 2 * n_pairs: 2]


def iact_initial_positive(series) -> Optional[float]:
    """tau over all leading positive pair sums, without the monotone adjustment."""
    rho = _checked_acf(series)
    if rho is None:
        return None
    gam = _pair_sums(rho)
    neg = np.flatnonzero(gam <= 0)
    m = neg[0] if neg.size else gam.shape[0]
    return float(2.0 * gam[:m].sum() - 1.0)


def _checked_acf(series):
    x = np.asarray(series, dtype=float).reshape(-1)
    if x.shape[0] < MIN_SERIES_LENGTH:
        raise SeriesTooShortError(
            f"need at least {MIN_SERIES_LENGTH} draws, got {x.shape[0]}")
    if np.ptp(x) <= CONSTANT_ATOL:
        return None
    # lag cap M/2; the monotone truncation normally stops far earlier
    return autocorrelation(x, max_lag=x.shape[0] // 2)


def iact_initial_monotone(series) -> Optional[float]:
    """Inefficiency factor via Geyer's initial monotone sequence estimator.

    Pair sums Gamma_k = rho(2k) + rho(2k+1) are summed up to (excluding) the
    first non-positive one, after replacing each by the running minimum of
    its predecessors.  Returns ``None`` for a constant series.
    """
    rho = _checked_acf(series)
    if rho is None:
        return None
    gam = _pair_sums(rho)
    neg = np.flatnonzero(gam <= 0)
    m = neg[0] if neg.size else gam.shape[0]
    gam = np.minimum.accumulate(gam[:m])
    return float(2.0 * gam.sum() - 1.0)


def effective_sample_size(series, M: Optional[int] = None) -> Optional[float]:
    """M / tau; ``None`` if tau is undefined."""
    tau = iact_initial_monotone(series)
    if tau is None:
        return None
    if M is None:
        M = len(series)
    return M / tau


def monte_carlo_se(series) -> float:
    """Standard error of the chain mean, sqrt(var * tau / M); 0 for a constant chain."""
    x = np.asarray(series, dtype=float)
    tau = iact_initial_monotone(x)
    if tau is None:
        return 0.0
    return math.sqrt(x.var() * max(tau, 1e-12) / x.shape[0])


def mean_defined(values) -> tuple[Optional[float], int]:
    """Mean over the non-``None`` entries and the number of skipped entries."""
    kept = [v for v in values if v is not None]
    skipped = len(values) - len(kept)
    if not kept:
        return None, skipped
    return float(np.mean(kept)), skipped


@dataclass
class SelectionReport:
    incl_prob_hat: np.ndarray
    iact: list
    ess: list
    ess_per_sec: list
    mpm: np.ndarray
    misclassification_rate: Optional[float] = None
    names: list = field(default_factory=list)
    indicator_freq: Optional[np.ndarray] = None
    M: int = 0
    wall_time_seconds: float = 0.0

    def __post_init__(self):
        if not self.names:
            self.names = [f"x{j + 1}" for j in range(len(self.incl_prob_hat))]

    def records(self):
        """One dict per regressor, in column order."""
        out = []
        for j, name in enumerate(self.names):
            out.append({
                "name": name,
                "incl_prob": float(self.incl_prob_hat[j]),
                "iact": self.iact[j],
                "ess": self.ess[j],
                "ess_per_sec": self.ess_per_sec[j],
                "mpm": bool(self.mpm[j]),
                "indicator_freq": (None if self.indicator_freq is None
                                   else float(self.indicator_freq[j])),
            })
        return out


def misclassification_rate(mpm, truth, subset: Optional[Sequence[int]] = None) -> float:
    """Fraction of regressors in ``subset`` whose mpm flag disagrees with ``truth != 0``."""
    mpm = np.asarray(mpm, dtype=bool)
    nonzero = np.asarray(truth, dtype=float) != 0
    if mpm.shape != nonzero.shape:
        raise ValueError("truth must have one entry per regressor")
    idx = np.arange(mpm.shape[0]) if subset is None else np.asarray(subset, dtype=int)
    if idx.size == 0:
        return math.nan
    return float(np.mean(mpm[idx] != nonzero[idx]))


def summarize(output: ChainOutput, truth=None, subset=None, names=None) -> SelectionReport:
    """Selection summary of a chain.

    ``truth`` is the true coefficient vector (only its zero pattern is used);
    ``subset`` restricts the misclassification rate to those column indices.
    Reported inefficiency factors are floored at 1, so ESS never exceeds M.
    """
    p_hat = output.inclusion_probabilities()
    iact, ess, ess_sec = [], [], []
    wall = output.wall_time_seconds
    for j in range(output.d):
        tau = iact_initial_monotone(output.incl_prob[:, j])
        if tau is not None:
            tau = max(tau, 1.0)
        iact.append(tau)
        if tau is None:
            ess.append(None)
            ess_sec.append(None)
        else:
            e = output.M / tau
            ess.append(e)
            ess_sec.append(e / wall if wall > 0 else None)
    mpm = p_hat > 0.5
    rate = None if truth is None else misclassification_rate(mpm, truth, subset)
    return SelectionReport(incl_prob_hat=p_hat, iact=iact, ess=ess, ess_per_sec=ess_sec,
                           mpm=mpm, misclassification_rate=rate,
                           names=list(names) if names is not None else [],
                           indicator_freq=output.indicator_frequencies(), M=output.M,
                           wall_time_seconds=wall)
