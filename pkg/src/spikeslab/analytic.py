"""Inclusion probabilities under Dirac spikes with known error variance.

For a single regressor the conditional inclusion probability is

    p(delta_j = 1 | y, delta_\\j, sigma2) = 1 / (1 + exp(h / 2) * (1 - omega) / omega)

where ``h`` is twice the log ratio of the conditional marginal likelihoods of
the models without and with the regressor.  ``h`` has closed forms for
orthogonal regressors and for a pair of standardized correlated regressors
(with the first one included).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import DiracF, DiracG, DiracI

GAUSS_LEGENDRE_NODES = 64


@dataclass(frozen=True)
class OrthogonalSetting:
    alpha_hat: float
    s_j2: float = 1.0
    N: int = 40
    sigma2: float = 1.0
    omega: float = 0.5

    def __post_init__(self):
        if not self.s_j2 > 0:
            raise ValueError("s_j2 must be positive")
        if self.N < 1:
            raise ValueError("N must be at least 1")
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")
        if not 0 < self.omega < 1:
            raise ValueError("omega must lie in (0, 1)")


@dataclass(frozen=True)
class CorrelatedPairSetting:
    """Two standardized regressors, x1 included; quantities refer to x2.

    ``r_y2`` is only needed for the i-slab.
    """

    alpha_hat2: float
    r12: float
    r_y2: float = 0.0
    s_y: float = 1.0
    N: int = 40
    sigma2: float = 1.0
    omega: float = 0.5

    def __post_init__(self):
        if not abs(self.r12) < 1:
            raise ValueError("|r12| must be below 1")
        if self.N < 1:
            raise ValueError("N must be at least 1")
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")
        if not 0 < self.omega < 1:
            raise ValueError("omega must lie in (0, 1)")

    @classmethod
    def from_r_y1(cls, alpha_hat2, r12, r_y1, s_y, **kwargs):
        """Setting with r_y2 backed out from a fixed correlation r_y1."""
        r_y2 = alpha_hat2 * (1.0 - r12 ** 2) / s_y + r12 * r_y1
        return cls(alpha_hat2=alpha_hat2, r12=r12, r_y2=r_y2, s_y=s_y, **kwargs)

    @property
    def r_y1(self) -> float:
        """Correlation of y with x1 implied by alpha_hat2, r_y2 and r12."""
        if self.r12 == 0:
            raise ValueError("r_y1 is not identified when r12 = 0")
        return (self.r_y2 - self.alpha_hat2 * (1 - self.r12 ** 2) / self.s_y) / self.r12


def h_orthogonal(setting: OrthogonalSetting, slab) -> float:
    signal = setting.N * setting.alpha_hat ** 2 * setting.s_j2 / setting.sigma2
    if isinstance(slab, DiracI):
        nsc = setting.N * setting.s_j2 * slab.c
        return -signal / (1.0 + 1.0 / nsc) + math.log1p(nsc)
    if isinstance(slab, DiracG):
        return -signal * slab.g / (slab.g + 1.0) + math.log1p(slab.g)
    if isinstance(slab, DiracF):
        return -signal * (1.0 - slab.b) - math.log(slab.b)
    raise TypeError(f"h is defined for Dirac slabs only, got {type(slab).__name__}")


def q_corr(r12: float, Nc: float) -> float:
    """Denominator of the signal term of the correlated-pair i-slab formula."""
    u = 1.0 / Nc
    return (1.0 - r12 ** 2) + u * (3.0 - r12 ** 2) + 3.0 * u ** 2 + u ** 3


def h_correlated_pair(setting: CorrelatedPairSetting, slab) -> float:
    s = setting
    one_minus = 1.0 - s.r12 ** 2
    if isinstance(slab, DiracG):
        return -s.N * s.alpha_hat2 ** 2 / s.sigma2 * one_minus * slab.g / (slab.g + 1.0) \
            + math.log1p(slab.g)
    if isinstance(slab, DiracF):
        return -s.N * s.alpha_hat2 ** 2 / s.sigma2 * one_minus * (1.0 - slab.b) - math.log(slab.b)
    if isinstance(slab, DiracI):
        Nc = s.N * slab.c
        inner = s.alpha_hat2 * one_minus + s.r_y2 * s.s_y / Nc
        return (-s.N / (q_corr(s.r12, Nc) * s.sigma2) * inner ** 2
                + math.log(Nc * one_minus + 1.0 + s.r12 ** 2 / (1.0 + 1.0 / Nc)))
    raise TypeError(f"h is defined for Dirac slabs only, got {type(slab).__name__}")


def inclusion_probability_from_h(h, omega):
    """Conditional inclusion probability for penalty-minus-signal value ``h``.

    Accepts scalars or arrays for ``h``; extreme values saturate at 0 or 1.
    """
    if not 0 < omega < 1:
        raise ValueError("omega must lie in (0, 1)")
    t = 0.5 * np.asarray(h, dtype=float) + math.log1p(-omega) - math.log(omega)
    p = np.exp(-np.logaddexp(0.0, t))
    return float(p) if p.ndim == 0 else p


def _beta_nodes(a, b, n):
    x, w = np.polynomial.legendre.leggauss(n)
    u = 0.5 * (x + 1.0)
    log_dens = ((a - 1.0) * np.log(u) + (b - 1.0) * np.log1p(-u)
                - (math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)))
    return u, 0.5 * w * np.exp(log_dens)


def inclusion_probability_integrated_omega(h, a_omega=1.0, b_omega=1.0,
                                           n_nodes=GAUSS_LEGENDRE_NODES):
    """Average of the inclusion probability over omega ~ Beta(a_omega, b_omega).

    Fixed-order Gauss-Legendre quadrature on (0, 1).
    """
    if not (a_omega > 0 and b_omega > 0):
        raise ValueError("Beta parameters must be positive")
    u, w = _beta_nodes(a_omega, b_omega, n_nodes)
    h_arr = np.asarray(h, dtype=float)
    t = 0.5 * h_arr[..., None] + np.log1p(-u) - np.log(u)
    vals = np.exp(-np.logaddexp(0.0, t)) @ w
    return float(vals) if vals.ndim == 0 else vals
