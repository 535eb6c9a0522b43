"""Grid evaluation of inclusion-probability curves."""

from __future__ import annotations

import numpy as np

from .analytic import (CorrelatedPairSetting, OrthogonalSetting, h_correlated_pair,
                       h_orthogonal, inclusion_probability_from_h,
                       inclusion_probability_integrated_omega)
from .model import Dataset, McmcConfig, default_prior
from .samplers import run_mcmc

PATH_SLAB_VARIANCES = (1.0, 2.5, 5.0, 10.0)


def _check_grid(grid):
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if grid.size == 0 or not np.all(np.isfinite(grid)):
        raise ValueError("grid must be a non-empty list of finite numbers")
    return grid


def _prob(h, omega, a_omega, b_omega):
    if omega is None:
        return inclusion_probability_integrated_omega(h, a_omega, b_omega)
    return inclusion_probability_from_h(h, omega)


def orthogonal_curve(grid, slab, N=40, s2=1.0, sigma2=1.0, omega=None,
                     a_omega=1.0, b_omega=1.0):
    """Rows (x = alpha_hat, value = inclusion probability).

    ``omega=None`` integrates omega over Beta(a_omega, b_omega).
    """
    rows = []
    for a in _check_grid(grid):
        h = h_orthogonal(OrthogonalSetting(alpha_hat=a, s_j2=s2, N=N, sigma2=sigma2), slab)
        rows.append({"x": float(a), "value": float(_prob(h, omega, a_omega, b_omega))})
    return rows


def correlated_pair_curve(grid, slab, vary="alpha", alpha_hat2=0.5, r12=0.0, r_y1=0.9,
                          s_y=2.0, N=40, sigma2=1.0, omega=None, a_omega=1.0, b_omega=1.0):
    """Inclusion probability of x2 given x1 included, over alpha_hat2 or r12.

    r_y2 is backed out from the fixed r_y1 (relevant for the i-slab only).
    """
    if vary not in ("alpha", "r12"):
        raise ValueError("vary must be 'alpha' or 'r12'")
    rows = []
    for x in _check_grid(grid):
        a, r = (x, r12) if vary == "alpha" else (alpha_hat2, x)
        setting = CorrelatedPairSetting.from_r_y1(a, r, r_y1, s_y, N=N, sigma2=sigma2)
        h = h_correlated_pair(setting, slab)
        rows.append({"x": float(x), "value": float(_prob(h, omega, a_omega, b_omega))})
    return rows


def inclusion_path(data: Dataset, prior_name: str, cfg: McmcConfig,
                   slab_variances=PATH_SLAB_VARIANCES, names=None, **overrides):
    """Rerun the sampler for each slab variance c (with g = N*c, b = 1/g, V = c).

    Rows (c, covariate, value).  Every run uses ``cfg.seed``.
    """
    grid = _check_grid(slab_variances)
    if np.any(grid <= 0):
        raise ValueError("slab variances must be positive")
    names = names or [f"x{j + 1}" for j in range(data.d)]
    rows = []
    for c in grid:
        prior = default_prior(prior_name, data.N, c=float(c), **overrides)
        p = run_mcmc(data, prior, cfg).inclusion_probabilities()
        rows.extend({"c": float(c), "covariate": n, "value": float(v)}
                    for n, v in zip(names, p))
    return rows
