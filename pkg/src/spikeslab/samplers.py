"""Gibbs samplers for spike-and-slab linear regression.

Two schemes are implemented:

* continuous spikes (SSVS, NMIG): indicators are drawn given the current
  coefficients, coefficients from their joint normal full conditional;
* Dirac spikes (i-, g-, f-slab): each indicator is drawn from its conditional
  with coefficients and error variance integrated out, followed by
  (sigma2, mu, omega, alpha_delta) from their full conditionals.

Inverse Gamma draws use the (shape, scale) parameterization with density
proportional to ``x**(-shape-1) * exp(-scale/x)``.
"""

from __future__ import annotations

import math
import time

import numpy as np

from .exceptions import NumericalBreakdownError
from ._kernels import draw_coefficients
from .marginal import log_ml_fast, slab_code
from .model import (NMIG, SSVS, ChainOutput, ChainState, Dataset, DiracF, DiracG,
                    DiracI, McmcConfig)


def make_rng(seed, stream=None):
    """Generator for ``seed``; ``stream`` (int or tuple of ints) selects a sub-stream."""
    if stream is None:
        return np.random.default_rng(seed)
    key = (stream,) if np.isscalar(stream) else tuple(stream)
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key)))


def sample_inv_gamma(rng, shape, scale):
    return scale / rng.standard_gamma(shape)


def _initial_state(data: Dataset, prior) -> ChainState:
    """Least-squares start on the full model."""
    N, d = data.N, data.d
    alpha, *_ = np.linalg.lstsq(data.X, data.y_c, rcond=None)
    resid = data.y_c - data.X @ alpha
    dof = N - d - 1
    sigma2 = float(resid @ resid) / dof if dof > 0 else data.s_y2
    if not sigma2 > 0:
        sigma2 = max(data.s_y2, 1e-8)
    omega = prior.a_omega / (prior.a_omega + prior.b_omega)
    psi = None
    if isinstance(prior, NMIG):
        psi = np.full(d, prior.Q / (prior.nu - 1.0) if prior.nu > 1 else prior.Q)
    elif isinstance(prior, SSVS):
        psi = np.full(d, prior.V)
    return ChainState(mu=data.y_bar, alpha=alpha, delta=np.ones(d, dtype=np.int8),
                      omega=omega, sigma2=sigma2, psi=psi)


def _allocate(cfg, d):
    M = cfg.M
    incl = np.empty((M, d))
    deltas = np.empty((M, d), dtype=np.int8)
    if cfg.store_traces:
        return incl, deltas, np.empty((M, d)), np.empty(M), np.empty(M)
    return incl, deltas, None, None, None


def _log_spike_slab_ratio(alpha, prior):
    """log p_spike(alpha_j) - log p_slab(alpha_j), vectorized over j."""
    a2 = alpha * alpha
    r = prior.r
    if isinstance(prior, SSVS):
        return -0.5 * math.log(r) - 0.5 * a2 / prior.V * (1.0 / r - 1.0)
    # NMIG: Student-t with 2 nu d.o.f., squared scales rQ/nu and Q/nu
    return (-0.5 * math.log(r)
            - (prior.nu + 0.5) * (np.log1p(a2 / (2.0 * r * prior.Q))
                                  - np.log1p(a2 / (2.0 * prior.Q))))


def _stable_inclusion(log_L, omega):
    t = log_L + math.log1p(-omega) - math.log(omega)
    # 1/(1+exp(t)) evaluated without overflow
    return np.exp(-np.logaddexp(0.0, t))


def indicator_probabilities(alpha, omega, prior) -> np.ndarray:
    """p(delta_j = 1 | alpha_j, omega) for SSVS or NMIG, vectorized over j."""
    return _stable_inclusion(_log_spike_slab_ratio(np.asarray(alpha, dtype=float), prior), omega)


def psi_posterior(alpha, delta, prior: NMIG):
    """Shape and per-coordinate scales of the inverse Gamma full conditional of psi_j."""
    rdelta = np.where(np.asarray(delta) > 0, 1.0, prior.r)
    alpha = np.asarray(alpha, dtype=float)
    return prior.nu + 0.5, prior.Q + alpha * alpha / (2.0 * rdelta)


def run_continuous_spike_mcmc(data: Dataset, prior, cfg: McmcConfig, rng=None) -> ChainOutput:
    """Gibbs sampler for SSVS and NMIG priors.

    Per iteration: mu, then (delta, psi) jointly given alpha, then omega,
    alpha and sigma2.  The indicator probabilities use the marginal spike and
    slab densities of alpha_j (normal for SSVS, Student-t for NMIG), so they do
    not depend on psi.  During the first ``cfg.full_model_warmup`` iterations
    delta is held at all ones.
    """
    if not isinstance(prior, (SSVS, NMIG)):
        raise TypeError(f"continuous-spike sampler needs SSVS or NMIG, got {type(prior).__name__}")
    rng = make_rng(cfg.seed) if rng is None else rng
    N, d = data.N, data.d
    gram, xty, X, y_c = data.gram, data.xty, data.X, data.y_c
    state = _initial_state(data, prior)
    alpha, delta, psi = state.alpha, state.delta.astype(float), state.psi
    omega, sigma2 = state.omega, state.sigma2
    s_N = 0.5 * (N - 1)
    is_nmig = isinstance(prior, NMIG)
    r = prior.r
    a_w, b_w = prior.a_omega, prior.b_omega

    incl, deltas, alphas, sigmas, omegas = _allocate(cfg, d)
    total = cfg.burn_in + cfg.M
    t0 = None
    for it in range(total):
        if it == cfg.burn_in:
            t0 = time.perf_counter()
        mu = data.y_bar + math.sqrt(sigma2 / N) * rng.standard_normal()

        # indicators are conditionally independent given alpha and omega
        p = indicator_probabilities(alpha, omega, prior)
        u = rng.random(d)
        if it < cfg.full_model_warmup:
            delta = np.ones(d)
        else:
            delta = (u < p).astype(float)
        rdelta = np.where(delta > 0, 1.0, r)
        if is_nmig:
            shape, scale = psi_posterior(alpha, delta, prior)
            psi = scale / rng.standard_gamma(shape, size=d)

        d1 = delta.sum()
        omega = rng.beta(a_w + d1, b_w + d - d1)

        prec = gram / sigma2
        prec[np.diag_indices(d)] += 1.0 / (rdelta * psi)
        try:
            L = np.linalg.cholesky(prec)
        except np.linalg.LinAlgError:
            raise NumericalBreakdownError(it) from None
        w = np.linalg.solve(L, xty / sigma2)
        alpha = np.linalg.solve(L.T, w + rng.standard_normal(d))

        resid = y_c - X @ alpha
        sigma2 = sample_inv_gamma(rng, s_N, 0.5 * float(resid @ resid))

        if it >= cfg.burn_in:
            m = it - cfg.burn_in
            incl[m] = p
            deltas[m] = delta
            if alphas is not None:
                alphas[m] = alpha
                sigmas[m] = sigma2
                omegas[m] = omega
    wall = time.perf_counter() - t0
    final = ChainState(mu, alpha, delta.astype(np.int8), omega, sigma2, psi)
    return ChainOutput(incl, deltas, alphas, sigmas, omegas, wall, prior, final)


def run_dirac_spike_mcmc(data: Dataset, prior, cfg: McmcConfig, rng=None) -> ChainOutput:
    """Marginalized Gibbs sampler for Dirac spikes with i-, g- or f-slab.

    Indicators are updated one at a time in a fresh random order each
    iteration; a proposal that makes X_delta'X_delta singular has marginal
    likelihood zero and is never accepted.
    """
    if not isinstance(prior, (DiracI, DiracG, DiracF)):
        raise TypeError(f"Dirac-spike sampler needs a Dirac slab, got {type(prior).__name__}")
    rng = make_rng(cfg.seed) if rng is None else rng
    N, d = data.N, data.d
    s_N = 0.5 * (N - 1)
    a_w, b_w = prior.a_omega, prior.b_omega
    state = _initial_state(data, prior)
    omega, sigma2 = state.omega, state.sigma2
    code, param = slab_code(prior)
    gram, xty = data.gram, data.xty
    delta = np.ones(d, dtype=bool)
    cur_lml, cur_S = log_ml_fast(data, delta, code, param)
    warmup = cfg.full_model_warmup
    if not math.isfinite(cur_lml):
        # full model is singular: start from the empty model instead
        delta[:] = False
        cur_lml, cur_S = log_ml_fast(data, delta, code, param)
        warmup = 0

    incl, deltas, alphas, sigmas, omegas = _allocate(cfg, d)
    p_row = np.empty(d)
    alpha = np.zeros(d)
    total = cfg.burn_in + cfg.M
    t0 = None
    for it in range(total):
        if it == cfg.burn_in:
            t0 = time.perf_counter()
        log_prior_odds = math.log1p(-omega) - math.log(omega)
        order = rng.permutation(d) if it >= warmup else ()
        for j in order:
            was = delta[j]
            delta[j] = not was
            alt_lml, alt_S = log_ml_fast(data, delta, code, param)
            delta[j] = was
            if was:
                lml1, lml0 = cur_lml, alt_lml
            else:
                lml1, lml0 = alt_lml, cur_lml
            # log R_j = log p(y|delta_j=0) - log p(y|delta_j=1)
            if lml1 == -math.inf:
                p = 0.0
            elif lml0 == -math.inf:
                p = 1.0
            else:
                t = lml0 - lml1 + log_prior_odds
                p = 1.0 / (1.0 + math.exp(t)) if t < 0 else math.exp(-t) / (1.0 + math.exp(-t))
            p_row[j] = p
            new = rng.random() < p
            if new != was:
                delta[j] = new
                cur_lml, cur_S = alt_lml, alt_S

        sigma2 = sample_inv_gamma(rng, s_N, cur_S)
        mu = data.y_bar + math.sqrt(sigma2 / N) * rng.standard_normal()
        d1 = int(delta.sum())
        omega = rng.beta(a_w + d1, b_w + d - d1)

        draw_coefficients(gram, xty, delta, code, param, sigma2,
                          rng.standard_normal(d1), alpha)

        if it >= cfg.burn_in:
            m = it - cfg.burn_in
            incl[m] = p_row
            deltas[m] = delta
            if alphas is not None:
                alphas[m] = alpha
                sigmas[m] = sigma2
                omegas[m] = omega
    wall = time.perf_counter() - t0
    final = ChainState(mu, alpha.copy(), delta.astype(np.int8), omega, sigma2)
    return ChainOutput(incl, deltas, alphas, sigmas, omegas, wall, prior, final)


def run_mcmc(data: Dataset, prior, cfg: McmcConfig, rng=None) -> ChainOutput:
    """Dispatch to the sampler matching the spike type of ``prior``."""
    if getattr(prior, "continuous", False):
        return run_continuous_spike_mcmc(data, prior, cfg, rng)
    return run_dirac_spike_mcmc(data, prior, cfg, rng)
