"""Closed-form posterior moments and marginal likelihoods under Dirac spikes.

All three slabs are conjugate, so for a given indicator vector the
coefficients (and, for the unconditional version, the error variance) can be
integrated out.  With ``d1`` included columns, ``s_N = (N-1)/2`` and

    log p(y | delta) = -log(N)/2 - (N-1)/2 log(2 pi) + log_det_ratio
                       + lgamma(s_N) - s_N log(S_N)

where ``log_det_ratio = log(|A_N| / |A_0|) / 2``.  For the fractional slab the
likelihood entering the posterior is the remaining fraction ``1 - b`` so that
``S_N = (1 - b) * RSS_delta / 2``; this also applies to the empty model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .exceptions import DegenerateFitError, SingularDesignError
from .model import Dataset, DiracF, DiracG, DiracI

LOG_2PI = math.log(2.0 * math.pi)
# relative pivot threshold below which X_delta'X_delta is treated as singular
SINGULAR_RTOL = 1e-10


@dataclass(frozen=True)
class PosteriorMoments:
    """Moments of p(alpha_delta | sigma2, y) = N(a_N, A_N * sigma2).

    ``chol`` is the lower Cholesky factor of ``A_N^{-1}`` (kept so that draws
    of alpha_delta need no further factorization).
    """

    index: np.ndarray
    a_N: np.ndarray
    A_N: np.ndarray
    S_N: float
    s_N: float
    log_det_ratio: float
    chol: np.ndarray


def _as_index(delta, d):
    delta = np.asarray(delta)
    if delta.shape != (d,):
        raise ValueError(f"delta must have length {d}, got shape {delta.shape}")
    return np.flatnonzero(delta)


def _slab_terms(gram, xty, yty, idx, slab):
    """Return (L, z, S_N, log_det_ratio) or raise SingularDesignError.

    ``L`` is the Cholesky factor of the posterior precision (up to sigma2) and
    ``z = L^{-1} X_delta'y_c``, so ``a_N = L^{-T} z`` and the fitted quadratic
    form is ``z'z``.
    """
    k = idx.shape[0]
    if k == 0:
        S = 0.5 * yty
        if isinstance(slab, DiracF):
            S *= 1.0 - slab.b
        return None, None, S, 0.0
    G = gram[np.ix_(idx, idx)]
    bvec = xty[idx]
    if isinstance(slab, DiracI):
        P = G + np.eye(k) / slab.c
    else:
        P = G
    try:
        L = np.linalg.cholesky(P)
    except np.linalg.LinAlgError:
        raise SingularDesignError(_indicator(idx, gram.shape[0])) from None
    diag = np.diagonal(L)
    if isinstance(slab, DiracI):
        logdet_prec = 2.0 * np.log(diag).sum()
    else:
        if np.any(diag * diag <= SINGULAR_RTOL * np.diagonal(G)):
            raise SingularDesignError(_indicator(idx, gram.shape[0]))
        logdet_prec = None
    z = np.linalg.solve(L, bvec)
    fit = float(z @ z)
    if isinstance(slab, DiracI):
        S = 0.5 * (yty - fit)
        ldr = -0.5 * logdet_prec - 0.5 * k * math.log(slab.c)
    elif isinstance(slab, DiracG):
        shrink = slab.g / (slab.g + 1.0)
        S = 0.5 * (yty - shrink * fit)
        ldr = -0.5 * k * math.log1p(slab.g)
    elif isinstance(slab, DiracF):
        S = 0.5 * (1.0 - slab.b) * (yty - fit)
        ldr = 0.5 * k * math.log(slab.b)
    else:
        raise TypeError(f"not a Dirac slab: {slab!r}")
    return L, z, S, ldr


def _indicator(idx, d):
    delta = np.zeros(d, dtype=int)
    delta[idx] = 1
    return delta


def _check_slab(slab):
    if not isinstance(slab, (DiracI, DiracG, DiracF)):
        raise TypeError(f"marginal likelihoods need a Dirac slab, got {type(slab).__name__}")


def posterior_moments(data: Dataset, delta, slab) -> PosteriorMoments:
    _check_slab(slab)
    idx = _as_index(delta, data.d)
    L, z, S, ldr = _slab_terms(data.gram, data.xty, data.yty, idx, slab)
    s_N = 0.5 * (data.N - 1)
    if L is None:
        empty = np.zeros((0, 0))
        return PosteriorMoments(idx, np.zeros(0), empty, S, s_N, 0.0, empty)
    Linv = np.linalg.inv(L)
    prec_inv = Linv.T @ Linv
    a_N = Linv.T @ z
    if isinstance(slab, DiracG):
        # posterior precision is (1 + 1/g) X'X; L factors X'X only
        shrink = slab.g / (slab.g + 1.0)
        a_N = shrink * a_N
        A_N = shrink * prec_inv
        chol = L * math.sqrt(1.0 / shrink)
    else:
        A_N = prec_inv
        chol = L
    return PosteriorMoments(idx, a_N, A_N, S, s_N, ldr, chol)


def _finish(S, s_N, ldr, N, delta):
    if not S > 0:
        raise DegenerateFitError(
            f"S_N={S:.3g} is not positive for delta={tuple(int(v) for v in delta)}")
    return -0.5 * math.log(N) - s_N * LOG_2PI + ldr + math.lgamma(s_N) - s_N * math.log(S)


def log_marginal_likelihood(data: Dataset, delta, slab) -> float:
    """log p(y | delta) with alpha_delta, sigma2 and mu integrated out."""
    _check_slab(slab)
    idx = _as_index(delta, data.d)
    _, _, S, ldr = _slab_terms(data.gram, data.xty, data.yty, idx, slab)
    return _finish(S, 0.5 * (data.N - 1), ldr, data.N, delta)


def log_conditional_marginal_likelihood(data: Dataset, delta, slab, sigma2: float) -> float:
    """log p(y | delta, sigma2) with alpha_delta and mu integrated out."""
    _check_slab(slab)
    if not sigma2 > 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2!r}")
    idx = _as_index(delta, data.d)
    _, _, S, ldr = _slab_terms(data.gram, data.xty, data.yty, idx, slab)
    if not S > 0:
        raise DegenerateFitError(f"S_N={S:.3g} is not positive")
    N = data.N
    return (-0.5 * math.log(N) - 0.5 * (N - 1) * (LOG_2PI + math.log(sigma2))
            + ldr - S / sigma2)


def slab_code(slab) -> tuple[int, float]:
    """(kernel code, hyperparameter) pair understood by ``_kernels``."""
    if isinstance(slab, DiracI):
        return _kernels.SLAB_I, float(slab.c)
    if isinstance(slab, DiracG):
        return _kernels.SLAB_G, float(slab.g)
    if isinstance(slab, DiracF):
        return _kernels.SLAB_F, float(slab.b)
    raise TypeError(f"not a Dirac slab: {slab!r}")


def log_ml_fast(data: Dataset, mask: np.ndarray, code: int, param: float) -> tuple[float, float]:
    """(log p(y|delta), S_N) for boolean ``mask``; singular designs give -inf.

    Compiled path used inside the sampler, without argument checks.
    """
    S, ldr, ok = _kernels.slab_scale_terms(data.gram, data.xty, data.yty, mask, code,
                                           param, SINGULAR_RTOL)
    if not ok or not S > 0:
        return -math.inf, math.nan
    s_N = 0.5 * (data.N - 1)
    return (-0.5 * math.log(data.N) - s_N * LOG_2PI + ldr + math.lgamma(s_N)
            - s_N * math.log(S)), S
