"""Compiled inner loop for the Dirac-spike indicator updates.

The sampler evaluates one marginal likelihood per indicator per iteration on
matrices of size d1 x d1 with d1 small, where NumPy call overhead dominates.
This kernel does the Cholesky factorization and triangular solve by hand.
"""

import math

import numba
import numpy as np

SLAB_I, SLAB_G, SLAB_F = 0, 1, 2


@numba.njit(cache=True)
def slab_scale_terms(gram, xty, yty, mask, slab_code, param, singular_rtol):
    """Return (S_N, log_det_ratio, ok) for the columns selected by ``mask``.

    ``ok`` is False when X_delta'X_delta is numerically singular under the
    g- or f-slab.  Must agree with ``marginal._slab_terms``.
    """
    d = mask.shape[0]
    idx = np.empty(d, dtype=np.int64)
    k = 0
    for j in range(d):
        if mask[j]:
            idx[k] = j
            k += 1
    if k == 0:
        S = 0.5 * yty
        if slab_code == SLAB_F:
            S *= 1.0 - param
        return S, 0.0, True

    L = np.zeros((k, k))
    z = np.empty(k)
    logdet = 0.0
    for a in range(k):
        ia = idx[a]
        for b in range(a + 1):
            ib = idx[b]
            s = gram[ia, ib]
            for m in range(b):
                s -= L[a, m] * L[b, m]
            if a == b:
                g_aa = gram[ia, ia]
                if slab_code == SLAB_I:
                    s += 1.0 / param
                elif s <= singular_rtol * g_aa:
                    return math.nan, math.nan, False
                if s <= 0.0:
                    return math.nan, math.nan, False
                L[a, a] = math.sqrt(s)
                logdet += math.log(s)
            else:
                L[a, b] = s / L[b, b]
    fit = 0.0
    for a in range(k):
        s = xty[idx[a]]
        for m in range(a):
            s -= L[a, m] * z[m]
        z[a] = s / L[a, a]
        fit += z[a] * z[a]

    if slab_code == SLAB_I:
        S = 0.5 * (yty - fit)
        ldr = -0.5 * logdet - 0.5 * k * math.log(param)
    elif slab_code == SLAB_G:
        S = 0.5 * (yty - param / (param + 1.0) * fit)
        ldr = -0.5 * k * math.log1p(param)
    else:
        S = 0.5 * (1.0 - param) * (yty - fit)
        ldr = 0.5 * k * math.log(param)
    return S, ldr, True


@numba.njit(cache=True)
def draw_coefficients(gram, xty, mask, slab_code, param, sigma2, noise, out):
    """Fill ``out`` with a draw of alpha given delta and sigma2.

    Excluded entries are set to exactly zero; included ones are drawn from
    N(a_delta, A_delta * sigma2) using ``noise`` (standard normals, one per
    included column).  The posterior precision is L L' with L the Cholesky
    factor of X_delta'X_delta (+ I/c for the i-slab), scaled by 1 + 1/g for
    the g-slab.
    """
    d = mask.shape[0]
    idx = np.empty(d, dtype=np.int64)
    k = 0
    for j in range(d):
        out[j] = 0.0
        if mask[j]:
            idx[k] = j
            k += 1
    if k == 0:
        return
    L = np.zeros((k, k))
    for a in range(k):
        for b in range(a + 1):
            s = gram[idx[a], idx[b]]
            for m in range(b):
                s -= L[a, m] * L[b, m]
            if a == b:
                if slab_code == SLAB_I:
                    s += 1.0 / param
                L[a, a] = math.sqrt(s)
            else:
                L[a, b] = s / L[b, b]
    shrink = 1.0
    if slab_code == SLAB_G:
        shrink = param / (param + 1.0)
    # mean: solve L L' m = X'y, then scale; noise: solve L' e = z
    z = np.empty(k)
    for a in range(k):
        s = xty[idx[a]]
        for m in range(a):
            s -= L[a, m] * z[m]
        z[a] = s / L[a, a]
    sd = math.sqrt(sigma2 * shrink)
    for a in range(k):
        z[a] = shrink * z[a] + sd * noise[a]
    v = np.empty(k)
    for a in range(k - 1, -1, -1):
        s = z[a]
        for m in range(a + 1, k):
            s -= L[m, a] * v[m]
        v[a] = s / L[a, a]
    for a in range(k):
        out[idx[a]] = v[a]
