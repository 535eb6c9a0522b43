"""Data, prior and chain containers shared by the samplers and the analysis code."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .exceptions import DimensionMismatchError, ZeroVarianceError

CENTER_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class Dataset:
    """Response and centered design matrix with cached sufficient statistics.

    ``col_var`` and ``s_y2`` use divisor N.  ``gram = X'X``, ``xty = X'y_c``
    and ``yty = y_c'y_c`` are computed once so that per-model quantities can be
    read off by index.
    """

    y: np.ndarray
    X: np.ndarray
    y_bar: float
    y_c: np.ndarray
    col_var: np.ndarray
    s_y2: float
    gram: np.ndarray = field(repr=False)
    xty: np.ndarray = field(repr=False)
    yty: float = field(repr=False)

    @property
    def N(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]


def load_dataset(raw_y, raw_X, center: bool = True) -> Dataset:
    """Build a :class:`Dataset`, centering the columns of ``raw_X`` if requested.

    Columns whose mean already lies within ``1e-10 * N`` of zero are centered
    anyway; the operation is idempotent up to rounding.  With ``center=False``
    the columns must already satisfy that tolerance.
    """
    y = np.array(raw_y, dtype=float).reshape(-1)
    X = np.array(raw_X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DimensionMismatchError(f"X must be 2-dimensional, got ndim={X.ndim}")
    N = y.shape[0]
    if X.shape[0] != N:
        raise DimensionMismatchError(
            f"X has {X.shape[0]} rows but y has length {N}")
    if N < 2:
        raise DimensionMismatchError(f"need at least 2 observations, got n_samples={N}")
    if X.shape[1] < 1:
        raise DimensionMismatchError("X has no columns")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("X and y must be finite")

    col_sums = X.sum(axis=0)
    if center:
        X = X - X.mean(axis=0)
    elif np.any(np.abs(col_sums) > CENTER_RTOL * N):
        bad = int(np.argmax(np.abs(col_sums)))
        raise ValueError(f"column {bad} is not centered (sum={col_sums[bad]:.3g})")

    col_var = (X * X).sum(axis=0) / N
    scale = np.maximum(np.abs(np.array(raw_X, dtype=float).reshape(N, -1)).max(axis=0), 1.0)
    for j in range(X.shape[1]):
        if col_var[j] <= (1e-12 * scale[j]) ** 2:
            raise ZeroVarianceError(j)

    y_bar = float(y.mean())
    y_c = y - y_bar
    X.setflags(write=False)
    y.setflags(write=False)
    y_c.setflags(write=False)
    gram = X.T @ X
    xty = X.T @ y_c
    gram.setflags(write=False)
    xty.setflags(write=False)
    return Dataset(y=y, X=X, y_bar=y_bar, y_c=y_c, col_var=col_var,
                   s_y2=float(y_c @ y_c) / N, gram=gram, xty=xty,
                   yty=float(y_c @ y_c))


# ---------------------------------------------------------------------------
# priors

def _positive(name, value):
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value!r}")


@dataclass(frozen=True)
class _OmegaPrior:
    a_omega: float = 1.0
    b_omega: float = 1.0

    def _check_omega(self):
        _positive("a_omega", self.a_omega)
        _positive("b_omega", self.b_omega)


def _check_ratio(r):
    if not 0 < r < 1:
        raise ValueError(f"variance ratio r must lie in (0, 1), got {r!r}")
    if r > 0.01:
        warnings.warn(f"variance ratio r={r} is not small; spike and slab overlap",
                      stacklevel=3)


@dataclass(frozen=True)
class SSVS(_OmegaPrior):
    """Normal spike N(0, rV) and normal slab N(0, V)."""

    r: float = 1e-4
    V: float = 1.0
    name = "ssvs"
    continuous = True

    def __post_init__(self):
        _check_ratio(self.r)
        _positive("V", self.V)
        self._check_omega()


@dataclass(frozen=True)
class NMIG(_OmegaPrior):
    """Normal mixture of inverse Gammas: psi_j ~ InvGamma(nu, Q)."""

    r: float = 1e-4
    nu: float = 5.0
    Q: float = 4.0
    name = "nmig"
    continuous = True

    def __post_init__(self):
        _check_ratio(self.r)
        _positive("nu", self.nu)
        _positive("Q", self.Q)
        self._check_omega()


@dataclass(frozen=True)
class DiracI(_OmegaPrior):
    """Dirac spike with independent slab N(0, c * sigma2 * I)."""

    c: float = 1.0
    name = "dirac-i"
    continuous = False

    def __post_init__(self):
        _positive("c", self.c)
        self._check_omega()


@dataclass(frozen=True)
class DiracG(_OmegaPrior):
    """Dirac spike with Zellner slab N(0, g * sigma2 * (X'X)^-1)."""

    g: float = 1.0
    name = "dirac-g"
    continuous = False

    def __post_init__(self):
        _positive("g", self.g)
        self._check_omega()


@dataclass(frozen=True)
class DiracF(_OmegaPrior):
    """Dirac spike with fractional slab built from a fraction b of the likelihood."""

    b: float = 0.5
    name = "dirac-f"
    continuous = False

    def __post_init__(self):
        if not 0 < self.b < 1:
            raise ValueError(f"likelihood fraction b must lie in (0, 1), got {self.b!r}")
        self._check_omega()


PriorSpec = Union[SSVS, NMIG, DiracI, DiracG, DiracF]
DiracSlab = Union[DiracI, DiracG, DiracF]

PRIOR_NAMES = ("ssvs", "nmig", "dirac-i", "dirac-g", "dirac-f")


def default_prior(name: str, N: int, c: float = 1.0, **overrides) -> PriorSpec:
    """Prior with slab variances matched to ``c`` for orthogonal standardized data.

    Uses g = N*c, b = 1/g, V = c together with r = 1e-4, nu = 5, Q = 4; any
    keyword in ``overrides`` replaces the matched value.
    """
    g = N * c
    base = {
        "ssvs": (SSVS, {"r": 1e-4, "V": c}),
        "nmig": (NMIG, {"r": 1e-4, "nu": 5.0, "Q": 4.0}),
        "dirac-i": (DiracI, {"c": c}),
        "dirac-g": (DiracG, {"g": g}),
        "dirac-f": (DiracF, {"b": 1.0 / g}),
    }
    try:
        cls, params = base[name]
    except KeyError:
        raise ValueError(f"unknown prior {name!r}; expected one of {PRIOR_NAMES}") from None
    allowed = set(cls.__dataclass_fields__)
    params.update({k: v for k, v in overrides.items() if k in allowed and v is not None})
    return cls(**params)


# ---------------------------------------------------------------------------
# chain containers

@dataclass
class ChainState:
    mu: float
    alpha: np.ndarray
    delta: np.ndarray
    omega: float
    sigma2: float
    psi: Optional[np.ndarray] = None

    @property
    def d1(self) -> int:
        return int(self.delta.sum())


@dataclass
class McmcConfig:
    M: int = 5000
    burn_in: int = 1000
    full_model_warmup: int = 500
    seed: Optional[int] = 0
    store_traces: bool = True

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("M must be at least 1")
        if self.burn_in < 0 or self.full_model_warmup < 0:
            raise ValueError("burn_in and full_model_warmup must be non-negative")
        if self.full_model_warmup > self.burn_in:
            raise ValueError("full_model_warmup cannot exceed burn_in")

    @classmethod
    def long_preset(cls, seed=0, store_traces=True):
        """Chain lengths used for continuous spikes on real data (50000/10000/5000)."""
        return cls(M=50000, burn_in=10000, full_model_warmup=5000, seed=seed,
                   store_traces=store_traces)


@dataclass
class ChainOutput:
    """Draws stored after burn-in.

    ``incl_prob`` holds the conditional inclusion probabilities computed in
    the indicator step of every stored iteration; their column means are the
    Rao-Blackwellized posterior inclusion probabilities.
    """

    incl_prob: np.ndarray
    delta_draws: np.ndarray
    alpha_draws: Optional[np.ndarray]
    sigma2_draws: Optional[np.ndarray]
    omega_draws: Optional[np.ndarray]
    wall_time_seconds: float
    prior: Optional[PriorSpec] = None
    final_state: Optional[ChainState] = None

    @property
    def M(self) -> int:
        return self.incl_prob.shape[0]

    @property
    def d(self) -> int:
        return self.incl_prob.shape[1]

    def inclusion_probabilities(self) -> np.ndarray:
        return self.incl_prob.mean(axis=0)

    def indicator_frequencies(self) -> np.ndarray:
        return self.delta_draws.mean(axis=0)
