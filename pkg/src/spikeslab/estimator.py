"""scikit-learn compatible front end."""

from __future__ import annotations

from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.feature_selection import SelectorMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .diagnostics import summarize
from .model import PRIOR_NAMES, McmcConfig, default_prior, load_dataset
from .samplers import run_mcmc


class SpikeSlabRegressor(SelectorMixin, RegressorMixin, BaseEstimator):
    """Bayesian variable selection for linear regression with spike-and-slab priors.

    Parameters
    ----------
    prior : {"ssvs", "nmig", "dirac-i", "dirac-g", "dirac-f"}
        Spike-and-slab family.
    c : float
        Slab variance the other slabs are matched to (g = N*c, b = 1/g, V = c).
    g, b, V, r, nu, Q : float or None
        Explicit hyperparameters; ``None`` keeps the matched default.
    a_omega, b_omega : float
        Beta prior on the shared inclusion probability.
    n_iter, burn_in, full_model_warmup : int
        Stored iterations, discarded iterations and the number of initial
        burn-in iterations with every regressor included.
    random_state : int or None

    Attributes
    ----------
    inclusion_probabilities_ : ndarray of shape (n_features,)
        Rao-Blackwellized posterior inclusion probabilities.
    coef_ : ndarray of shape (n_features,)
        Posterior mean of the coefficients (Bayesian model average).
    intercept_ : float
    report_ : SelectionReport
    chain_ : ChainOutput
    """

    def __init__(self, prior="dirac-i", c=1.0, g=None, b=None, V=None, r=None, nu=None,
                 Q=None, a_omega=1.0, b_omega=1.0, n_iter=5000, burn_in=1000,
                 full_model_warmup=500, random_state=None):
        self.prior = prior
        self.c = c
        self.g = g
        self.b = b
        self.V = V
        self.r = r
        self.nu = nu
        self.Q = Q
        self.a_omega = a_omega
        self.b_omega = b_omega
        self.n_iter = n_iter
        self.burn_in = burn_in
        self.full_model_warmup = full_model_warmup
        self.random_state = random_state

    def _prior_spec(self, N):
        if self.prior not in PRIOR_NAMES:
            raise ValueError(f"prior must be one of {PRIOR_NAMES}, got {self.prior!r}")
        return default_prior(self.prior, N, c=self.c, g=self.g, b=self.b, V=self.V,
                             r=self.r, nu=self.nu, Q=self.Q, a_omega=self.a_omega,
                             b_omega=self.b_omega)

    def fit(self, X, y):
        X, y = validate_data(self, X, y, y_numeric=True)
        self.x_mean_ = X.mean(axis=0)
        data = load_dataset(y, X)
        self.prior_ = self._prior_spec(data.N)
        cfg = McmcConfig(M=self.n_iter, burn_in=self.burn_in,
                         full_model_warmup=self.full_model_warmup,
                         seed=self.random_state, store_traces=True)
        self.chain_ = run_mcmc(data, self.prior_, cfg)
        names = getattr(self, "feature_names_in_", None)
        self.report_ = summarize(self.chain_, names=None if names is None else list(names))
        self.inclusion_probabilities_ = self.report_.incl_prob_hat
        self.coef_ = self.chain_.alpha_draws.mean(axis=0)
        self.intercept_ = data.y_bar - float(self.x_mean_ @ self.coef_)
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = validate_data(self, X, reset=False)
        return X @ self.coef_ + self.intercept_

    def _get_support_mask(self):
        check_is_fitted(self, "inclusion_probabilities_")
        return self.inclusion_probabilities_ > 0.5
