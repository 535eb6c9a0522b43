"""Bayesian variable selection in linear regression with spike-and-slab priors."""

from .analytic import (CorrelatedPairSetting, OrthogonalSetting, h_correlated_pair,
                       h_orthogonal, inclusion_probability_from_h,
                       inclusion_probability_integrated_omega)
from .diagnostics import (SelectionReport, effective_sample_size, iact_initial_monotone,
                          summarize)
from .estimator import SpikeSlabRegressor
from .marginal import (PosteriorMoments, log_conditional_marginal_likelihood,
                       log_marginal_likelihood, posterior_moments)
from .model import (NMIG, SSVS, ChainOutput, ChainState, Dataset, DiracF, DiracG, DiracI,
                    McmcConfig, default_prior, load_dataset)
from .samplers import run_continuous_spike_mcmc, run_dirac_spike_mcmc, run_mcmc
from .simulation import Scenario, generate_dataset, run_study

__version__ = "0.1.0"
