import numpy as np
import pandas as pd
import pytest
from sklearn.base import clone
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler
from sklearn.utils.estimator_checks import parametrize_with_checks

from spikeslab import SpikeSlabRegressor


@pytest.fixture(scope="module")
def problem():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(60, 5))
    y = 3.0 + X @ [2.0, 0.0, -1.5, 0.0, 0.0] + 0.5 * rng.normal(size=60)
    return X, y


def fast(**kw):
    return SpikeSlabRegressor(n_iter=500, burn_in=100, full_model_warmup=50,
                              random_state=0, **kw)


@pytest.mark.parametrize("prior", ["ssvs", "nmig", "dirac-i", "dirac-g", "dirac-f"])
def test_selects_true_support(problem, prior):
    X, y = problem
    est = fast(prior=prior).fit(X, y)
    assert est.get_support().tolist() == [True, False, True, False, False]
    assert est.transform(X).shape == (60, 2)
    assert est.score(X, y) > 0.9
    assert est.intercept_ == pytest.approx(3.0, abs=0.3)


def test_params_round_trip():
    est = SpikeSlabRegressor(prior="dirac-g", g=25.0, n_iter=100)
    params = est.get_params()
    assert params["g"] == 25.0 and params["prior"] == "dirac-g"
    assert clone(est).get_params() == params


def test_feature_names(problem):
    X, y = problem
    frame = pd.DataFrame(X, columns=list("abcde"))
    est = fast().fit(frame, y)
    assert est.report_.names == list("abcde")
    assert est.get_feature_names_out().tolist() == ["a", "c"]


def test_reproducible(problem):
    X, y = problem
    a = fast().fit(X, y).inclusion_probabilities_
    b = fast().fit(X, y).inclusion_probabilities_
    assert np.array_equal(a, b)


def test_pipeline(problem):
    X, y = problem
    pipe = make_pipeline(StandardScaler(), fast()).fit(X, y)
    assert pipe.predict(X).shape == (60,)


def test_unknown_prior(problem):
    X, y = problem
    with pytest.raises(ValueError):
        fast(prior="horseshoe").fit(X, y)


@parametrize_with_checks([SpikeSlabRegressor(n_iter=60, burn_in=20, full_model_warmup=10,
                                             random_state=0)])
def test_sklearn_compatible(estimator, check):
    check(estimator)
