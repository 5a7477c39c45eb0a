import numpy as np
import pytest

from ecbayes import (RandomStream, cox_like_ensemble, fit_reference, summarize)


@pytest.fixture(scope="session")
def cox_ensemble():
    return cox_like_ensemble()


@pytest.fixture(scope="session")
def cox_posterior(cox_ensemble):
    return fit_reference(cox_ensemble, draws=200000, rng=RandomStream(11))


@pytest.fixture(scope="session")
def cox_summary(cox_posterior):
    return summarize(cox_posterior)


@pytest.fixture
def rng():
    return RandomStream(123)


def make_line_ensemble(n=100, beta0=1.0, beta1=2.0, noise=0.1, seed=0):
    """Simple synthetic ensemble around a known line."""
    from ecbayes import Ensemble
    gen = np.random.default_rng(seed)
    x = gen.uniform(-1.0, 1.0, n)
    y = beta0 + beta1 * x + gen.normal(0.0, noise, n)
    return Ensemble(tuple(f"m{i}" for i in range(n)), x, y)
