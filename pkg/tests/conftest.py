import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ouexec import MarketState, ModelParams

settings.register_profile(
    "default",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

E = 2.718281828459045


@pytest.fixture
def zv_params():
    return ModelParams(alpha=1.0, beta=1.0, sigma=0.0, fundamental_log=0.0, horizon=1.0)


@pytest.fixture
def ou_params():
    return ModelParams(alpha=1.0, beta=1.0, sigma=0.2, fundamental_log=0.0, horizon=1.0)


@pytest.fixture
def ref_state():
    # phi = 3, price = e, so z = 1 against F = 0
    return MarketState(cash=0.0, holdings=3.0, price=E)


def random_large_instance(rng: np.random.Generator):
    """Desk-scale LargeHoldings instance: moderate impact/reversion/vol.

    Margins keep z > 2y + 0.2 and phi 5%-150% above the regime boundary so
    classification is unambiguous and the solver well inside its domain.
    """
    alpha = rng.uniform(0.5, 2.0)
    beta = rng.uniform(0.5, 1.5)
    sigma = rng.uniform(0.0, 0.3)
    F = rng.uniform(-0.5, 0.5)
    t = rng.uniform(0.5, 1.0)
    y = sigma * sigma / (4.0 * beta)
    z = rng.uniform(2.0 * y + 0.2, 2.5)
    phi = max(z, 1.0 + beta) / alpha * rng.uniform(1.05, 2.5)
    w = rng.uniform(-1.0, 1.0)
    params = ModelParams(alpha=alpha, beta=beta, sigma=sigma,
                         fundamental_log=F, horizon=t)
    state = MarketState(cash=w, holdings=phi, price=float(np.exp(F + z)))
    return params, state


def random_small_instance(rng: np.random.Generator):
    """SmallHoldings instance: phi strictly below (z - 2y)/alpha."""
    alpha = rng.uniform(0.5, 2.0)
    beta = rng.uniform(0.5, 1.5)
    sigma = rng.uniform(0.0, 0.3)
    F = rng.uniform(-0.5, 0.5)
    t = rng.uniform(0.5, 1.0)
    y = sigma * sigma / (4.0 * beta)
    z = rng.uniform(2.0 * y + 0.3, 2.5)
    phi = (z - 2.0 * y) / alpha * rng.uniform(0.1, 0.95)
    w = rng.uniform(-1.0, 1.0)
    params = ModelParams(alpha=alpha, beta=beta, sigma=sigma,
                         fundamental_log=F, horizon=t)
    state = MarketState(cash=w, holdings=phi, price=float(np.exp(F + z)))
    return params, state
