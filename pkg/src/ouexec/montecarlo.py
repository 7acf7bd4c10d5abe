"""Monte Carlo validation of the exact proceeds formulas.

Paths use the exact transition of the mean-reverting log price over each
step (no Euler bias): conditional on the step start, the end point is
Gaussian with known mean and variance, and the within-step proceeds of a
constant selling rate have a closed conditional expectation. Accruing
that expectation instead of sampled prices removes all within-step noise
while leaving the estimator unbiased (tower property), and makes sigma=0
runs exactly deterministic: a single path reproduces the quadrature value
to roundoff.

Randomness comes from a counter-based generator seeded once; draws are
step-major (one vector of normals per step across all paths), so results
are bit-reproducible for a given (seed, paths, steps) triple regardless
of hardware.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .model import MarketState, ModelParams, derive
from .numerics import gl_nodes
from .strategy import ExecutionStrategy

_ACCRUAL_ORDER = 5


@dataclass(frozen=True)
class SimulationReport:
    paths: int
    mean_cash: float
    std_error: float
    seed: int
    elapsed: float


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _block_factor(p: float, alpha: float) -> float:
    if alpha == 0.0:
        return p
    return -math.expm1(-alpha * p) / alpha


def simulate(params: ModelParams, state: MarketState, strategy: ExecutionStrategy,
             paths: int = 100_000, steps: int = 1_000, seed: int = 0) -> SimulationReport:
    """Estimate expected terminal cash of a deterministic strategy.

    Blocks execute at the nearest step boundary (exact for schedules whose
    blocks sit at 0 and t). The selling rate is read off the strategy cell
    containing each step midpoint; aligned grids (cells dividing steps)
    incur no sampling error.
    """
    if paths < 1 or steps < 1:
        raise ConfigError("paths and steps must be positive")
    if steps % strategy.cells != 0:
        raise ConfigError("steps must be a multiple of the strategy grid cells")
    start = time.perf_counter()
    d = derive(params, state)
    a, b, sig = params.alpha, params.beta, params.sigma
    fund = params.fundamental_log
    t = strategy.horizon
    dt = t / steps
    y = d.y

    deterministic = sig == 0.0
    n_paths = 1 if deterministic else paths
    rng = None if deterministic else _rng(seed)

    # blocks grouped by the step boundary they land on
    boundary_blocks: dict[int, float] = {}
    for r, p in strategy.impulses:
        idx = int(round(r / dt))
        idx = min(max(idx, 0), steps)
        boundary_blocks[idx] = boundary_blocks.get(idx, 0.0) + p

    # within-step accrual: E[exp(X_{u})] given the step start, at GL nodes
    nodes, weights = gl_nodes(_ACCRUAL_ORDER)
    u = 0.5 * dt * (nodes + 1.0)
    k_u = np.exp(-b * u)
    w_u = 0.5 * dt * weights
    base_m = (1.0 - k_u) * fund + y * (1.0 - k_u ** 2)

    decay = math.exp(-b * dt)
    step_sd = 0.0 if deterministic else sig * math.sqrt((1.0 - decay ** 2) / (2.0 * b))

    cells = strategy.cells
    cell_of_step = np.minimum((np.floor((np.arange(steps) + 0.5) * dt
                                        / strategy.cell_width)).astype(int), cells - 1)
    dens = np.asarray(strategy.density)

    x = np.full(n_paths, fund + d.z)
    cash = np.full(n_paths, state.cash)

    for j in range(steps):
        p_here = boundary_blocks.get(j)
        if p_here:
            cash += np.exp(x) * _block_factor(p_here, a)
            x -= a * p_here
        zeta = float(dens[cell_of_step[j]])
        if zeta != 0.0:
            m_u = base_m - a * zeta * (1.0 - k_u) / b
            for i in range(_ACCRUAL_ORDER):
                cash += (w_u[i] * zeta) * np.exp(m_u[i] + k_u[i] * x)
        drift = (1.0 - decay) * fund - a * zeta * (1.0 - decay) / b
        if deterministic:
            x = decay * x + drift
        else:
            x = decay * x + drift + step_sd * rng.standard_normal(n_paths)

    p_end = boundary_blocks.get(steps)
    if p_end:
        cash += np.exp(x) * _block_factor(p_end, a)

    mean = float(np.mean(cash))
    se = 0.0 if n_paths == 1 else float(np.std(cash, ddof=1) / math.sqrt(n_paths))
    return SimulationReport(paths=n_paths, mean_cash=mean, std_error=se,
                            seed=seed, elapsed=time.perf_counter() - start)


def simulate_discrete(params: ModelParams, state: MarketState, x_alloc, n: int,
                      paths: int = 100_000, seed: int = 0) -> SimulationReport:
    """Estimate expected cash of an n-period allocation by sampling periods."""
    from .discrete import periods

    start = time.perf_counter()
    m, c = periods(params, n)
    x_alloc = np.asarray(x_alloc, dtype=float)
    if x_alloc.shape != (m,):
        raise ConfigError(f"allocation must have {m} entries for n={n}")
    d = derive(params, state)
    a, sig = params.alpha, params.sigma
    fund = params.fundamental_log

    deterministic = sig == 0.0
    n_paths = 1 if deterministic else paths
    rng = None if deterministic else _rng(seed)
    step_sd = 0.0 if deterministic else sig * math.sqrt(
        (1.0 - c * c) / (2.0 * params.beta))

    x = np.full(n_paths, fund + d.z)
    cash = np.full(n_paths, state.cash)
    for k in range(m):
        cash += np.exp(x) * _block_factor(float(x_alloc[k]), a)
        if deterministic:
            x = c * (x - a * x_alloc[k]) + (1.0 - c) * fund
        else:
            x = c * (x - a * x_alloc[k]) + (1.0 - c) * fund + step_sd * rng.standard_normal(n_paths)

    mean = float(np.mean(cash))
    se = 0.0 if n_paths == 1 else float(np.std(cash, ddof=1) / math.sqrt(n_paths))
    return SimulationReport(paths=n_paths, mean_cash=mean, std_error=se,
                            seed=seed, elapsed=time.perf_counter() - start)
