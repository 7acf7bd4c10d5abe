"""Round-trip viability analysis under extended (buy-permitting) strategies.

When purchases are allowed, the schedule formulas extend to any phi,
including phi = 0: sell high early, buy back cheap at the horizon. The
expected profit of that round trip admits an analytic lower bound

    (s/alpha) { 1 - (1+beta t) e^{y-z} lambda*/alpha
                + beta e^{y-z} int_0^t exp(e^{-2 b r} y - alpha xi*_r) dr }

which itself dominates the simpler (s/alpha) L(z) with

    L(z) = 1 - (1 + beta t + z) exp(-beta t z / (1 + beta t)) + beta t e^{-z-1}.

L crosses zero (near z ~ 3.31 for beta = t = 1) and tends to 1 as z grows,
so a sufficiently large gap between market price and fundamental value
makes manipulation profitable. Every manipulation this module reports is
certified twice: the analytic bound must be positive AND the exact
proceeds evaluator must confirm positive profit on the concrete strategy.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import continuous
from .errors import ConfigError
from .model import MarketState, ModelParams, derive
from .numerics import adaptive_quad
from .proceeds import expected_proceeds


def l_eval(z, beta: float = 1.0, horizon: float = 1.0):
    """Asymptotic profitability indicator L(z); positive means profitable."""
    bt = beta * horizon
    if bt <= 0.0:
        raise ConfigError("beta and horizon must be positive")
    z = np.asarray(z, dtype=float)
    out = 1.0 - (1.0 + bt + z) * np.exp(-bt * z / (1.0 + bt)) + bt * np.exp(-z - 1.0)
    return float(out) if out.ndim == 0 else out


def l_root(beta: float = 1.0, horizon: float = 1.0, lo: float = 1e-6,
           hi: float = 50.0) -> float:
    """Smallest positive root of L by bisection (L < 0 at 0+, L -> 1)."""
    f_lo, f_hi = l_eval(lo, beta, horizon), l_eval(hi, beta, horizon)
    if not (f_lo < 0.0 < f_hi):
        raise ConfigError("root not bracketed; widen [lo, hi]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if l_eval(mid, beta, horizon) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def extended_schedule(params: ModelParams, state: MarketState,
                      grid_points: int = 1000,
                      bracket_hint: tuple[float, float] | None = None):
    """Schedule formulas evaluated without the large-holdings condition.

    Components may be negative (purchases); no optimality among
    nonnegative strategies is claimed.
    """
    return continuous.schedule(params, state, grid_points=grid_points,
                               extended=True, bracket_hint=bracket_hint)


@dataclass(frozen=True)
class RoundTripBound:
    bound: float          # quadrature evaluation of the profit lower bound
    weak_bound: float     # (s/alpha) L(z)
    lambda_star: float    # extended multiplier at phi = 0


def round_trip_profit_bound(params: ModelParams, state: MarketState,
                            bracket_hint: tuple[float, float] | None = None) -> RoundTripBound:
    """Analytic lower bound on the expected profit of the phi = 0 round trip."""
    if abs(state.holdings) > 1e-12:
        raise ConfigError("round trips require phi = 0")
    d = derive(params, state)
    a, b, t = params.alpha, params.beta, params.horizon
    lam = continuous.solve_lambda_star(params, state, extended=True,
                                       bracket_hint=bracket_hint)

    def kernel(r):
        r = np.asarray(r, dtype=float)
        xi = continuous.xi_star(params, state, lam, r)
        return np.exp(np.exp(-2.0 * b * r) * d.y - a * xi)

    integral = adaptive_quad(kernel, 0.0, t, rel_tol=1e-12, abs_tol=1e-15)
    shrink = math.exp(d.y - d.z)
    bound = (state.price / a) * (1.0 - (1.0 + b * t) * shrink * lam / a
                                 + b * shrink * integral)
    weak = (state.price / a) * float(l_eval(d.z, b, t))
    return RoundTripBound(bound=float(bound), weak_bound=float(weak),
                          lambda_star=float(lam))


@dataclass(frozen=True)
class ManipulationReport:
    z_values: np.ndarray
    l_values: np.ndarray
    profit_bounds: np.ndarray
    verified_profits: np.ndarray
    first_profitable_z: float | None


def _scan_grid(z_range: tuple[float, float], points: int) -> np.ndarray:
    lo, hi = float(z_range[0]), float(z_range[1])
    if not (hi > lo):
        raise ConfigError("z_range must satisfy lo < hi")
    if points < 2:
        raise ConfigError("scan needs at least two points")
    if lo > 0.0:
        return np.geomspace(lo, hi, points)
    # log-spaced offsets above lo so the grid still starts exactly at lo
    u = np.linspace(0.0, 1.0, points)
    return lo + (hi - lo) * (np.power(10.0, u) - 1.0) / 9.0


def scan(params: ModelParams, state: MarketState, z_range: tuple[float, float],
         points: int = 200, grid_points: int = 400) -> ManipulationReport:
    """Sweep the price-fundamental gap z and certify round-trip profits.

    For each z the market price is reset to e^{F+z} with zero holdings,
    the extended schedule is solved, and the profit is both bounded
    analytically and verified exactly by the proceeds evaluator on the
    assembled strategy. first_profitable_z reports the smallest scanned z
    certified both ways: analytic bound > 0 and verified profit > 0.
    """
    if abs(state.holdings) > 1e-12:
        raise ConfigError("scan operates on round trips; set phi = 0")
    zs = _scan_grid(z_range, points)
    l_vals = np.asarray(l_eval(zs, params.beta, params.horizon))
    bounds = np.empty(points)
    profits = np.empty(points)
    hint = None
    for i, z in enumerate(zs):
        price = math.exp(params.fundamental_log + z)
        st = MarketState(cash=state.cash, holdings=0.0, price=price)
        rtb = round_trip_profit_bound(params, st, bracket_hint=hint)
        bounds[i] = rtb.bound
        sched = extended_schedule(params, st, grid_points=grid_points,
                                  bracket_hint=(0.5 * rtb.lambda_star,
                                                2.0 * rtb.lambda_star))
        profits[i] = expected_proceeds(params, st, sched.strategy) - state.cash
        hint = (0.5 * rtb.lambda_star, 2.0 * rtb.lambda_star)

    certified = np.flatnonzero((bounds > 0.0) & (profits > 0.0))
    first = float(zs[certified[0]]) if certified.size else None
    if certified.size and np.any(profits[certified[0]:] <= 0.0):
        warnings.warn("verified profit not monotone above first_profitable_z",
                      RuntimeWarning, stacklevel=2)
    return ManipulationReport(z_values=zs, l_values=l_vals, profit_bounds=bounds,
                              verified_profits=profits, first_profitable_z=first)
