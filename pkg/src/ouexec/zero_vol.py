"""Optimal schedule when volatility is zero.

With sigma = 0 the expected-price exponent loses its curvature term and
the optimal selling rate is constant: an initial block p*, a flat rate
zeta* = beta (p* - z/alpha), and a terminal block q*. p* solves the
strictly increasing scalar equation

    C(p) = exp(alpha (1 + beta t) p - alpha phi - beta t z) + alpha p - z - 1 = 0

on the bracket [z/alpha, (alpha phi + beta t z) / (alpha (1 + beta t))]:
the left endpoint is where the flat rate would vanish, the right endpoint
is where the terminal block would, and C changes sign between them
whenever phi > z/alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, NumericalError, RegimeError
from .model import MarketState, ModelParams, derive
from .numerics import newton_polish


@dataclass(frozen=True)
class ZeroVolSchedule:
    p_star: float
    zeta_star: float
    q_star: float
    value: float


def c_eval(params: ModelParams, state: MarketState, p: float) -> float:
    """Optimality residual for the initial block size p."""
    d = derive(params, state)
    a, bt = params.alpha, params.beta * params.horizon
    if a <= 0.0:
        raise ConfigError("alpha must be positive")
    return math.exp(a * (1.0 + bt) * p - a * state.holdings - bt * d.z) + a * p - d.z - 1.0


def solve(params: ModelParams, state: MarketState, tol: float = 1e-12) -> ZeroVolSchedule:
    """p*, zeta*, q* and the schedule value for the no-noise model."""
    d = derive(params, state)
    a, b, t = params.alpha, params.beta, params.horizon
    phi, s = state.holdings, state.price
    if a <= 0.0:
        raise ConfigError("alpha must be positive")
    if params.sigma != 0.0:
        raise RegimeError("this solver requires sigma = 0")
    if phi <= d.z / a:
        raise RegimeError("requires phi > z/alpha; smaller holdings sell in one block")

    lo = d.z / a
    hi = (a * phi + b * t * d.z) / (a * (1.0 + b * t))
    c = lambda p: c_eval(params, state, p)
    dc = lambda p: a * (1.0 + b * t) * math.exp(
        a * (1.0 + b * t) * p - a * phi - b * t * d.z) + a

    f_lo, f_hi = c(lo), c(hi)
    if not (f_lo < 0.0 < f_hi):
        raise NumericalError("bracket endpoints did not straddle the root")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if c(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, abs(hi)):
            break
    p_star = newton_polish(c, dc, 0.5 * (lo + hi), lo, hi, target=1e-15)
    if abs(c(p_star)) > tol:
        raise NumericalError(f"block-size residual {abs(c(p_star)):.3e} above {tol:.1e}")

    zeta = b * (p_star - d.z / a)
    q_star = phi - p_star - t * zeta
    val = (state.cash
           + (1.0 - math.exp(-a * (p_star + q_star))) * s / a
           + t * s * math.exp(-a * p_star) * zeta)
    return ZeroVolSchedule(p_star=float(p_star), zeta_star=float(zeta),
                           q_star=float(q_star), value=float(val))
