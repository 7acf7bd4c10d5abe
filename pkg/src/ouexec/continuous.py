"""Closed-form optimal liquidation schedule in continuous time.

The optimal strategy is an initial block p*, an absolutely continuous part
with rate zeta*_r, and a terminal block q*. Everything is parametrized by
a scalar multiplier lambda* that enforces the selling constraint: the
first-order condition per unit time reads

    P(xi_r) = exp(-e^{-2 b r} y) * lambda / alpha,   P(x) = e^{-ax}(1 - ax)

and lambda* is the root of a scalar equation H(lambda) = 0 obtained by
substituting the implied schedule back into the constraint. H is strictly
decreasing with H(0) > 0, so the root is found by bisection plus a Newton
polish with the analytic derivative.

xi_r is the (shifted) log of the expected price along the optimal path:
E[S_r] = e^{F+y} exp(e^{-2 b r} y - a xi_r). The cumulative sales process
is eta_r = xi_r - (1 + e^{-2 b r}) y / a + z / a.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import zero_vol
from .errors import ConfigError, NumericalError, RegimeError
from .model import MarketState, ModelParams, Regime, classify, derive
from .numerics import adaptive_quad, bisect_vec, fixed_quad, newton_polish
from .strategy import ExecutionStrategy, assemble_optimal

_FLAT_ZONE = 0.1  # stay on pure bisection within this * (1/alpha) of the flat point 2/alpha


def p_eval(x, alpha: float):
    """Per-unit price response P(x) = e^{-alpha x}(1 - alpha x)."""
    if alpha <= 0.0:
        raise ConfigError("alpha must be positive")
    x = np.asarray(x, dtype=float)
    out = np.exp(-alpha * x) * (1.0 - alpha * x)
    return float(out) if out.ndim == 0 else out


def _p_derivative(x, alpha: float):
    return -alpha * np.exp(-alpha * x) * (2.0 - alpha * x)


def p_inverse(q, alpha: float):
    """Inverse of P on its decreasing branch x <= 2/alpha.

    P maps (-inf, 2/alpha] onto [-e^{-2}, inf); q below -e^{-2} has no
    preimage. Bisection brackets the root, Newton finishes except within
    the flat zone near 2/alpha where the derivative vanishes and bisection
    alone is already accurate (|P - q| <= |P'| * width).
    """
    if alpha <= 0.0:
        raise ConfigError("alpha must be positive")
    scalar = np.isscalar(q)
    q = np.atleast_1d(np.asarray(q, dtype=float))
    floor = -math.exp(-2.0)
    if np.any(q < floor - 1e-12):
        raise ConfigError("value below the minimum of the price response")
    q = np.maximum(q, floor)

    hi = np.full_like(q, 2.0 / alpha)
    lo = np.zeros_like(q)
    big = q > 1.0
    if np.any(big):
        lo[big] = -(np.log(q[big]) + 1.0) / alpha

    lo, hi = bisect_vec(lambda x: p_eval(x, alpha) - q, lo, hi, iters=45)
    x = 0.5 * (lo + hi)

    safe = (2.0 / alpha - x) > _FLAT_ZONE / alpha
    for _ in range(6):
        if not np.any(safe):
            break
        r = p_eval(x[safe], alpha) - q[safe]
        step = r / _p_derivative(x[safe], alpha)
        x[safe] = np.clip(x[safe] - step, lo[safe], hi[safe])

    resid = np.abs(p_eval(x, alpha) - q)
    if np.any(resid > 1e-12 * np.maximum(1.0, np.abs(q))):
        raise NumericalError("price response inversion did not converge")
    return float(x[0]) if scalar else x


def xi_star(params: ModelParams, state: MarketState, lam: float, r):
    """Optimal log expected-price deviation at times r for multiplier lam."""
    d = derive(params, state)
    scalar = np.isscalar(r)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    g = np.exp(-np.exp(-2.0 * params.beta * r) * d.y)
    out = p_inverse(g * lam / params.alpha, params.alpha)
    out = np.atleast_1d(out)
    return float(out[0]) if scalar else out


def eta_star(params: ModelParams, state: MarketState, lam: float, r):
    """Cumulative amount sold by time r on the optimal path."""
    d = derive(params, state)
    scalar = np.isscalar(r)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    a = params.alpha
    out = (xi_star(params, state, lam, r)
           - (1.0 + np.exp(-2.0 * params.beta * r)) * d.y / a + d.z / a)
    return float(out[0]) if scalar else out


def zeta_star(params: ModelParams, state: MarketState, lam: float, r, form: str = "reduced"):
    """Optimal selling rate at times r.

    form="reduced" uses the algebraically simplified expression; form
    ="direct" differentiates eta* term by term, carrying lam explicitly.
    The two must agree to roundoff; keeping both guards the derivation.
    """
    d = derive(params, state)
    scalar = np.isscalar(r)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    a, b, y = params.alpha, params.beta, d.y
    decay2 = np.exp(-2.0 * b * r)
    xi = xi_star(params, state, lam, r)
    if form == "reduced":
        out = b * xi + 2.0 * b * y * decay2 / (a * (2.0 - a * xi))
    elif form == "direct":
        inv_slope = np.exp(a * xi) / (a * (a * xi - 2.0))  # d P^{-1} / dq
        out = b * xi + 2.0 * b * lam * decay2 * y * inv_slope * np.exp(-decay2 * y) / a + 2.0 * b * y * decay2 / a
    else:
        raise ConfigError(f"unknown zeta form {form!r}")
    return float(out[0]) if scalar else out


def _xi_integral(params: ModelParams, state: MarketState, lam: float,
                 panels: int | None = None):
    """integral of xi*_r over [0, t]; adaptive unless a panel count is pinned."""
    f = lambda r: xi_star(params, state, lam, r)
    t = params.horizon
    if panels is None:
        return adaptive_quad(f, 0.0, t, rel_tol=1e-13, abs_tol=1e-15)
    return fixed_quad(f, 0.0, t, panels=panels)


def h_eval(params: ModelParams, state: MarketState, lam: float,
           panels: int | None = None) -> float:
    """Constraint mismatch H(lam); the optimal multiplier is its unique root.

    H(0) = alpha * exp(beta t - alpha phi + z - y) > 0 and H is strictly
    decreasing, with slope <= -1 everywhere.
    """
    d = derive(params, state)
    a = params.alpha
    if a <= 0.0:
        raise ConfigError("alpha must be positive")
    if lam < 0.0:
        raise ConfigError("the multiplier is nonnegative")
    j = _xi_integral(params, state, lam, panels=panels)
    return a * math.exp(a * params.beta * j - a * state.holdings + d.z - d.y) - lam


def _h_derivative(params: ModelParams, state: MarketState, lam: float,
                  panels: int) -> float:
    d = derive(params, state)
    a, b = params.alpha, params.beta

    def jprime(r):
        r = np.asarray(r, dtype=float)
        g = np.exp(-np.exp(-2.0 * b * r) * d.y)
        xi = p_inverse(g * lam / a, a)
        return np.exp(a * xi) / (a * (a * xi - 2.0)) * g / a

    jp = fixed_quad(jprime, 0.0, params.horizon, panels=panels)
    h = h_eval(params, state, lam, panels=panels)
    return (h + lam) * a * b * jp - 1.0


def solve_lambda_star(params: ModelParams, state: MarketState,
                      tol: float = 1e-10, extended: bool = False,
                      bracket_hint: tuple[float, float] | None = None) -> float:
    """Root of H.

    Standard mode requires phi > max(z, 1 + beta)/alpha, which guarantees
    the root lies in (0, alpha e^{-y}). Extended mode accepts any phi
    (including zero, for round-trip analysis) and grows the bracket by
    doubling until H changes sign; monotonicity makes that terminate.
    A caller sweeping nearby instances can pass bracket_hint to skip the
    wide initial bracket; it is validated and ignored if stale.
    """
    d = derive(params, state)
    a = params.alpha
    if a <= 0.0:
        raise ConfigError("alpha must be positive")
    if not extended:
        regime = classify(params, state)
        if regime is not Regime.LARGE_HOLDINGS:
            raise RegimeError(
                f"closed form requires phi > max(z, 1+beta)/alpha; regime is {regime.value}")

    hi = a * math.exp(-d.y)
    # pin the quadrature resolution once so every bisection step sees the
    # same discretization of the xi integral
    _, panels = adaptive_quad(lambda r: xi_star(params, state, 0.5 * hi, r),
                              0.0, params.horizon, rel_tol=1e-13, abs_tol=1e-15,
                              return_panels=True)
    panels = max(panels, 8)
    h = lambda lam: h_eval(params, state, lam, panels=panels)

    bracket = None
    if bracket_hint is not None:
        lo_h, hi_h = max(bracket_hint[0], 0.0), bracket_hint[1]
        if hi_h > lo_h and h(hi_h) <= 0.0 <= h(lo_h):
            bracket = (lo_h, hi_h)
    if bracket is None:
        f_hi = h(hi)
        if extended:
            doublings = 0
            while f_hi > 0.0:
                hi *= 2.0
                f_hi = h(hi)
                doublings += 1
                if doublings > 200:
                    raise NumericalError("no sign change found for the multiplier equation")
        elif f_hi > 0.0:
            raise NumericalError("expected sign change on (0, alpha e^{-y}) not found")
        bracket = (0.0, hi)

    lo_b, hi_b = bracket
    for _ in range(80):
        mid = 0.5 * (lo_b + hi_b)
        if h(mid) > 0.0:
            lo_b = mid
        else:
            hi_b = mid
        if hi_b - lo_b <= 1e-6 * max(1.0, hi_b):
            break

    lam = newton_polish(h, lambda lam: _h_derivative(params, state, lam, panels),
                        0.5 * (lo_b + hi_b), lo_b, hi_b,
                        target=1e-13 * max(1.0, hi_b))
    resid = abs(h(lam))
    if resid > tol * max(1.0, lam):
        raise NumericalError(f"multiplier residual {resid:.3e} above tolerance {tol:.1e}")
    return float(lam)


def reference_multiplier(params: ModelParams, state: MarketState) -> float | None:
    """Continuous multiplier when one exists: solved in the large-holdings
    regime, mapped from the degenerate solver at sigma = 0, None otherwise."""
    regime = classify(params, state)
    if regime is Regime.LARGE_HOLDINGS:
        return solve_lambda_star(params, state)
    if regime is Regime.ZERO_VOL:
        d = derive(params, state)
        zv = zero_vol.solve(params, state)
        return params.alpha * float(p_eval(zv.p_star - d.z / params.alpha, params.alpha))
    return None


@dataclass(frozen=True)
class ContinuousSchedule:
    """Optimal schedule sampled on a uniform grid over [0, t].

    times has grid_points + 1 boundary entries; xi, eta, zeta and
    expected_price align with it. density_integral is the adaptively
    integrated zeta*, so p_star + density_integral + q_star recovers phi
    to quadrature accuracy rather than grid accuracy.
    """

    regime: Regime
    lambda_star: float | None
    p_star: float
    q_star: float
    times: np.ndarray
    xi: np.ndarray
    eta: np.ndarray
    zeta: np.ndarray
    expected_price: np.ndarray
    density_integral: float
    value: float
    strategy: ExecutionStrategy
    extended: bool = False


def _expected_price_on_path(params: ModelParams, state: MarketState, xi, r):
    d = derive(params, state)
    decay2 = np.exp(-2.0 * params.beta * np.asarray(r, dtype=float))
    return math.exp(params.fundamental_log + d.y) * np.exp(decay2 * d.y - params.alpha * xi)


def value(params: ModelParams, state: MarketState, tol: float = 1e-10) -> float:
    """Best attainable expected terminal cash for the current regime.

    Small holdings and zero volatility have simple closed forms; large
    holdings evaluates the block-decomposition formula at the solved
    multiplier. The gap regime has no closed form and falls back to the
    n = 2000 discrete solver (a numeric approximation, not a formula);
    schedule() is the API that refuses the gap outright.
    """
    regime = classify(params, state)
    a = params.alpha
    d0 = derive(params, state)
    if d0.z <= 2.0 * d0.y:
        raise RegimeError(
            f"z = {d0.z:.6g} <= 2y = {2.0 * d0.y:.6g}: no closed-form value "
            "outside the standing assumption z > 2y")
    if regime is Regime.SMALL_HOLDINGS:
        return state.cash + state.price * _bf(state.holdings, a)
    if regime is Regime.ZERO_VOL:
        return zero_vol.solve(params, state).value
    if regime is Regime.GAP:
        from . import discrete
        n = 2000
        lam = discrete.solve_lambda_hat(params, state, n, bracket="expand")
        psi = discrete.recover_psi(params, state, n, lam, check=False)
        if float(np.min(psi)) < -1e-10 * max(1.0, state.holdings):
            raise NumericalError(
                "gap-regime fallback: the stationary allocation leaves the "
                "admissible set; no value available")
        resid = float(np.max(np.abs(discrete.gradient(params, state, psi, n) - lam)))
        if resid > 1e-8 * max(1.0, lam):
            raise NumericalError(
                f"gap-regime fallback stationarity residual {resid:.3e} too large")
        return discrete.discrete_value(params, state, psi, n)
    lam = solve_lambda_star(params, state, tol=tol)
    d = derive(params, state)
    p_star = float(xi_star(params, state, lam, 0.0)) + (d.z - 2.0 * d.y) / a
    j = _xi_integral(params, state, lam)
    q_star = (state.holdings - params.beta * j
              - float(xi_star(params, state, lam, params.horizon))
              - d.z / a + d.y * (1.0 + math.exp(-2.0 * params.beta * params.horizon)) / a)
    return value_block_form(params, state, lam, p_star, q_star)


def value_block_form(params: ModelParams, state: MarketState, lam: float, p_star: float,
                     q_star: float) -> float:
    """Expected cash of the optimal schedule, block-decomposition form.

    Initial block, gradual part and terminal block are valued separately;
    the non-martingale drift correction enters through an integral of
    xi* e^{-alpha eta*}, done adaptively.
    """
    d = derive(params, state)
    a, b, t = params.alpha, params.beta, params.horizon
    s = state.price

    def kernel(r):
        r = np.asarray(r, dtype=float)
        xi = xi_star(params, state, lam, r)
        decay2 = np.exp(-2.0 * b * r)
        return xi * np.exp(decay2 * d.y - a * xi)

    grad = adaptive_quad(kernel, 0.0, t, rel_tol=1e-13, abs_tol=1e-15)
    eta_t = float(eta_star(params, state, lam, t))
    v = s * _bf(p_star, a)
    v += s * (math.exp(-a * p_star) - math.exp(-a * eta_t)) / a
    v += s * b * math.exp(d.y - d.z) * grad
    v += s * math.exp(-a * eta_t) * _bf(q_star, a)
    return state.cash + v


def value_flow_form(params: ModelParams, state: MarketState, lam: float) -> float:
    """Same value through the aggregate-constraint route.

    Uses only the total phi and the running xi integral; the blocks never
    appear individually. Agreement with value() validates both algebra
    paths.
    """
    d = derive(params, state)
    a, b, t = params.alpha, params.beta, params.horizon
    j = _xi_integral(params, state, lam)

    def kernel(r):
        r = np.asarray(r, dtype=float)
        xi = xi_star(params, state, lam, r)
        decay2 = np.exp(-2.0 * b * r)
        return xi * np.exp(params.fundamental_log - a * xi + (1.0 + decay2) * d.y)

    grad = adaptive_quad(kernel, 0.0, t, rel_tol=1e-13, abs_tol=1e-15)
    v = (state.price / a) * (1.0 - math.exp(-a * state.holdings + a * b * j))
    return state.cash + v + b * grad


def _bf(p: float, alpha: float) -> float:
    return p if alpha == 0.0 else -math.expm1(-alpha * p) / alpha


def schedule(params: ModelParams, state: MarketState, grid_points: int = 1000,
             tol: float = 1e-10, extended: bool = False,
             bracket_hint: tuple[float, float] | None = None) -> ContinuousSchedule:
    """Full optimal schedule for the current regime.

    Large holdings: closed form via the multiplier. Zero volatility:
    delegated to the degenerate solver (constant rate). Small holdings:
    sell everything immediately. The gap between the small- and
    large-holdings conditions has no closed form and raises RegimeError
    unless extended=True, which evaluates the same formulas without
    optimality guarantees.
    """
    d = derive(params, state)
    a, b, t = params.alpha, params.beta, params.horizon
    phi, s = state.holdings, state.price
    regime = classify(params, state)
    if d.z <= 2.0 * d.y and not extended:
        # blocks turn into purchases here; only extended mode may proceed
        raise RegimeError(
            f"z = {d.z:.6g} <= 2y = {2.0 * d.y:.6g}: the standard schedule "
            "is only optimal under z > 2y (extended=True evaluates the "
            "formulas anyway, without optimality claims)")
    times = np.linspace(0.0, t, grid_points + 1)

    if regime is Regime.ZERO_VOL and not extended:
        zv = zero_vol.solve(params, state)
        lam = a * float(p_eval(zv.p_star - d.z / a, a))
        xi = np.full_like(times, zv.p_star - d.z / a)
        eta = np.full_like(times, zv.p_star)
        zeta = np.full_like(times, zv.zeta_star)
        price = _expected_price_on_path(params, state, xi, times)
        strategy = assemble_optimal(zv.p_star, zeta[:-1], zv.q_star, t)
        return ContinuousSchedule(
            regime=regime, lambda_star=lam, p_star=zv.p_star, q_star=zv.q_star,
            times=times, xi=xi, eta=eta, zeta=zeta, expected_price=price,
            density_integral=zv.zeta_star * t, value=zv.value,
            strategy=strategy, extended=False)

    if regime is Regime.SMALL_HOLDINGS and not extended:
        # selling pressure never outweighs the depressed price: one block now
        xi = np.full_like(times, np.nan)
        zeta = np.zeros_like(times)
        eta = np.full_like(times, phi)
        decay = np.exp(-b * times)
        decay2 = np.exp(-2.0 * b * times)
        price = math.exp(params.fundamental_log + d.y) * np.exp(
            decay * d.z - decay2 * d.y - a * phi)
        strategy = assemble_optimal(phi, zeta[:-1], 0.0, t)
        val = state.cash + s * _bf(phi, a)
        return ContinuousSchedule(
            regime=regime, lambda_star=None, p_star=phi, q_star=0.0,
            times=times, xi=xi, eta=eta, zeta=zeta, expected_price=price,
            density_integral=0.0, value=val, strategy=strategy, extended=False)

    if regime is Regime.GAP and not extended:
        raise RegimeError(
            "holdings fall between the small- and large-holdings conditions; "
            "no closed form applies (use the discrete approximation)")

    lam = solve_lambda_star(params, state, tol=tol, extended=extended,
                            bracket_hint=bracket_hint)
    xi = xi_star(params, state, lam, times)
    eta = eta_star(params, state, lam, times)
    zeta = zeta_star(params, state, lam, times)
    price = _expected_price_on_path(params, state, xi, times)
    p_star = float(xi[0] + (d.z - 2.0 * d.y) / a)
    j = _xi_integral(params, state, lam)
    q_star = float(phi - b * j - xi[-1] - d.z / a + d.y * (1.0 + math.exp(-2.0 * b * t)) / a)
    dens_int = adaptive_quad(lambda r: zeta_star(params, state, lam, r),
                             0.0, t, rel_tol=1e-13, abs_tol=1e-15)
    mids = 0.5 * (times[:-1] + times[1:])
    strategy = assemble_optimal(p_star, zeta_star(params, state, lam, mids),
                                q_star, t, extended_mode=extended)
    val = value_block_form(params, state, lam, p_star, q_star)
    return ContinuousSchedule(
        regime=regime, lambda_star=lam, p_star=p_star, q_star=q_star,
        times=times, xi=xi, eta=eta, zeta=zeta, expected_price=price,
        density_integral=dens_int, value=val, strategy=strategy,
        extended=extended)
