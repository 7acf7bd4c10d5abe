"""Quadrature and root-finding kernels used by the solvers.

Gauss-Legendre nodes come from numpy; the integrands in this package are
smooth inside each panel, so composite rules converge fast and the adaptive
driver just doubles the panel count until two successive estimates agree.
Root finding is bracketed bisection followed by a safeguarded Newton polish,
which stays robust when the derivative degenerates at a bracket endpoint.
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from .errors import NumericalError

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gl_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    if order not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(order)
        _GL_CACHE[order] = (x, w)
    return _GL_CACHE[order]


def panel_nodes(a: float, b: float, panels: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """All nodes and weights of a composite rule on [a, b], flattened."""
    x, w = gl_nodes(order)
    edges = np.linspace(a, b, panels + 1)
    half = np.diff(edges) / 2.0
    mids = (edges[:-1] + edges[1:]) / 2.0
    nodes = (mids[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def fixed_quad(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
               panels: int = 1, order: int = 16) -> float:
    """Composite Gauss-Legendre integral with a fixed panel count."""
    if a == b:
        return 0.0
    nodes, weights = panel_nodes(a, b, panels, order)
    return float(np.dot(weights, np.asarray(f(nodes), dtype=float)))


def adaptive_quad(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                  rel_tol: float = 1e-11, abs_tol: float = 1e-14,
                  order: int = 16, max_panels: int = 4096,
                  return_panels: bool = False):
    """Refine a composite Gauss-Legendre rule until two estimates agree.

    Doubles the panel count until |new - old| <= rel_tol*|new| + abs_tol.
    """
    if a == b:
        return (0.0, 1) if return_panels else 0.0
    panels = 2
    prev = fixed_quad(f, a, b, panels, order)
    while panels < max_panels:
        panels *= 2
        cur = fixed_quad(f, a, b, panels, order)
        if abs(cur - prev) <= rel_tol * abs(cur) + abs_tol:
            return (cur, panels) if return_panels else cur
        prev = cur
    raise NumericalError(f"quadrature did not settle within {max_panels} panels")


def bisect(f: Callable[[float], float], lo: float, hi: float,
           width: float = 1e-8, max_iter: int = 200,
           f_lo: Optional[float] = None, f_hi: Optional[float] = None) -> tuple[float, float]:
    """Shrink a sign-changing bracket [lo, hi] to the given width."""
    f_lo = f(lo) if f_lo is None else f_lo
    f_hi = f(hi) if f_hi is None else f_hi
    if f_lo == 0.0:
        return lo, lo
    if f_hi == 0.0:
        return hi, hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise NumericalError(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        if hi - lo <= width:
            break
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid, mid
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    return lo, hi


def newton_polish(f: Callable[[float], float], df: Callable[[float], float],
                  x0: float, lo: float, hi: float,
                  target: float = 1e-13, max_iter: int = 30) -> float:
    """Newton iterations confined to [lo, hi], keeping the best residual."""
    x = x0
    best_x, best_r = x, abs(f(x))
    for _ in range(max_iter):
        r = f(x)
        if abs(r) < best_r:
            best_x, best_r = x, abs(r)
        if abs(r) <= target:
            return x
        d = df(x)
        if d == 0.0 or not np.isfinite(d):
            break
        step = r / d
        x_new = x - step
        if not (lo <= x_new <= hi):
            x_new = 0.5 * (x + (hi if x_new > hi else lo))
        if x_new == x:
            break
        x = x_new
    return best_x


def bisect_vec(f: Callable[[np.ndarray], np.ndarray], lo: np.ndarray, hi: np.ndarray,
               iters: int = 80) -> tuple[np.ndarray, np.ndarray]:
    """Elementwise bisection; requires sign(f(lo)) != sign(f(hi)) per element.

    Returns the final (lo, hi) bracket so callers can polish inside it.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    f_lo = np.asarray(f(lo), dtype=float)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        f_mid = np.asarray(f(mid), dtype=float)
        take_lo = np.sign(f_mid) == np.sign(f_lo)
        lo = np.where(take_lo, mid, lo)
        f_lo = np.where(take_lo, f_mid, f_lo)
        hi = np.where(take_lo, hi, mid)
    return lo, hi


def expand_below(f: Callable[[np.ndarray], np.ndarray], hi: np.ndarray,
                 target: np.ndarray, step0: float = 1.0,
                 max_doublings: int = 120) -> np.ndarray:
    """Find lo <= hi with f(lo) >= target elementwise, for f decreasing in x."""
    hi = np.asarray(hi, dtype=float)
    target = np.asarray(target, dtype=float)
    step = np.full(np.broadcast(hi, target).shape, float(step0))
    lo = hi - step
    for _ in range(max_doublings):
        short = np.asarray(f(lo), dtype=float) < target
        if not np.any(short):
            return lo
        step = np.where(short, step * 2.0, step)
        lo = np.where(short, hi - step, lo)
    raise NumericalError("bracket expansion failed")
