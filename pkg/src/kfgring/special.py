"""Special functions and small numerical kernels.

Everything here is pure and works on plain floats; ``jacobi_poly`` also
accepts numpy arrays for ``x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, NoBracket

ROOT_TOL = 1e-12
QUAD_RTOL = 1e-10


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def jacobi_poly(n: int, a: float, b: float, x):
    """Jacobi polynomial P_n^{(a,b)}(x) by the three-term recurrence."""
    if n < 0 or int(n) != n:
        raise DomainError(f"degree must be a nonnegative integer, got {n!r}")
    if a <= -1 or b <= -1:
        raise DomainError(f"Jacobi parameters must exceed -1, got a={a}, b={b}")
    x = np.asarray(x, dtype=float) if not np.isscalar(x) else float(x)
    p_prev = 1.0 + 0.0 * x
    if n == 0:
        return p_prev
    p = (a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0)
    for k in range(2, int(n) + 1):
        s = 2 * k + a + b
        c1 = 2.0 * k * (k + a + b) * (s - 2.0)
        c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b)
        c3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s
        p_prev, p = p, (c2 * p - c3 * p_prev) / c1
    return p


def hyp2f1_terminating(n: int, B: float, C: float, x: float) -> float:
    """2F1(-n, B; C; x) summed term by term (n + 1 terms)."""
    if n < 0 or int(n) != n:
        raise DomainError(f"n must be a nonnegative integer, got {n!r}")
    total = 1.0
    term = 1.0
    for k in range(int(n)):
        denom = C + k
        if denom == 0.0:
            raise DomainError(f"2F1 parameter C={C} hits a pole before the series terminates")
        term *= (-n + k) * (B + k) / (denom * (k + 1)) * x
        total += term
    return total


def hyp_weight_integral(n: int, d: float, l: float) -> float:
    """Closed form of int_0^1 (1-z)^{2(d+1)} z^{2l-1} [2F1(-n, 2(d+l+1)+n; 2l+1; z)]^2 dz.

    Valid for d > -3/2 and l > 0.
    """
    if not (d > -1.5 and l > 0):
        raise DomainError(f"need d > -3/2 and l > 0, got d={d}, l={l}")
    log_val = (
        math.log(n + d + 1)
        + log_gamma(n + 1.0)
        + log_gamma(n + 2 * d + 2)
        + log_gamma(2 * l)
        + log_gamma(2 * l + 1)
        - math.log(n + d + l + 1)
        - log_gamma(n + 2 * l + 1)
        - log_gamma(2 * (d + l + 1) + n)
    )
    return math.exp(log_val)


@dataclass(frozen=True)
class Quadrature:
    nodes: tuple[float, ...]
    weights: tuple[float, ...]
    order: int


@lru_cache(maxsize=64)
def gauss_legendre(order: int) -> Quadrature:
    if order < 1:
        raise DomainError(f"quadrature order must be positive, got {order}")
    x, w = np.polynomial.legendre.leggauss(order)
    return Quadrature(tuple(x.tolist()), tuple(w.tolist()), order)


def _apply(f, x: np.ndarray) -> np.ndarray:
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape == x.shape:
            return y
    except (TypeError, ValueError):
        pass
    return np.array([f(float(t)) for t in x], dtype=float)


def _gl(f, lo: float, hi: float, rule: tuple[np.ndarray, np.ndarray]) -> float:
    x, w = rule
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    return half * float(np.dot(w, _apply(f, mid + half * x)))


def integrate(
    f: Callable,
    lo: float,
    hi: float,
    order: int = 20,
    rtol: float = QUAD_RTOL,
    max_depth: int = 40,
) -> float:
    """Adaptive composite Gauss-Legendre integral of ``f`` over [lo, hi].

    Panels are bisected until the one-panel and two-panel estimates agree to
    ``rtol`` relative to the running total.  ``f`` may be vectorized; scalar
    callables are mapped element by element.
    """
    if not lo < hi:
        raise DomainError(f"integrate requires lo < hi, got [{lo}, {hi}]")
    q = gauss_legendre(order)
    rule = (np.asarray(q.nodes), np.asarray(q.weights))
    whole = _gl(f, lo, hi, rule)
    scale = abs(whole)
    total = 0.0
    stack = [(lo, hi, whole, 0)]
    while stack:
        a, b, est, depth = stack.pop()
        m = 0.5 * (a + b)
        left = _gl(f, a, m, rule)
        right = _gl(f, m, b, rule)
        refined = left + right
        scale = max(scale, abs(refined))
        share = (b - a) / (hi - lo)
        if abs(refined - est) <= rtol * max(scale, 1e-300) * max(share, 1e-3) or depth >= max_depth:
            total += refined
        else:
            stack.append((a, m, left, depth + 1))
            stack.append((m, b, right, depth + 1))
    return total


def find_root_bracketed(
    g: Callable[[float], float], lo: float, hi: float, tol: float = ROOT_TOL
) -> float:
    """Root of ``g`` inside [lo, hi]; requires a sign change.

    Brent's method keeps the bracket at every step, so convergence is
    guaranteed once the endpoint signs differ.
    """
    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if not (np.isfinite(glo) and np.isfinite(ghi)) or glo * ghi > 0:
        raise NoBracket(f"no sign change on [{lo}, {hi}]: g={glo:.3e}, {ghi:.3e}")
    return brentq(g, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500)
