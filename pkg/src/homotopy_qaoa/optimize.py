"""Limited-memory BFGS with the exact stopping rules the harness relies on.

The objective interface is ``f(x) -> (value, gradient)`` on flat float
vectors.  Termination fires on whichever criterion is met first, checked in
the order gradient / absolute / relative; the relative test uses
``|f_k - f_{k-1}| <= rel_tol * max(|f_k|, 1)``.  The domain is unbounded and
steps that increase the objective are tolerated when ``allow_increase`` is
set; the best-seen iterate, not the last, is always returned.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .exceptions import NumericalError

GRAD_TOL = "grad_tol"
ABS_TOL = "abs_tol"
REL_TOL = "rel_tol"
MAX_ITERS = "max_iters"

_WOLFE_C1 = 1e-4
_WOLFE_C2 = 0.9


@dataclass(frozen=True)
class OptimizerConfig:
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    grad_tol: float = 1e-9  # infinity norm of the gradient
    max_iters: int = 10000
    allow_increase: bool = True
    history_size: int = 10

    def __post_init__(self):
        if min(self.abs_tol, self.rel_tol, self.grad_tol) <= 0:
            raise ValueError("all tolerances must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.history_size < 1:
            raise ValueError("history_size must be at least 1")


@dataclass
class OptimizationResult:
    params_star: np.ndarray
    energy_star: float
    iterations: int
    converged_by: str  # grad_tol | abs_tol | rel_tol | max_iters
    energy_trace: list[float] = field(default_factory=list)


def _validate(x, fx, gx, best):
    if not (np.isfinite(fx) and np.all(np.isfinite(gx))):
        raise NumericalError(
            f"objective returned non-finite values at x={x!r}", best=best
        )


def _two_loop_direction(gx, s_hist, y_hist, rho_hist):
    q = gx.copy()
    alphas = []
    for s, y, rho in zip(reversed(s_hist), reversed(y_hist), reversed(rho_hist)):
        a = rho * np.dot(s, q)
        alphas.append(a)
        q -= a * y
    if s_hist:
        s, y = s_hist[-1], y_hist[-1]
        q *= np.dot(s, y) / np.dot(y, y)
    for (s, y, rho), a in zip(zip(s_hist, y_hist, rho_hist), reversed(alphas)):
        b = rho * np.dot(y, q)
        q += (a - b) * s
    return -q


def _zoom(f, x, d, phi0, dphi0, a_lo, phi_lo, a_hi, best, max_iters=30):
    """Bisection zoom of the strong-Wolfe bracket [a_lo, a_hi]."""
    for _ in range(max_iters):
        a = 0.5 * (a_lo + a_hi)
        xa = x + a * d
        fa, ga = f(xa)
        _validate(xa, fa, ga, best)
        if fa > phi0 + _WOLFE_C1 * a * dphi0 or fa >= phi_lo:
            a_hi = a
        else:
            da = np.dot(ga, d)
            if abs(da) <= -_WOLFE_C2 * dphi0:
                return a, fa, ga, True
            if da * (a_hi - a_lo) >= 0:
                a_hi = a_lo
            a_lo, phi_lo = a, fa
        if abs(a_hi - a_lo) < 1e-16:
            break
    xa = x + a_lo * d
    fa, ga = f(xa)
    _validate(xa, fa, ga, best)
    return a_lo, fa, ga, False


def _line_search(f, x, fx, gx, d, best, max_iters=25):
    """Strong-Wolfe search along d; returns (step, f, g, satisfied)."""
    phi0, dphi0 = fx, float(np.dot(gx, d))
    a_prev, phi_prev = 0.0, phi0
    a = 1.0
    fa, ga = fx, gx
    for i in range(1, max_iters + 1):
        xa = x + a * d
        fa, ga = f(xa)
        _validate(xa, fa, ga, best)
        if fa > phi0 + _WOLFE_C1 * a * dphi0 or (i > 1 and fa >= phi_prev):
            return _zoom(f, x, d, phi0, dphi0, a_prev, phi_prev, a, best)
        da = float(np.dot(ga, d))
        if abs(da) <= -_WOLFE_C2 * dphi0:
            return a, fa, ga, True
        if da >= 0:
            return _zoom(f, x, d, phi0, dphi0, a, fa, a_prev, best)
        a_prev, phi_prev = a, fa
        a *= 2.0
    return a, fa, ga, False


def minimize(f, x0, cfg: OptimizerConfig = OptimizerConfig()) -> OptimizationResult:
    """Minimize ``f`` from ``x0``; deterministic given (f, x0, cfg)."""
    x = np.asarray(x0, dtype=np.float64).copy()
    fx, gx = f(x)
    gx = np.asarray(gx, dtype=np.float64)
    _validate(x, fx, gx, best=None)

    trace = [float(fx)]
    best_x, best_f = x.copy(), float(fx)
    converged_by = MAX_ITERS
    iterations = 0

    if float(np.max(np.abs(gx))) <= cfg.grad_tol:
        return OptimizationResult(best_x, best_f, 0, GRAD_TOL, trace)

    s_hist: deque = deque(maxlen=cfg.history_size)
    y_hist: deque = deque(maxlen=cfg.history_size)
    rho_hist: deque = deque(maxlen=cfg.history_size)

    for iterations in range(1, cfg.max_iters + 1):
        d = _two_loop_direction(gx, s_hist, y_hist, rho_hist)
        if np.dot(d, gx) >= 0:  # curvature breakdown: restart from steepest descent
            s_hist.clear()
            y_hist.clear()
            rho_hist.clear()
            d = -gx.copy()
        step, fn, gn, ok = _line_search(f, x, fx, gx, d, best=(best_x, best_f))
        gn = np.asarray(gn, dtype=np.float64)
        if not ok and not cfg.allow_increase:
            converged_by = ABS_TOL  # no acceptable step: progress is exhausted
            break
        xn = x + step * d
        if step == 0.0 or np.array_equal(xn, x):
            converged_by = ABS_TOL
            break

        s, y = xn - x, gn - gx
        sy = float(np.dot(s, y))
        if sy > 1e-10 * float(np.linalg.norm(s) * np.linalg.norm(y)):
            s_hist.append(s)
            y_hist.append(y)
            rho_hist.append(1.0 / sy)

        prev_f, x, fx, gx = fx, xn, fn, gn
        trace.append(float(fx))
        if fx < best_f:
            best_x, best_f = x.copy(), float(fx)

        if float(np.max(np.abs(gx))) <= cfg.grad_tol:
            converged_by = GRAD_TOL
            break
        df = abs(fx - prev_f)
        if df <= cfg.abs_tol:
            converged_by = ABS_TOL
            break
        if df <= cfg.rel_tol * max(abs(fx), 1.0):
            converged_by = REL_TOL
            break

    energy_star, g_star = f(best_x)  # re-evaluated at return, by contract
    _validate(best_x, energy_star, np.asarray(g_star, dtype=np.float64), best=(best_x, best_f))
    return OptimizationResult(best_x, float(energy_star), iterations, converged_by, trace)
