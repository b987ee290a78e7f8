"""L-BFGS minimizer with Armijo backtracking line search.

Tailored to the training objective's needs: limited memory (default
10), halving line search with c1 = 1e-4, convergence when the relative
objective decrease stays below ``eta`` for three consecutive
iterations, and a single steepest-descent restart before giving up.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError, TrainingError

_CONVERGENCE_WINDOW = 3
_MIN_STEP = 1e-20
_CURVATURE_EPS = 1e-12


@dataclass
class IterationLog:
    entries: list[tuple[int, float, float, float]] = field(default_factory=list)
    converged: bool = False
    iterations: int = 0

    def add(self, iteration: int, value: float, grad_norm: float, step: float):
        self.entries.append((iteration, value, grad_norm, step))


def _two_loop(grad, s_list, y_list):
    """Implicit product of the L-BFGS inverse Hessian with the gradient."""
    q = grad.copy()
    alphas = []
    rhos = [1.0 / float(np.dot(y, s)) for s, y in zip(s_list, y_list)]
    for s, y, rho in zip(reversed(s_list), reversed(y_list), reversed(rhos)):
        a = rho * float(np.dot(s, q))
        alphas.append(a)
        q -= a * y
    s, y = s_list[-1], y_list[-1]
    gamma = float(np.dot(s, y)) / float(np.dot(y, y))
    q *= gamma
    for (s, y, rho), a in zip(zip(s_list, y_list, rhos), reversed(alphas)):
        b = rho * float(np.dot(y, q))
        q += (a - b) * s
    return q


def minimize(fun, x0, *, memory: int = 10, eta: float = 1e-4,
             max_iterations: int = 500, c1: float = 1e-4):
    """Minimize ``fun`` (returning (value, gradient)) from ``x0``.

    Returns (x, IterationLog).  Raises a training error carrying the
    last iterate if the line search fails even after a memory reset,
    and a numeric error if the objective goes non-finite.
    """
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")
    if memory < 1:
        raise ValueError("memory must be >= 1")
    x = np.asarray(x0, dtype=float).copy()
    f, g = fun(x)
    _check_finite(f, g)
    log = IterationLog()
    s_list: list[np.ndarray] = []
    y_list: list[np.ndarray] = []
    flat_count = 0

    for iteration in range(1, max_iterations + 1):
        if s_list:
            direction = -_two_loop(g, s_list, y_list)
        else:
            direction = -g
        slope = float(np.dot(g, direction))
        if slope > 0:
            # not a descent direction; fall back to steepest descent
            s_list.clear()
            y_list.clear()
            direction = -g
            slope = -float(np.dot(g, g))

        step, f_new, g_new = _line_search(fun, x, f, direction, slope, c1)
        if step is None:
            if s_list:
                # restart once from steepest descent
                s_list.clear()
                y_list.clear()
                direction = -g
                slope = -float(np.dot(g, g))
                step, f_new, g_new = _line_search(fun, x, f, direction, slope, c1)
            if step is None:
                log.iterations = iteration
                raise TrainingError(
                    f"line search failed at iteration {iteration}",
                    weights=x, log=log)
        _check_finite(f_new, g_new)

        x_new = x + step * direction
        s = x_new - x
        y = g_new - g
        if float(np.dot(s, y)) > _CURVATURE_EPS:
            s_list.append(s)
            y_list.append(y)
            if len(s_list) > memory:
                s_list.pop(0)
                y_list.pop(0)

        decrease = f - f_new
        rel = decrease / max(abs(f), 1e-12)
        log.add(iteration, f_new, float(np.linalg.norm(g_new)), step)
        x, f, g = x_new, f_new, g_new

        flat_count = flat_count + 1 if rel < eta else 0
        if flat_count >= _CONVERGENCE_WINDOW:
            log.converged = True
            log.iterations = iteration
            return x, log

    log.iterations = max_iterations
    return x, log


def _line_search(fun, x, f, direction, slope, c1):
    step = 1.0
    while step >= _MIN_STEP:
        f_new, g_new = fun(x + step * direction)
        if np.isfinite(f_new) and f_new <= f + c1 * step * slope:
            return step, f_new, g_new
        step *= 0.5
    return None, None, None


def _check_finite(f, g):
    if not np.isfinite(f) or not np.all(np.isfinite(g)):
        raise NumericError("objective or gradient went non-finite")
