"""Limited-memory BFGS for smooth convex objectives."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass
class OptimizeResult:
    x: np.ndarray
    fun: float
    grad: np.ndarray
    n_iter: int
    converged: bool
    message: str

    @property
    def grad_norm(self) -> float:
        return float(np.max(np.abs(self.grad))) if self.grad.size else 0.0


def lbfgs(fun_grad: Callable[[np.ndarray], tuple[float, np.ndarray]], x0: np.ndarray,
          tol: float = 1e-4, max_iter: int = 500, history: int = 10,
          hess_diag: np.ndarray | None = None,
          ftol: float = 64 * np.finfo(float).eps, max_backtrack: int = 50) -> OptimizeResult:
    """Minimize ``fun_grad`` from ``x0``.

    Stops when the gradient's max-norm drops to ``tol`` or after
    ``max_iter`` iterations.  It also stops, unconverged, once a step
    lowers ``f`` by less than ``ftol`` relative to its size: past that
    point rounding noise dominates and no tolerance can be reached.
    Steps use backtracking on the Armijo condition; curvature pairs with
    ``s.y <= 0`` are discarded.

    ``hess_diag`` is an optional positive estimate of the Hessian diagonal.
    It seeds the inverse-Hessian approximation, which helps a lot when the
    coordinates have very different scales.
    """
    x = np.array(x0, dtype=np.float64)
    inv_d = None if hess_diag is None else 1.0 / np.asarray(hess_diag, dtype=np.float64)
    f, g = fun_grad(x)
    pairs: deque = deque(maxlen=history)
    c1 = 1e-4

    for it in range(max_iter):
        if np.max(np.abs(g)) <= tol:
            return OptimizeResult(x, f, g, it, True, "gradient below tolerance")

        # two-loop recursion
        q = g.copy()
        alphas = []
        for s, y, rho in reversed(pairs):
            a = rho * s.dot(q)
            alphas.append(a)
            q -= a * y
        if inv_d is not None:
            if pairs:
                s, y, _ = pairs[-1]
                q *= inv_d * (s.dot(y) / y.dot(inv_d * y))
            else:
                q *= inv_d
        elif pairs:
            s, y, _ = pairs[-1]
            q *= s.dot(y) / y.dot(y)
        else:
            q /= max(np.linalg.norm(g), 1.0)
        for (s, y, rho), a in zip(pairs, reversed(alphas)):
            b = rho * y.dot(q)
            q += (a - b) * s
        direction = -q

        slope = g.dot(direction)
        if slope >= 0:
            # lost descent; restart from steepest descent
            pairs.clear()
            direction = -g / max(np.linalg.norm(g), 1.0)
            slope = g.dot(direction)

        step = 1.0
        for _ in range(max_backtrack):
            x_new = x + step * direction
            f_new, g_new = fun_grad(x_new)
            if f_new <= f + c1 * step * slope:
                break
            step *= 0.5
        else:
            return OptimizeResult(x, f, g, it, False, "line search failed")

        s = x_new - x
        y = g_new - g
        sy = s.dot(y)
        if sy > 1e-12 * max(1.0, y.dot(y)):
            pairs.append((s, y, 1.0 / sy))
        f_old = f
        x, f, g = x_new, f_new, g_new
        if f_old - f <= ftol * max(abs(f_old), abs(f), 1.0):
            done = np.max(np.abs(g)) <= tol
            return OptimizeResult(x, f, g, it + 1, bool(done),
                                  "gradient below tolerance" if done else "relative reduction below ftol")

    converged = np.max(np.abs(g)) <= tol
    return OptimizeResult(x, f, g, max_iter, bool(converged),
                          "gradient below tolerance" if converged else "max_iter reached")
