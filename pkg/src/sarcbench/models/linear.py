"""L2-regularized logistic regression and squared-hinge linear SVM.

Both are fit in the primal with L-BFGS over ``[w, b]``; the bias is never
penalized.  Labels are mapped to -1/+1 internally.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..sparse import CsrMatrix, ShapeError
from .optimize import lbfgs

log = logging.getLogger(__name__)


class TrainingError(ValueError):
    pass


def _signed(y) -> np.ndarray:
    y = np.asarray(y)
    if set(np.unique(y).tolist()) != {0, 1}:
        raise TrainingError("need both classes 0 and 1 to train")
    return np.where(y == 1, 1.0, -1.0)


def _margins(X: CsrMatrix, w, b, ys) -> np.ndarray:
    return ys * (X.dot(w) + b)


def logistic_objective(theta: np.ndarray, X: CsrMatrix, ys: np.ndarray, C: float = 1.0):
    """Loss and gradient of sum log(1 + exp(-m_i)) + ||w||^2 / (2C).

    ``theta`` is ``[w..., b]`` and ``ys`` holds -1/+1 labels.
    """
    w, b = theta[:-1], theta[-1]
    m = _margins(X, w, b, ys)
    loss = np.logaddexp(0.0, -m).sum() + w.dot(w) / (2.0 * C)
    # d/dm log(1+e^-m) = -sigmoid(-m)
    coef = -ys * np.exp(-np.logaddexp(0.0, m))
    grad = np.empty_like(theta)
    grad[:-1] = X.tdot(coef) + w / C
    grad[-1] = coef.sum()
    return float(loss), grad


def squared_hinge_objective(theta: np.ndarray, X: CsrMatrix, ys: np.ndarray, C: float = 1.0):
    """Loss and gradient of ||w||^2 / 2 + C * sum max(0, 1 - m_i)^2."""
    w, b = theta[:-1], theta[-1]
    slack = np.maximum(0.0, 1.0 - _margins(X, w, b, ys))
    loss = 0.5 * w.dot(w) + C * slack.dot(slack)
    coef = -2.0 * C * slack * ys
    grad = np.empty_like(theta)
    grad[:-1] = X.tdot(coef) + w
    grad[-1] = coef.sum()
    return float(loss), grad


OBJECTIVES = {"logistic": logistic_objective, "svm": squared_hinge_objective}


def curvature_diagonal(kind: str, X: CsrMatrix, C: float) -> np.ndarray:
    """Cheap Hessian-diagonal bound for ``[w, b]``, used to precondition L-BFGS.

    Logistic curvature is at most 1/4 per sample; the squared hinge has
    curvature 2C on active samples.
    """
    sq = np.bincount(X.col_indices, weights=X.values ** 2, minlength=X.n_cols)
    if kind == "logistic":
        return np.append(0.25 * sq + 1.0 / C, 0.25 * X.n_rows)
    return np.append(2.0 * C * sq + 1.0, 2.0 * C * X.n_rows)


@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float
    kind: str
    meta: dict = field(default_factory=dict)

    @property
    def n_features(self) -> int:
        return len(self.weights)

    def decision_function(self, X: CsrMatrix) -> np.ndarray:
        if X.n_cols != self.n_features:
            raise ShapeError(f"model expects {self.n_features} features, got {X.n_cols}")
        return X.dot(self.weights) + self.bias

    def predict(self, X: CsrMatrix) -> np.ndarray:
        return (self.decision_function(X) > 0).astype(np.int64)

    def predict_proba(self, X: CsrMatrix) -> np.ndarray:
        if self.kind != "logistic":
            raise TypeError("only logistic models produce probabilities")
        s = self.decision_function(X)
        p1 = np.exp(-np.logaddexp(0.0, -s))
        return np.column_stack([1.0 - p1, p1])

    def objective(self, X: CsrMatrix, y, C: float = 1.0) -> float:
        theta = np.append(self.weights, self.bias)
        return OBJECTIVES[self.kind](theta, X, _signed(y), C)[0]


def linear_decision(m: LinearModel, X: CsrMatrix) -> np.ndarray:
    return m.decision_function(X)


def _train(kind: str, X: CsrMatrix, y, C: float, tol: float, max_iter: int) -> LinearModel:
    ys = _signed(y)
    if X.n_rows != len(ys):
        raise ShapeError("X and y differ in length")
    objective = OBJECTIVES[kind]
    res = lbfgs(lambda th: objective(th, X, ys, C), np.zeros(X.n_cols + 1),
                tol=tol, max_iter=max_iter, hess_diag=curvature_diagonal(kind, X, C))
    if not res.converged:
        if res.message == "relative reduction below ftol":
            log.warning("%s reached the rounding floor after %d iterations with |grad|max=%.3g "
                        "still above tol=%g", kind, res.n_iter, res.grad_norm, tol)
        else:
            log.warning("%s did not converge after %d iterations (%s, |grad|max=%.3g)",
                        kind, res.n_iter, res.message, res.grad_norm)
    meta = {"converged": res.converged, "n_iter": res.n_iter, "stop": res.message,
            "grad_norm": res.grad_norm, "objective": res.fun, "C": C}
    return LinearModel(res.x[:-1].copy(), float(res.x[-1]), kind, meta)


def train_logreg(X: CsrMatrix, y, C: float = 1.0, tol: float = 1e-4, max_iter: int = 500) -> LinearModel:
    return _train("logistic", X, y, C, tol, max_iter)


def train_linear_svm(X: CsrMatrix, y, C: float = 1.0, tol: float = 1e-4, max_iter: int = 5000) -> LinearModel:
    return _train("svm", X, y, C, tol, max_iter)
