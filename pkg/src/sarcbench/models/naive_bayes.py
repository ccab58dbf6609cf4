"""Multinomial naive Bayes over non-negative (possibly fractional) features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..sparse import CsrMatrix, ShapeError
from .linear import TrainingError


@dataclass
class NbModel:
    class_log_prior: np.ndarray  # (2,)
    feature_log_prob: np.ndarray  # (2, D)
    alpha: float = 1.0

    @property
    def n_features(self) -> int:
        return self.feature_log_prob.shape[1]

    def joint_log_likelihood(self, X: CsrMatrix) -> np.ndarray:
        if X.n_cols != self.n_features:
            raise ShapeError(f"model expects {self.n_features} features, got {X.n_cols}")
        return np.column_stack([X.dot(self.feature_log_prob[c]) for c in (0, 1)]) + self.class_log_prior

    def predict_proba(self, X: CsrMatrix) -> np.ndarray:
        jll = self.joint_log_likelihood(X)
        return np.exp(jll - np.logaddexp(jll[:, :1], jll[:, 1:]))

    def predict(self, X: CsrMatrix) -> np.ndarray:
        jll = self.joint_log_likelihood(X)
        # ties go to class 0
        return (jll[:, 1] > jll[:, 0]).astype(np.int64)


def train_nb(X: CsrMatrix, y, alpha: float = 1.0) -> NbModel:
    y = np.asarray(y)
    if X.n_rows != len(y):
        raise ShapeError("X and y differ in length")
    if X.nnz and X.values.min() < 0:
        raise ValueError("multinomial naive Bayes needs non-negative features")
    counts = np.bincount(y, minlength=2)
    if len(counts) > 2 or np.any(counts[:2] == 0):
        raise TrainingError("need both classes 0 and 1 to train")

    feature_counts = np.vstack([X.column_sums((y == c).astype(np.float64)) for c in (0, 1)])
    smoothed = feature_counts + alpha
    feature_log_prob = np.log(smoothed) - np.log(smoothed.sum(axis=1, keepdims=True))
    class_log_prior = np.log(counts) - np.log(counts.sum())
    return NbModel(class_log_prior, feature_log_prob, alpha)


def nb_predict_proba(m: NbModel, X: CsrMatrix) -> np.ndarray:
    return m.predict_proba(X)
