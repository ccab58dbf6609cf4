"""The four classifiers and a shared training configuration."""

from dataclasses import dataclass

from .forest import ForestModel, Tree, forest_predict_proba, train_random_forest
from .linear import (LinearModel, TrainingError, linear_decision, logistic_objective,
                     squared_hinge_objective, train_linear_svm, train_logreg)
from .naive_bayes import NbModel, nb_predict_proba, train_nb

MODEL_NAMES = ("logreg", "svm", "nb", "rf")


@dataclass(frozen=True)
class TrainConfig:
    lr_max_iter: int = 500
    lr_tol: float = 1e-4
    lr_reg_c: float = 1.0
    svm_max_iter: int = 5000
    svm_tol: float = 1e-4
    svm_reg_c: float = 1.0
    nb_alpha: float = 1.0
    rf_trees: int = 150
    rf_seed: int = 42
    rf_n_jobs: int = 1

    def __post_init__(self):
        for name, value in vars(self).items():
            if name != "rf_seed" and value <= 0 and not (name == "rf_n_jobs" and value == -1):
                raise ValueError(f"{name} must be positive")


def train(name: str, X, y, cfg: TrainConfig = TrainConfig()):
    """Train the classifier called ``name`` (one of MODEL_NAMES)."""
    if name == "logreg":
        return train_logreg(X, y, cfg.lr_reg_c, cfg.lr_tol, cfg.lr_max_iter)
    if name == "svm":
        return train_linear_svm(X, y, cfg.svm_reg_c, cfg.svm_tol, cfg.svm_max_iter)
    if name == "nb":
        return train_nb(X, y, cfg.nb_alpha)
    if name == "rf":
        return train_random_forest(X, y, cfg.rf_trees, cfg.rf_seed, n_jobs=cfg.rf_n_jobs)
    raise ValueError(f"unknown model {name!r}; choose from {', '.join(MODEL_NAMES)}")


def scores(model, X):
    """Probability of class 1 where the model has one, else None."""
    if isinstance(model, (NbModel, ForestModel)):
        return model.predict_proba(X)[:, 1]
    if isinstance(model, LinearModel) and model.kind == "logistic":
        return model.predict_proba(X)[:, 1]
    return None


__all__ = [
    "ForestModel", "LinearModel", "MODEL_NAMES", "NbModel", "TrainConfig", "TrainingError",
    "Tree", "forest_predict_proba", "linear_decision", "logistic_objective", "nb_predict_proba",
    "scores", "squared_hinge_objective", "train", "train_linear_svm", "train_logreg", "train_nb",
    "train_random_forest",
]
