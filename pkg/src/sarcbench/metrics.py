"""Binary classification metrics: confusion counts, per-class scores, ROC/AUC."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionMatrix2:
    tn: int
    fp: int
    fn: int
    tp: int

    @property
    def total(self) -> int:
        return self.tn + self.fp + self.fn + self.tp

    def as_array(self) -> np.ndarray:
        """Rows are true labels, columns predicted labels."""
        return np.array([[self.tn, self.fp], [self.fn, self.tp]])


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int = 0


@dataclass(frozen=True)
class RocCurve:
    fpr: tuple[float, ...]
    tpr: tuple[float, ...]
    thresholds: tuple[float, ...]
    auc: float

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.fpr, self.tpr))


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    per_class: dict = field(default_factory=dict)  # {0: ClassMetrics, 1: ClassMetrics}
    confusion: ConfusionMatrix2 | None = None
    roc: RocCurve | None = None

    def to_dict(self) -> dict:
        d = {
            "accuracy": self.accuracy,
            "per_class": {str(c): asdict(m) for c, m in sorted(self.per_class.items())},
            "confusion": asdict(self.confusion),
            "roc": None,
        }
        if self.roc is not None:
            d["roc"] = {"fpr": list(self.roc.fpr), "tpr": list(self.roc.tpr),
                        # the leading +inf threshold has no JSON spelling
                        "thresholds": [None if np.isinf(t) else t for t in self.roc.thresholds],
                        "auc": self.roc.auc}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EvalReport":
        roc = d.get("roc")
        return cls(
            accuracy=d["accuracy"],
            per_class={int(c): ClassMetrics(**m) for c, m in d["per_class"].items()},
            confusion=ConfusionMatrix2(**d["confusion"]),
            roc=None if roc is None else RocCurve(
                tuple(roc["fpr"]), tuple(roc["tpr"]),
                tuple(np.inf if t is None else t for t in roc["thresholds"]), roc["auc"]),
        )


def _binary(y, name: str) -> np.ndarray:
    y = np.asarray(y)
    if y.ndim != 1:
        raise MetricError(f"{name} must be one-dimensional")
    if not np.isin(y, (0, 1)).all():
        raise MetricError(f"{name} may only contain labels 0 and 1")
    return y.astype(np.int64)


def confusion(y_true, y_pred) -> ConfusionMatrix2:
    t = _binary(y_true, "y_true")
    p = _binary(y_pred, "y_pred")
    if len(t) != len(p):
        raise MetricError("y_true and y_pred differ in length")
    tn, fp, fn, tp = np.bincount(2 * t + p, minlength=4).tolist()
    return ConfusionMatrix2(tn, fp, fn, tp)


def _ratio(a: int, b: int) -> float:
    return a / b if b else 0.0


def class_metrics(cm: ConfusionMatrix2, positive: int = 1) -> ClassMetrics:
    """Precision, recall and F1 treating ``positive`` as the positive class.

    Any ratio with a zero denominator is reported as 0.
    """
    if positive == 1:
        tp, fp, fn = cm.tp, cm.fp, cm.fn
    elif positive == 0:
        tp, fp, fn = cm.tn, cm.fn, cm.fp
    else:
        raise MetricError("positive must be 0 or 1")
    p = _ratio(tp, tp + fp)
    r = _ratio(tp, tp + fn)
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return ClassMetrics(p, r, f1, tp + fn)


def accuracy(cm: ConfusionMatrix2) -> float:
    return _ratio(cm.tn + cm.tp, cm.total)


def roc(y_true, scores) -> RocCurve:
    """ROC curve with one point per distinct score, plus the origin.

    The area is taken by the trapezoidal rule, which for this point set
    equals the Mann-Whitney statistic (ties count one half).
    """
    y = _binary(y_true, "y_true")
    s = np.asarray(scores, dtype=np.float64)
    if s.shape != y.shape:
        raise MetricError("scores and y_true differ in shape")
    if not np.all(np.isfinite(s)):
        raise MetricError("scores must be finite")
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise MetricError("ROC needs both classes present")

    order = np.argsort(-s, kind="mergesort")
    s_sorted = s[order]
    y_sorted = y[order]
    # last index of each run of equal scores
    ends = np.flatnonzero(np.diff(s_sorted) != 0)
    ends = np.append(ends, len(s_sorted) - 1)
    tps = np.cumsum(y_sorted)[ends]
    fps = (ends + 1) - tps
    tpr = np.concatenate([[0.0], tps / n_pos])
    fpr = np.concatenate([[0.0], fps / n_neg])
    thresholds = np.concatenate([[np.inf], s_sorted[ends]])
    # integer trapezoids: sum (dfp) * (tp_prev + tp) / 2, normalised once at the end
    tp_i = np.concatenate([[0], tps])
    fp_i = np.concatenate([[0], fps])
    area = np.sum(np.diff(fp_i) * (tp_i[1:] + tp_i[:-1])) / 2.0
    auc = float(area / (n_pos * n_neg))
    return RocCurve(tuple(fpr.tolist()), tuple(tpr.tolist()), tuple(thresholds.tolist()), auc)


def mann_whitney_auc(y_true, scores) -> float:
    """P(score of a positive > score of a negative) + P(tie) / 2, by pair count."""
    y = np.asarray(y_true)
    s = np.asarray(scores, dtype=np.float64)
    pos = s[y == 1][:, None]
    neg = s[y == 0][None, :]
    return float(((pos > neg).sum() + 0.5 * (pos == neg).sum()) / (pos.size * neg.size))


def evaluate(y_true, y_pred, scores=None) -> EvalReport:
    cm = confusion(y_true, y_pred)
    return EvalReport(
        accuracy=accuracy(cm),
        per_class={0: class_metrics(cm, 0), 1: class_metrics(cm, 1)},
        confusion=cm,
        roc=None if scores is None else roc(y_true, scores),
    )
