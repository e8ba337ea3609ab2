"""
Accuracy metrics for AoD-bin estimators.

``S_t`` is the spread of the training indicators around their mean; the
deviation of a constant mean predictor and of the network on the test split
are reported both raw and relative to ``S_t``. ROC curves pool every
(sample, bin) decision of a test split.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

from .errors import DegenerateLabels, EmptyBatch, InsufficientSamples


def _rows(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    return y[None, :] if y.ndim == 1 else y


def sample_variance(train_outputs) -> float:
    """Sum of squared deviations from the training mean, divided by N_t - 1."""
    y = _rows(train_outputs)
    if len(y) < 2:
        raise InsufficientSamples(f"need at least 2 training outputs, got {len(y)}")
    dev = y - y.mean(axis=0)
    return float(np.sum(dev * dev) / (len(y) - 1))


def baseline_deviation(test_outputs, train_mean) -> float:
    """Mean squared distance of test outputs from the training mean."""
    y = _rows(test_outputs)
    if len(y) == 0:
        raise EmptyBatch("no test outputs")
    dev = y - np.asarray(train_mean, dtype=float)
    return float(np.sum(dev * dev) / len(y))


def nn_deviation(test_outputs, predictions) -> float:
    """Mean squared error of raw scores against the 0/1 test indicators."""
    y = _rows(test_outputs)
    h = _rows(predictions)
    if len(y) == 0:
        raise EmptyBatch("no test outputs")
    if h.shape != y.shape:
        raise ValueError(f"predictions {h.shape} do not match outputs {y.shape}")
    dev = y - h
    return float(np.sum(dev * dev) / len(y))


@dataclass(frozen=True)
class EvalReport:
    s_t: float
    eta_v: float
    eta_nn: float
    rho_v: float
    rho_nn: float
    n_train: int
    n_test: int

    @classmethod
    def from_deviations(cls, s_t, eta_v, eta_nn, n_train, n_test) -> "EvalReport":
        if not s_t > 0:
            raise InsufficientSamples("training outputs have zero spread; ratios undefined")
        return cls(s_t, eta_v, eta_nn, eta_v / s_t, eta_nn / s_t, n_train, n_test)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d) -> "EvalReport":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__})


def evaluate_predictions(train_outputs, test_outputs, predictions) -> EvalReport:
    y_t = _rows(train_outputs)
    y_v = _rows(test_outputs)
    s_t = sample_variance(y_t)
    eta_v = baseline_deviation(y_v, y_t.mean(axis=0))
    eta_nn = nn_deviation(y_v, predictions)
    return EvalReport.from_deviations(s_t, eta_v, eta_nn, len(y_t), len(y_v))


@dataclass(frozen=True)
class RocCurve:
    p_f: np.ndarray
    p_d: np.ndarray
    thresholds: np.ndarray

    @property
    def points(self) -> List[Tuple[float, float]]:
        return list(zip(self.p_f.tolist(), self.p_d.tolist()))

    def auc(self) -> float:
        return float(np.sum(np.diff(self.p_f) * (self.p_d[1:] + self.p_d[:-1]) / 2))

    def pd_at(self, p_f_target: float) -> float:
        """P_D linearly interpolated at ``p_f_target`` along the curve."""
        pf, pd = self.p_f, self.p_d
        t = float(np.clip(p_f_target, 0.0, 1.0))
        i = int(np.searchsorted(pf, t, side="right")) - 1
        if pf[i] == t or i == len(pf) - 1:
            return float(pd[i])
        w = (t - pf[i]) / (pf[i + 1] - pf[i])
        return float(pd[i] + w * (pd[i + 1] - pd[i]))

    def check(self) -> None:
        """Raise AssertionError unless the curve is sorted, monotone and anchored."""
        assert np.all((self.p_f >= 0) & (self.p_f <= 1) & (self.p_d >= 0) & (self.p_d <= 1))
        assert np.all(np.diff(self.p_f) >= 0), "p_f not sorted"
        assert np.all(np.diff(self.p_d) >= 0), "p_d decreases along the curve"
        assert (self.p_f[0], self.p_d[0]) == (0.0, 0.0), "curve must start at (0, 0)"
        assert (self.p_f[-1], self.p_d[-1]) == (1.0, 1.0), "curve must end at (1, 1)"


def roc_curve(labels, scores) -> RocCurve:
    """Threshold sweep over all distinct scores, calling ``score >= t`` positive.

    Every (sample, bin) entry is one decision; labels of 1 are positives.
    Thresholds of +inf and -inf anchor the curve at (0, 0) and (1, 1).
    """
    labels = np.asarray(labels, dtype=float).ravel()
    scores = np.asarray(scores, dtype=float).ravel()
    if labels.shape != scores.shape:
        raise ValueError("labels and scores must have the same size")
    pos = labels == 1
    n_pos, n_neg = int(pos.sum()), int((~pos).sum())
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabels(f"need both classes, got {n_pos} positives and {n_neg} negatives")

    order = np.argsort(-scores, kind="stable")
    s_sorted = scores[order]
    tp = np.cumsum(pos[order])
    fp = np.cumsum(~pos[order])
    # last index of each run of equal scores
    ends = np.nonzero(np.r_[s_sorted[1:] != s_sorted[:-1], True])[0]
    thresholds = np.r_[np.inf, s_sorted[ends], -np.inf]
    p_d = np.r_[0.0, tp[ends] / n_pos, 1.0]
    p_f = np.r_[0.0, fp[ends] / n_neg, 1.0]

    keep = np.r_[True, (np.diff(p_f) != 0) | (np.diff(p_d) != 0)]
    return RocCurve(p_f[keep], p_d[keep], thresholds[keep])


@dataclass(frozen=True)
class Comparison:
    p_f: float
    p_d_a: float
    p_d_b: float

    @property
    def winner(self) -> str:
        if self.p_d_a > self.p_d_b:
            return "a"
        if self.p_d_b > self.p_d_a:
            return "b"
        return "tie"


def compare_at_pf(curve_a: RocCurve, curve_b: RocCurve, p_f_target: float = 0.1) -> Comparison:
    return Comparison(p_f_target, curve_a.pd_at(p_f_target), curve_b.pd_at(p_f_target))


# --------------------------------------------------------------------------
# persistence
# --------------------------------------------------------------------------

def _fmt(v: float) -> str:
    return repr(float(v))


def roc_to_csv(curve: RocCurve) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["threshold", "p_f", "p_d"])
    for t, f, d in zip(curve.thresholds, curve.p_f, curve.p_d):
        w.writerow([_fmt(t), _fmt(f), _fmt(d)])
    return buf.getvalue()


def _parse_curve_rows(rows) -> RocCurve:
    t = np.array([float(r["threshold"]) for r in rows])
    f = np.array([float(r["p_f"]) for r in rows])
    d = np.array([float(r["p_d"]) for r in rows])
    return RocCurve(f, d, t)


def roc_from_csv(text: str) -> RocCurve:
    return _parse_curve_rows(list(csv.DictReader(io.StringIO(text))))


def combined_roc_csv(curves: Dict[str, RocCurve]) -> str:
    """Long-format CSV (scheme, threshold, p_f, p_d) for overlaying curves."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scheme", "threshold", "p_f", "p_d"])
    for name, c in curves.items():
        for t, f, d in zip(c.thresholds, c.p_f, c.p_d):
            w.writerow([name, _fmt(t), _fmt(f), _fmt(d)])
    return buf.getvalue()


def combined_roc_from_csv(text: str) -> Dict[str, RocCurve]:
    groups: Dict[str, list] = {}
    for row in csv.DictReader(io.StringIO(text)):
        groups.setdefault(row["scheme"], []).append(row)
    return {k: _parse_curve_rows(v) for k, v in groups.items()}


def save_report(report: EvalReport, path) -> None:
    Path(path).write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")


def load_report(path) -> EvalReport:
    return EvalReport.from_dict(json.loads(Path(path).read_text()))
