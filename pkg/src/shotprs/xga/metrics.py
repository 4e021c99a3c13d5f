from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import rankdata

METRIC_NAMES = ("sensitivity", "specificity", "f1", "precision", "mcc", "auc", "brier")


@dataclass(frozen=True)
class MetricReport:
    sensitivity: float
    specificity: float
    f1: float
    precision: float
    mcc: float
    auc: float
    brier: float
    tp: int
    fp: int
    tn: int
    fn: int
    mcc_degenerate: bool = False
    auc_undefined: bool = False

    def as_dict(self) -> dict:
        return asdict(self)

    def values(self) -> np.ndarray:
        return np.array([getattr(self, k) for k in METRIC_NAMES], dtype=float)


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def auc_score(y: np.ndarray, p: np.ndarray) -> float:
    """Mann-Whitney AUC; tied scores earn half credit.  NaN with one class only."""
    y = np.asarray(y).astype(bool)
    n_pos, n_neg = int(y.sum()), int((~y).sum())
    if n_pos == 0 or n_neg == 0:
        return math.nan
    ranks = rankdata(p)
    return float((ranks[y].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def evaluate_metrics(y_true, p, threshold: float) -> MetricReport:
    y = np.asarray(y_true).astype(int)
    p = np.asarray(p, dtype=float)
    if y.shape != p.shape:
        raise ValueError(f"length mismatch: {y.shape} vs {p.shape}")
    if y.size == 0:
        raise ValueError("empty input")
    pred = (p >= threshold).astype(int)
    tp = int(np.sum((pred == 1) & (y == 1)))
    fp = int(np.sum((pred == 1) & (y == 0)))
    tn = int(np.sum((pred == 0) & (y == 0)))
    fn = int(np.sum((pred == 0) & (y == 1)))
    sens = _ratio(tp, tp + fn)
    spec = _ratio(tn, tn + fp)
    prec = _ratio(tp, tp + fp)
    f1 = _ratio(2 * prec * sens, prec + sens)
    den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    degenerate = den == 0
    mcc = 0.0 if degenerate else (tp * tn - fp * fn) / math.sqrt(den)
    auc = auc_score(y, p)
    return MetricReport(
        sensitivity=sens, specificity=spec, f1=f1, precision=prec, mcc=mcc, auc=auc,
        brier=float(np.mean((y - p) ** 2)), tp=tp, fp=fp, tn=tn, fn=fn,
        mcc_degenerate=degenerate, auc_undefined=math.isnan(auc),
    )
