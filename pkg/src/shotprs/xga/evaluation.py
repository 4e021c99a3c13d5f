"""Model diagnostics: collinearity screen, bootstrap feature importance and
out-of-bag performance estimates."""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .features import ActionMatrix
from .glm import SeparationDetected
from .metrics import METRIC_NAMES, MetricReport, evaluate_metrics
from .model import FittedModel, LearnerConfig, ModelKind, fit_model, predict_proba

log = logging.getLogger(__name__)


class ExactCollinearity(UserWarning):
    pass


def replication_rng(seed: int, b: int, attempt: int = 0) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(b), int(attempt)])


def replication_seed(seed: int, b: int, attempt: int = 0) -> int:
    return int(np.random.SeedSequence([int(seed), int(b), int(attempt), 1]).generate_state(1)[0])


def compute_vif(m: ActionMatrix, r2_tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Variance inflation factor of each column.

    Returns ``(vif, collinear)``; exactly collinear columns get ``inf`` and a
    ``True`` flag.
    """
    X = m.values
    H, K = X.shape
    if K < 2:
        raise ValueError("VIF needs at least two columns")
    if np.any(X.std(axis=0) == 0):
        raise ValueError("constant column")
    vif = np.empty(K)
    flag = np.zeros(K, dtype=bool)
    for k in range(K):
        others = np.column_stack([np.ones(H), np.delete(X, k, axis=1)])
        coef, *_ = np.linalg.lstsq(others, X[:, k], rcond=None)
        resid = X[:, k] - others @ coef
        tss = np.sum((X[:, k] - X[:, k].mean()) ** 2)
        r2 = 1.0 - resid @ resid / tss
        if 1.0 - r2 <= r2_tol:
            vif[k], flag[k] = np.inf, True
        else:
            vif[k] = 1.0 / (1.0 - r2)
    if flag.any():
        names = [m.columns[k] for k in np.flatnonzero(flag)]
        warnings.warn(f"exactly collinear columns: {names}", ExactCollinearity, stacklevel=2)
    return vif, flag


def _draw(m: ActionMatrix, seed: int, b: int, retry_limit: int) -> tuple[np.ndarray, int]:
    for attempt in range(retry_limit + 1):
        idx = replication_rng(seed, b, attempt).integers(0, m.H, size=m.H)
        yb = m.y[idx]
        if yb.min() != yb.max():
            return idx, attempt
        log.info("replication %d attempt %d: single-class draw, redrawing", b, attempt)
    raise RuntimeError(f"replication {b}: single-class draw after {retry_limit + 1} attempts")


@dataclass
class Importance:
    features: tuple[str, ...]
    estimate: np.ndarray
    low: np.ndarray
    high: np.ndarray
    replicates: np.ndarray
    standardized: np.ndarray | None = None
    standardized_low: np.ndarray | None = None
    standardized_high: np.ndarray | None = None


def _importance_vector(model: FittedModel, m: ActionMatrix) -> np.ndarray:
    if model.kind is ModelKind.GBT:
        gains = model.parameters.gain_importance(m.K)
        total = gains.sum()
        return gains / total if total > 0 else gains
    return np.asarray(model.parameters[1:], dtype=float)


def feature_importance(model: FittedModel, m: ActionMatrix, B: int = 1000, seed: int = 0,
                       level: float = 0.90, retry_limit: int = 10) -> Importance:
    """Per-feature importance with bootstrap percentile bounds.

    Boosted trees report total split gain normalized to sum to one; the
    cloglog model reports its slopes (raw, plus per-standard-deviation
    versions in ``standardized``).
    """
    from ..inference import percentile_ci

    if B < 100:
        raise ValueError("B must be at least 100")
    config = model.config
    est = _importance_vector(model, m)
    reps = np.empty((B, m.K))
    for b in range(B):
        idx, attempt = _draw(m, seed, b, retry_limit)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", SeparationDetected)
                fb = fit_model(m.take(idx), model.spec, config, seed=replication_seed(seed, b, attempt))
        except Exception as exc:
            raise RuntimeError(f"importance replication {b}: {exc}") from exc
        reps[b] = _importance_vector(fb, m)
    bounds = np.array([percentile_ci(reps[:, k], level) for k in range(m.K)])
    out = Importance(tuple(m.columns), est, bounds[:, 0], bounds[:, 1], reps)
    if model.kind is ModelKind.CLOGLOG:
        sd = m.values.std(axis=0, ddof=1)
        out.standardized = est * sd
        out.standardized_low = bounds[:, 0] * sd
        out.standardized_high = bounds[:, 1] * sd
    return out


@dataclass
class OobResult:
    reports: list[MetricReport]
    mean: dict[str, float]
    se: dict[str, float]
    oob_fraction: np.ndarray
    redraws: int
    separations: int = 0


def oob_bootstrap_eval(m: ActionMatrix, spec, config: LearnerConfig, B: int = 1000, seed: int = 0,
                       retry_limit: int = 10) -> OobResult:
    """Train on each bootstrap draw, score the rows it left out.

    The threshold of each replication is the goal rate of its in-bag draw.
    Draws depend only on ``(seed, b)`` and the outcome vector, so two calls
    with different feature sets see identical train/test splits.
    """
    if B < 2:
        raise ValueError("B must be at least 2")
    reports, fractions = [], []
    redraws = separations = 0
    for b in range(B):
        idx, attempt = _draw(m, seed, b, retry_limit)
        redraws += attempt
        oob = np.ones(m.H, dtype=bool)
        oob[idx] = False
        fractions.append(oob.mean())
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SeparationDetected)
            model = fit_model(m.take(idx), spec, config, seed=replication_seed(seed, b, attempt))
        separations += bool(model.train_meta.get("separation"))
        test = m.take(np.flatnonzero(oob))
        reports.append(evaluate_metrics(test.y, predict_proba(model, test), model.threshold))
    values = np.array([r.values() for r in reports])
    mean = {k: float(np.nanmean(values[:, j])) for j, k in enumerate(METRIC_NAMES)}
    se = {k: float(np.nanstd(values[:, j], ddof=1)) for j, k in enumerate(METRIC_NAMES)}
    if separations:
        log.info("%d of %d replications flagged separation", separations, B)
    return OobResult(reports, mean, se, np.array(fractions), redraws, separations)
