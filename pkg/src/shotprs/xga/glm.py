"""Binary regression with a complementary log-log link, fitted by Newton steps.

The link is g(mu) = log(-log(1 - mu)), so mu = 1 - exp(-exp(eta)).  Each
iteration solves the penalized score equations with the expected information
(Fisher scoring), halving the step whenever the penalized log-likelihood
would decrease.
"""
from __future__ import annotations

import warnings

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

# eta outside this window would round mu to exactly 0 or 1
ETA_MIN, ETA_MAX = -30.0, 3.5


class SeparationDetected(UserWarning):
    """A coefficient grew past the configured bound; the fit is kept and flagged."""


def inverse_link(eta: np.ndarray) -> np.ndarray:
    eta = np.clip(eta, ETA_MIN, ETA_MAX)
    return -np.expm1(-np.exp(eta))


def link(mu: np.ndarray) -> np.ndarray:
    return np.log(-np.log1p(-np.asarray(mu, dtype=float)))


def _loglik(eta: np.ndarray, y: np.ndarray) -> float:
    eta = np.clip(eta, ETA_MIN, ETA_MAX)
    e = np.exp(eta)
    # log(1 - mu) = -exp(eta) exactly
    return float(np.sum(y * np.log(-np.expm1(-e)) - (1.0 - y) * e))


def fit_cloglog(
    X: np.ndarray,
    y: np.ndarray,
    ridge: float = 0.0,
    max_iter: int = 100,
    tol: float = 1e-8,
    coef_bound: float = 30.0,
    jitter: float = 1e-8,
) -> tuple[np.ndarray, dict]:
    """Return ``(beta, meta)`` with the intercept in ``beta[0]``.

    ``ridge`` penalizes the slopes only.  ``meta`` carries the iteration
    count, convergence flag, standard errors from the inverse information at
    the solution, and separation / jitter flags.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    H, K = X.shape
    if H <= K:
        raise ValueError(f"need more rows than columns (H={H}, K={K})")
    if y.min() == y.max():
        raise ValueError("outcome vector must contain both classes")
    X1 = np.column_stack([np.ones(H), X])
    pen = np.full(K + 1, ridge)
    pen[0] = 0.0

    beta = np.zeros(K + 1)
    beta[0] = float(link(y.mean()))
    eta = X1 @ beta
    obj = _loglik(eta, y) - 0.5 * np.sum(pen * beta**2)
    converged = False
    jittered = False
    n_iter = 0
    info = None
    for n_iter in range(1, max_iter + 1):
        ec = np.clip(eta, ETA_MIN, ETA_MAX)
        e = np.exp(ec)
        mu = -np.expm1(-e)
        dmu = e * np.exp(-e)
        var = mu * (1.0 - mu)
        w = dmu**2 / var
        score = X1.T @ ((y - mu) * dmu / var) - pen * beta
        info = X1.T @ (w[:, None] * X1) + np.diag(pen)
        try:
            step = cho_solve(cho_factor(info), score)
        except LinAlgError:
            jittered = True
            step = np.linalg.solve(info + jitter * np.eye(K + 1), score)
        t = 1.0
        for _ in range(40):
            cand = beta + t * step
            eta_c = X1 @ cand
            obj_c = _loglik(eta_c, y) - 0.5 * np.sum(pen * cand**2)
            if obj_c >= obj - 1e-12 * abs(obj):
                break
            t *= 0.5
        delta = np.max(np.abs(cand - beta))
        beta, eta, obj = cand, eta_c, obj_c
        if delta < tol:
            converged = True
            break

    ec = np.clip(eta, ETA_MIN, ETA_MAX)
    e = np.exp(ec)
    mu = -np.expm1(-e)
    w = (e * np.exp(-e)) ** 2 / (mu * (1.0 - mu))
    info = X1.T @ (w[:, None] * X1) + np.diag(pen)
    try:
        cov = np.linalg.inv(info)
    except np.linalg.LinAlgError:
        jittered = True
        cov = np.linalg.inv(info + jitter * np.eye(K + 1))
    std_errors = np.sqrt(np.clip(np.diag(cov), 0.0, None))

    separation = bool(np.any(np.abs(beta) > coef_bound))
    if separation:
        warnings.warn(
            f"|coefficient| exceeds {coef_bound}: max {np.max(np.abs(beta)):.3g}", SeparationDetected, stacklevel=2
        )
    meta = {
        "iterations": n_iter,
        "converged": converged,
        "loglik": _loglik(eta, y),
        "std_errors": std_errors.tolist(),
        "separation": separation,
        "jitter_added": jittered,
    }
    return beta, meta
