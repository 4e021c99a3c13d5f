from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import gbt, glm
from .features import ActionMatrix, FeatureSpec, check_schema


class ModelKind(enum.Enum):
    CLOGLOG = "cloglog"
    GBT = "gbt"


@dataclass(frozen=True)
class LearnerConfig:
    kind: ModelKind = ModelKind.GBT
    # cloglog
    ridge: float = 0.0
    max_iter: int = 100
    tol: float = 1e-8
    coef_bound: float = 30.0
    # boosted trees
    rounds: int = 200
    learning_rate: float = 0.1
    max_depth: int = 3
    subsample: float = 0.8
    min_leaf: int = 10
    reg_lambda: float = 1.0
    seed: int = 0

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["kind"] = self.kind.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "LearnerConfig":
        d = dict(d)
        if "kind" in d:
            d["kind"] = ModelKind(d["kind"])
        return cls(**d)


@dataclass
class FittedModel:
    kind: ModelKind
    spec: FeatureSpec
    parameters: np.ndarray | gbt.Ensemble
    threshold: float
    train_meta: dict = field(default_factory=dict)

    @property
    def config(self) -> LearnerConfig:
        return LearnerConfig.from_dict(self.train_meta["config"])


def fit_model(m: ActionMatrix, spec: FeatureSpec, config: LearnerConfig, seed: int | None = None) -> FittedModel:
    """Fit ``config.kind`` on ``m``; ``seed`` overrides the configured tree seed."""
    check_schema(spec.columns, m)
    if config.kind is ModelKind.CLOGLOG:
        params, meta = glm.fit_cloglog(m.values, m.y, config.ridge, config.max_iter, config.tol, config.coef_bound)
    else:
        params, meta = gbt.fit_gbt(
            m.values, m.y, config.rounds, config.learning_rate, config.max_depth, config.subsample,
            config.min_leaf, config.seed if seed is None else seed, config.reg_lambda,
        )
    meta["config"] = config.to_dict()
    if seed is not None:
        meta["config"]["seed"] = int(seed)
    meta["n_train"] = m.H
    return FittedModel(config.kind, spec, params, float(m.y.mean()), meta)


def fit_cloglog(m: ActionMatrix, ridge: float = 0.0, max_iter: int = 100, tol: float = 1e-8,
                spec: FeatureSpec | None = None) -> FittedModel:
    spec = spec or _infer_spec(m)
    return fit_model(m, spec, LearnerConfig(ModelKind.CLOGLOG, ridge=ridge, max_iter=max_iter, tol=tol))


def fit_gbt(m: ActionMatrix, spec: FeatureSpec | None = None, **params) -> FittedModel:
    spec = spec or _infer_spec(m)
    return fit_model(m, spec, LearnerConfig(ModelKind.GBT, **params))


def _infer_spec(m: ActionMatrix) -> FeatureSpec:
    for spec in (FeatureSpec.xg(), FeatureSpec.xga()):
        if spec.columns == m.columns:
            return spec
    from .features import Mode
    return FeatureSpec(Mode.XGA, tuple(m.columns))


def linear_predictor(model: FittedModel, m: ActionMatrix) -> np.ndarray:
    check_schema(model.spec.columns, m)
    if model.kind is ModelKind.CLOGLOG:
        beta = model.parameters
        # column-by-column so that zero slopes leave eta bit-identical (nested specs agree exactly)
        eta = np.full(m.H, beta[0])
        for k in range(m.K):
            eta = eta + m.values[:, k] * beta[k + 1]
        return eta
    return model.parameters.decision_function(m.values)


def predict_proba(model: FittedModel, m: ActionMatrix) -> np.ndarray:
    check_schema(model.spec.columns, m)
    if model.kind is ModelKind.CLOGLOG:
        return glm.inverse_link(linear_predictor(model, m))
    return model.parameters.predict_proba(m.values)


def classify(p: np.ndarray, threshold: float) -> np.ndarray:
    """1 where ``p >= threshold``; ties go to the positive class."""
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    return (np.asarray(p) >= threshold).astype(int)


def model_to_dict(model: FittedModel) -> dict:
    if model.kind is ModelKind.CLOGLOG:
        params = {"coefficients": {"(intercept)": float(model.parameters[0]),
                                   **{c: float(b) for c, b in zip(model.spec.columns, model.parameters[1:])}}}
    else:
        params = {"base_score": model.parameters.base_score,
                  "trees": [t.to_dict() for t in model.parameters.trees]}
    return {
        "kind": model.kind.value,
        "spec": model.spec.to_dict(),
        **params,
        "threshold": model.threshold,
        "train_meta": model.train_meta,
    }


def model_from_dict(d: dict) -> FittedModel:
    kind = ModelKind(d["kind"])
    spec = FeatureSpec.from_dict(d["spec"])
    if kind is ModelKind.CLOGLOG:
        coefs = d["coefficients"]
        params = np.array([coefs["(intercept)"]] + [coefs[c] for c in spec.columns])
    else:
        params = gbt.Ensemble(float(d["base_score"]), [gbt.Tree.from_dict(t) for t in d["trees"]])
    return FittedModel(kind, spec, params, float(d["threshold"]), d.get("train_meta", {}))


def dumps_model(model: FittedModel) -> str:
    return json.dumps(model_to_dict(model), indent=1, sort_keys=True)


def save_model(model: FittedModel, path: Path | str) -> str:
    """Write the JSON artifact; returns its sha256."""
    text = dumps_model(model)
    Path(path).write_text(text, encoding="utf-8")
    return hashlib.sha256(text.encode()).hexdigest()


def load_model(path: Path | str) -> FittedModel:
    return model_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
