"""Goal-probability models over shot actions (xG and its action-level extension xGA)."""
from .evaluation import ExactCollinearity, Importance, OobResult, compute_vif, feature_importance, oob_bootstrap_eval
from .features import ActionMatrix, FeatureError, FeatureSpec, Mode, SchemaMismatch, build_features
from .glm import SeparationDetected
from .metrics import METRIC_NAMES, MetricReport, auc_score, evaluate_metrics
from .model import (
    FittedModel, LearnerConfig, ModelKind, classify, fit_cloglog, fit_gbt, fit_model, linear_predictor,
    load_model, model_from_dict, model_to_dict, predict_proba, save_model,
)
