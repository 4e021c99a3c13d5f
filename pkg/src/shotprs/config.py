"""Run configuration: a YAML tree merged over complete defaults."""
from __future__ import annotations

import copy
import os
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from .inference import BootstrapConfig
from .xga.model import LearnerConfig, ModelKind

ENV_VAR = "SHOTPRS_CONFIG"
BUILTIN_PREFIX = "builtin:"

DEFAULTS: dict[str, Any] = {
    "paths": {"actions": None, "players": None, "out": "out"},
    "synthetic": {
        "seed": 7,
        "n_teams": 2,
        "players_per_team": 15,
        "actions_per_team": 600,
        "goal_prevalence": 0.10,
    },
    "teams": [],
    "filter": {"min_actions": 60, "strict": True, "situation_aliases": {}, "role_aliases": {}},
    "model": {
        "kind": "gbt",
        "mode": "XGA",
        "cloglog": {"ridge": 0.0, "max_iter": 100, "tol": 1e-8, "coef_bound": 30.0},
        "gbt": {"rounds": 200, "learning_rate": 0.1, "max_depth": 3, "subsample": 0.8,
                "min_leaf": 10, "reg_lambda": 1.0, "seed": 0},
    },
    "evaluate": {"B": 50, "seed": 0, "importance_B": 100, "level": 0.90},
    "bootstrap": {"B": 1000, "base_seed": 0, "refit_model": True, "retry_limit": 5, "level": 0.90,
                  "missing_worth": "zero", "n_jobs": 1},
    "shapley": {"n_override": None, "aggregation": "sum", "k_max": 10},
}


class ConfigError(ValueError):
    pass


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in (override or {}).items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"unknown config key {where!r}")
        free_form = key in ("situation_aliases", "role_aliases")
        if isinstance(base[key], dict) and not free_form:
            if not isinstance(value, dict):
                raise ConfigError(f"{where!r} must be a mapping")
            out[key] = _merge(base[key], value, where + ".")
        else:
            out[key] = copy.deepcopy(value)
    return out


def resolve_path(path: str | Path | None) -> Path | None:
    if path is None:
        env = os.environ.get(ENV_VAR)
        if not env:
            return None
        path = env
    path = str(path)
    if path.startswith(BUILTIN_PREFIX):
        name = path[len(BUILTIN_PREFIX):]
        ref = resources.files("shotprs") / "configs" / f"{name}.yaml"
        if not ref.is_file():
            raise FileNotFoundError(f"no built-in config {name!r}")
        return Path(str(ref))
    return Path(path)


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> dict:
    """Defaults, then the YAML file (if any), then ``overrides``; relative data paths resolve against the file."""
    cfg = copy.deepcopy(DEFAULTS)
    resolved = resolve_path(path)
    if resolved is not None:
        if not resolved.is_file():
            raise FileNotFoundError(f"config file not found: {resolved}")
        doc = yaml.safe_load(resolved.read_text(encoding="utf-8")) or {}
        if not isinstance(doc, dict):
            raise ConfigError("config root must be a mapping")
        cfg = _merge(cfg, doc)
        base = resolved.parent
        for key in ("actions", "players"):
            p = cfg["paths"][key]
            if p is not None and not Path(p).is_absolute():
                cfg["paths"][key] = str((base / p).resolve())
    if overrides:
        cfg = _merge(cfg, overrides)
    validate_config(cfg)
    return cfg


def validate_config(cfg: dict) -> None:
    try:
        ModelKind(cfg["model"]["kind"])
    except ValueError:
        raise ConfigError(f"model.kind must be one of {[k.value for k in ModelKind]}") from None
    if cfg["model"]["mode"] not in ("XG", "XGA"):
        raise ConfigError("model.mode must be XG or XGA")
    if cfg["shapley"]["aggregation"] not in ("sum", "mean"):
        raise ConfigError("shapley.aggregation must be sum or mean")
    if int(cfg["filter"]["min_actions"]) < 0:
        raise ConfigError("filter.min_actions must be >= 0")
    if int(cfg["bootstrap"]["B"]) < 2 or int(cfg["evaluate"]["B"]) < 2:
        raise ConfigError("B must be at least 2")


def learner_config(cfg: dict, kind: str | None = None) -> LearnerConfig:
    kind = ModelKind(kind or cfg["model"]["kind"])
    section = cfg["model"]["cloglog"] if kind is ModelKind.CLOGLOG else cfg["model"]["gbt"]
    return LearnerConfig(kind=kind, **section)


def bootstrap_config(cfg: dict) -> BootstrapConfig:
    b = cfg["bootstrap"]
    return BootstrapConfig(
        B=int(b["B"]), base_seed=int(b["base_seed"]), refit_model=bool(b["refit_model"]),
        retry_limit=int(b["retry_limit"]), level=float(b["level"]), missing_worth=b["missing_worth"],
        aggregation=cfg["shapley"]["aggregation"], n_jobs=int(b["n_jobs"]),
    )


def dump_config(cfg: dict) -> str:
    return yaml.safe_dump(cfg, sort_keys=True)
