from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..dataset import ShotAction, Situation, Venue

SHOT_FEATURES = ("x", "y", "shot_angle")
ACTION_FEATURES = (
    "first_pass_x", "first_pass_y", "pass_nb", "players_nb",
    "avg_pass_distance", "pl_performance_index",
)


class Mode(enum.Enum):
    XG = "XG"
    XGA = "XGA"


@dataclass(frozen=True)
class FeatureSpec:
    """Ordered design-matrix layout.

    ``categorical_encodings`` maps a categorical attribute to
    ``(reference_level, ((dummy_name, level), ...))``.
    """

    mode: Mode
    numeric_features: tuple[str, ...]
    categorical_encodings: dict[str, tuple[str, tuple[tuple[str, str], ...]]] = field(default_factory=dict)

    @classmethod
    def xg(cls) -> "FeatureSpec":
        return cls(Mode.XG, SHOT_FEATURES)

    @classmethod
    def xga(cls) -> "FeatureSpec":
        return cls(
            Mode.XGA,
            SHOT_FEATURES + ACTION_FEATURES,
            {
                "h_a": (Venue.AWAY.value, (("h_a_home", Venue.HOME.value),)),
                "situation": (
                    Situation.OPEN_PLAY.value,
                    (
                        ("situation_free_kick", Situation.FREE_KICK.value),
                        ("situation_penalty", Situation.PENALTY.value),
                        ("situation_other", Situation.OTHER.value),
                    ),
                ),
            },
        )

    @classmethod
    def for_mode(cls, mode: Mode | str) -> "FeatureSpec":
        return cls.xg() if Mode(mode) is Mode.XG else cls.xga()

    @property
    def columns(self) -> tuple[str, ...]:
        dummies = tuple(name for _, (_, pairs) in self.categorical_encodings.items() for name, _ in pairs)
        return self.numeric_features + dummies

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "numeric_features": list(self.numeric_features),
            "categorical_encodings": {
                k: {"reference": ref, "dummies": [[n, lvl] for n, lvl in pairs]}
                for k, (ref, pairs) in self.categorical_encodings.items()
            },
            "columns": list(self.columns),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureSpec":
        cats = {
            k: (v["reference"], tuple((n, lvl) for n, lvl in v["dummies"]))
            for k, v in d["categorical_encodings"].items()
        }
        return cls(Mode(d["mode"]), tuple(d["numeric_features"]), cats)


class FeatureError(ValueError):
    pass


class SchemaMismatch(FeatureError):
    pass


@dataclass(frozen=True)
class ActionMatrix:
    values: np.ndarray
    y: np.ndarray
    columns: tuple[str, ...]
    row_keys: tuple[str, ...]

    @property
    def H(self) -> int:
        return self.values.shape[0]

    @property
    def K(self) -> int:
        return self.values.shape[1]

    def take(self, rows: np.ndarray) -> "ActionMatrix":
        rows = np.asarray(rows)
        return ActionMatrix(self.values[rows], self.y[rows], self.columns,
                            tuple(self.row_keys[i] for i in rows))

    def select(self, columns: Sequence[str]) -> "ActionMatrix":
        idx = [self.columns.index(c) for c in columns]
        return ActionMatrix(self.values[:, idx], self.y, tuple(columns), self.row_keys)


def build_features(actions: Sequence[ShotAction], spec: FeatureSpec) -> ActionMatrix:
    cols = []
    for name in spec.numeric_features:
        cols.append(np.array([float(getattr(a, name)) for a in actions], dtype=float))
    for attr, (_, pairs) in spec.categorical_encodings.items():
        levels = [getattr(a, attr).value for a in actions]
        for _, level in pairs:
            cols.append(np.array([lvl == level for lvl in levels], dtype=float))
    values = np.column_stack(cols) if cols else np.empty((len(actions), 0))
    values = values.reshape(len(actions), len(spec.columns))
    bad = ~np.isfinite(values)
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise FeatureError(f"action {actions[r].action_id!r}: non-finite {spec.columns[c]}")
    y = np.array([a.outcome for a in actions], dtype=float)
    return ActionMatrix(values, y, spec.columns, tuple(a.action_id for a in actions))


def check_schema(columns: Sequence[str], m: ActionMatrix) -> None:
    if tuple(columns) != tuple(m.columns):
        raise SchemaMismatch(f"model expects columns {list(columns)}, matrix has {list(m.columns)}")
