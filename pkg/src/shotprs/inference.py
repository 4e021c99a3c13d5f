"""Bootstrap standard errors and the PRS statistic.

Each replication resamples the league's actions with replacement, refits the
goal model on the draw (unless ``refit_model`` is off), rebuilds every
coalition worth and evaluates the restricted Shapley value on the supports
of the original data.  Replication ``b`` draws from its own generator keyed
by ``(base_seed, b)``, so rows do not depend on execution order.
"""
from __future__ import annotations

import csv
import json
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .coalitions import (
    Roster, TeamStats, compatible_unobserved, extract_coalitions, player_support, synth_coalition_features,
    team_roster, team_stats,
)
from .dataset import Dataset, Player
from .shapley import EmptySupport, RestrictedSupport, SupportIndex, restricted_weights
from .xga.evaluation import replication_rng, replication_seed
from .xga.features import ActionMatrix, FeatureSpec, Mode, build_features
from .xga.glm import SeparationDetected
from .xga.model import FittedModel, LearnerConfig, fit_model, predict_proba

log = logging.getLogger(__name__)


class InferenceError(ValueError):
    pass


class AllReplicationsMissing(InferenceError):
    pass


@dataclass(frozen=True)
class BootstrapConfig:
    B: int = 1000
    base_seed: int = 0
    refit_model: bool = True
    retry_limit: int = 5
    eps: float = 1e-10
    level: float = 0.90
    missing_worth: str = "zero"      # observed coalition absent from a draw: "zero" | "predict"
    aggregation: str = "sum"         # observed worth over actions: "sum" | "mean"
    worth_scale: float = 1.0
    worth_shift: float = 0.0
    n_jobs: int = 1

    def __post_init__(self):
        if self.B < 2:
            raise ValueError("B must be at least 2")
        if self.missing_worth not in ("zero", "predict"):
            raise ValueError(f"unknown missing_worth {self.missing_worth!r}")
        if self.aggregation not in ("sum", "mean"):
            raise ValueError(f"unknown aggregation {self.aggregation!r}")
        if not self.worth_scale > 0:
            raise ValueError("worth_scale must be positive")


@dataclass
class TeamGame:
    """A team's coalition structure, frozen from the original data."""

    team_id: str
    roster: Roster
    n: int
    observed: dict[int, np.ndarray]          # mask -> rows of the training matrix
    unobserved: tuple[int, ...]
    supports: dict[int, RestrictedSupport]
    synth: ActionMatrix
    coalitions: list[int]
    index: SupportIndex
    action_counts: dict[str, int]

    @property
    def players(self) -> tuple[str, ...]:
        return self.roster.players


def build_team_game(ds: Dataset, team_id: str, train: ActionMatrix, spec: FeatureSpec,
                    n_override: int | None = None) -> TeamGame:
    """Collect coalitions, supports and synthetic rows for one team.

    ``train`` is the matrix the worth model is fitted on; every action of
    ``ds`` must appear in it (matched by action id).
    """
    if spec.mode is not Mode.XGA:
        raise InferenceError("worth requires XGA mode")
    roster = team_roster(ds, team_id)
    if roster.n == 0:
        raise InferenceError(f"team {team_id!r} has an empty roster")
    n = roster.n if n_override is None else int(n_override)
    row_of = {k: j for j, k in enumerate(train.row_keys)}
    grouped = extract_coalitions(ds, team_id, roster)
    try:
        observed = {c: np.array([row_of[a.action_id] for a in acts]) for c, acts in grouped.items()}
    except KeyError as exc:
        raise InferenceError(f"action {exc.args[0]!r} missing from the training matrix") from None
    unobserved = tuple(sorted(compatible_unobserved(observed)))
    supports = {}
    for i in range(roster.n):
        try:
            sup = player_support(observed, i)
        except EmptySupport:
            continue
        sup.weights = restricted_weights(n, sup.coalitions)
        supports[i] = sup
    team_actions = [a for acts in grouped.values() for a in acts]
    stats = team_stats(team_id, team_actions)
    players = ds.player_map
    synth = build_features([synth_coalition_features(c, roster, stats, players) for c in unobserved], spec)
    coalitions = [0] + list(observed) + list(unobserved)
    counts = {p: 0 for p in roster.players}
    for a in team_actions:
        for pid in a.participants:
            counts[pid] += 1
    return TeamGame(team_id, roster, n, observed, unobserved, supports, synth, coalitions,
                    SupportIndex(n, supports, coalitions, range(roster.n)), counts)


def worth_vector(game: TeamGame, pred: np.ndarray, counts: np.ndarray | None, pred_synth: np.ndarray,
                 cfg: BootstrapConfig) -> np.ndarray:
    """Worth of ``game.coalitions`` given per-row predictions and draw multiplicities.

    ``counts=None`` means the original sample (every action once).
    """
    v = np.empty(len(game.coalitions))
    v[0] = 0.0
    for j, rows in enumerate(game.observed.values(), start=1):
        p = pred[rows]
        k = np.ones(len(rows)) if counts is None else counts[rows].astype(float)
        total = k.sum()
        if total == 0:
            if cfg.missing_worth == "zero":
                v[j] = 0.0
                continue
            k = np.ones(len(rows))
            total = float(len(rows))
        v[j] = float(p @ k) if cfg.aggregation == "sum" else float(p @ k / total)
    v[1 + len(game.observed):] = pred_synth
    return cfg.worth_scale * v + cfg.worth_shift


def point_estimates(games: Sequence[TeamGame], model: FittedModel, train: ActionMatrix,
                    cfg: BootstrapConfig) -> dict[str, np.ndarray]:
    pred = predict_proba(model, train)
    return {g.team_id: g.index.evaluate(worth_vector(g, pred, None, _synth_pred(model, g), cfg)) for g in games}


def _synth_pred(model: FittedModel, game: TeamGame) -> np.ndarray:
    return predict_proba(model, game.synth) if game.synth.H else np.empty(0)


@dataclass
class BootstrapResult:
    matrices: dict[str, np.ndarray]      # team -> (B, roster size); NaN rows for failed replications
    distinct_fraction: np.ndarray
    retries: int
    missing: list[int] = field(default_factory=list)
    separations: int = 0


def bootstrap_phi(train: ActionMatrix, games: Sequence[TeamGame], spec: FeatureSpec, learner: LearnerConfig,
                  cfg: BootstrapConfig, model: FittedModel | None = None) -> BootstrapResult:
    """Replication matrix of restricted Shapley values per team.

    ``model`` is the fit on the original data; it is required when
    ``cfg.refit_model`` is off and ignored otherwise.
    """
    if not cfg.refit_model and model is None:
        raise InferenceError("refit_model=False needs the original model")
    H = train.H
    fixed_pred = None if cfg.refit_model else predict_proba(model, train)
    fixed_synth = None if cfg.refit_model else {g.team_id: _synth_pred(model, g) for g in games}

    def replicate(b: int):
        for attempt in range(cfg.retry_limit + 1):
            idx = replication_rng(cfg.base_seed, b, attempt).integers(0, H, size=H)
            counts = np.bincount(idx, minlength=H)
            if cfg.refit_model:
                try:
                    mb = fit_model(train.take(idx), spec, learner, seed=replication_seed(cfg.base_seed, b, attempt))
                except ValueError as exc:
                    log.info("replication %d attempt %d failed: %s", b, attempt, exc)
                    continue
                pred = predict_proba(mb, train)
                synth = {g.team_id: _synth_pred(mb, g) for g in games}
                sep = bool(mb.train_meta.get("separation"))
            else:
                pred, synth, sep = fixed_pred, fixed_synth, False
            rows = {g.team_id: g.index.evaluate(worth_vector(g, pred, counts, synth[g.team_id], cfg))
                    for g in games}
            return rows, attempt, float(np.count_nonzero(counts)) / H, sep
        return None, cfg.retry_limit, math.nan, False

    # the warning filter is process-wide, so it is set once around every worker; separations are counted below
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SeparationDetected)
        if cfg.n_jobs > 1:
            with ThreadPoolExecutor(cfg.n_jobs) as pool:
                results = list(pool.map(replicate, range(cfg.B)))
        else:
            results = [replicate(b) for b in range(cfg.B)]

    matrices = {g.team_id: np.full((cfg.B, g.roster.n), np.nan) for g in games}
    missing, retries, separations = [], 0, 0
    fractions = np.full(cfg.B, np.nan)
    for b, (rows, attempt, frac, sep) in enumerate(results):
        retries += attempt
        separations += sep
        fractions[b] = frac
        if rows is None:
            missing.append(b)
            continue
        for team, row in rows.items():
            matrices[team][b] = row
    if missing:
        log.warning("%d replications missing after retries", len(missing))
    return BootstrapResult(matrices, fractions, retries, missing, separations)


def percentile_ci(values, level: float = 0.90) -> tuple[float, float]:
    """Equal-tailed percentile interval, linear interpolation between order statistics."""
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v)]
    if v.size < 2:
        raise ValueError("need at least two finite values")
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(v, [alpha, 1.0 - alpha], method="linear")
    return float(lo), float(hi)


def bootstrap_se(data, statistic, B: int = 1000, seed: int = 0) -> float:
    """Bootstrap standard error of ``statistic(data)`` (divisor ``B - 1``)."""
    data = np.asarray(data)
    rng = np.random.default_rng(seed)
    reps = np.array([statistic(data[rng.integers(0, len(data), len(data))]) for _ in range(B)])
    return float(reps.std(ddof=1))


@dataclass
class PrsRow:
    player: str
    team: str
    role: str
    actions: int
    phi_hat: float
    phi_boot_mean: float
    se: float
    prs: float | None
    ci_low: float
    ci_high: float
    degenerate: bool
    n_replications: int


def prs_table(team: str, players: Sequence[str], point: np.ndarray, matrix: np.ndarray,
              cfg: BootstrapConfig, roles: Mapping[str, str] | None = None,
              action_counts: Mapping[str, int] | None = None) -> list[PrsRow]:
    """PRS rows for one team, sorted by PRS descending (degenerate rows last)."""
    rows = []
    for k, pid in enumerate(players):
        if math.isnan(point[k]):
            continue  # no support: absent, not zero
        col = matrix[:, k]
        col = col[np.isfinite(col)]
        if col.size == 0:
            raise AllReplicationsMissing(f"player {pid!r}: no valid replications")
        if col.size < 2:
            raise InferenceError(f"player {pid!r}: need at least two valid replications")
        se = float(col.std(ddof=1))
        degenerate = se <= cfg.eps
        lo, hi = percentile_ci(col, cfg.level)
        rows.append(PrsRow(
            player=pid, team=team, role=(roles or {}).get(pid, ""), actions=(action_counts or {}).get(pid, 0),
            phi_hat=float(point[k]), phi_boot_mean=float(col.mean()), se=se,
            prs=None if degenerate else float(point[k]) / se, ci_low=lo, ci_high=hi,
            degenerate=degenerate, n_replications=int(col.size),
        ))
    rows.sort(key=lambda r: (r.prs is None, -(r.prs or 0.0), r.player))
    return rows


PRS_COLUMNS = ("player", "role", "actions", "phi_hat", "phi_boot_mean", "se", "prs", "ci_low", "ci_high", "flag")


def write_prs_csv(rows: Sequence[PrsRow], path: Path | str) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PRS_COLUMNS)
        for r in rows:
            w.writerow([r.player, r.role, r.actions, repr(r.phi_hat), repr(r.phi_boot_mean), repr(r.se),
                        "" if r.prs is None else repr(r.prs), repr(r.ci_low), repr(r.ci_high),
                        "degenerate" if r.degenerate else ""])


def read_prs_csv(path: Path | str) -> list[dict]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_prs_json(rows: Sequence[PrsRow], path: Path | str, metadata: Mapping) -> None:
    doc = {"metadata": dict(metadata), "rows": [asdict(r) for r in rows]}
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True), encoding="utf-8")


@dataclass
class EfficiencyRow:
    player: str
    g90: float
    xg90: float
    diff: float
    prs: float | None = None


def efficiency_metric(ds: Dataset, xg_model: FittedModel, players: Sequence[str]) -> list[EfficiencyRow]:
    """Goals and model xG per 90 minutes for each player; shots are the player's own."""
    if xg_model.spec.mode is not Mode.XG:
        raise InferenceError("efficiency needs the shot-only XG model")
    pmap = ds.player_map
    shots = list(ds.actions)
    xg = predict_proba(xg_model, build_features(shots, xg_model.spec)) if shots else np.empty(0)
    by_shooter: dict[str, float] = {}
    for a, p in zip(shots, xg):
        by_shooter[a.shooter_id] = by_shooter.get(a.shooter_id, 0.0) + float(p)
    rows = []
    for pid in players:
        player = pmap[pid]
        if not player.minutes > 0:
            log.warning("player %s has no minutes; excluded from efficiency", pid)
            continue
        g90 = player.goals * 90.0 / player.minutes
        xg90 = by_shooter.get(pid, 0.0) * 90.0 / player.minutes
        rows.append(EfficiencyRow(pid, g90, xg90, g90 - xg90))
    return rows


def quadrant(prs: float, diff: float, median: float) -> str:
    """Quadrant of the PRS / finishing plane; PRS at the median counts as right, diff 0 as bottom."""
    return ("top" if diff > 0 else "bottom") + "-" + ("right" if prs >= median else "left")
