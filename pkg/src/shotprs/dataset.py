"""Action and player tables: schema, loading, filtering and a synthetic generator.

Two CSV files make up a season:

``players.csv``
    player_id,team_id,name,role,offensive_index,minutes,goals

``actions.csv``
    action_id,match_id,team_id,shooter_id,participants,outcome,x,y,shot_angle,
    first_pass_x,first_pass_y,pass_nb,players_nb,avg_pass_distance,
    pl_performance_index,h_a,situation,minute

``participants`` is a ``;``-joined list of player ids.  Loading is strict: any
row that violates the schema aborts with an error naming the row.
"""
from __future__ import annotations

import csv
import enum
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import brentq

ACTION_COLUMNS = (
    "action_id", "match_id", "team_id", "shooter_id", "participants", "outcome",
    "x", "y", "shot_angle", "first_pass_x", "first_pass_y", "pass_nb",
    "players_nb", "avg_pass_distance", "pl_performance_index", "h_a",
    "situation", "minute",
)
PLAYER_COLUMNS = ("player_id", "team_id", "name", "role", "offensive_index", "minutes", "goals")


class Role(enum.Enum):
    GOALKEEPER = "GK"
    DEFENDER = "DEF"
    MIDFIELDER = "MID"
    FORWARD = "FOR"


class Situation(enum.Enum):
    OPEN_PLAY = "open_play"
    FREE_KICK = "free_kick"
    PENALTY = "penalty"
    OTHER = "other"


class Venue(enum.Enum):
    HOME = "h"
    AWAY = "a"


ROLE_ALIASES: dict[str, Role] = {
    "gk": Role.GOALKEEPER, "g": Role.GOALKEEPER, "goalkeeper": Role.GOALKEEPER,
    "def": Role.DEFENDER, "d": Role.DEFENDER, "df": Role.DEFENDER, "defender": Role.DEFENDER,
    "mid": Role.MIDFIELDER, "m": Role.MIDFIELDER, "mf": Role.MIDFIELDER, "midfielder": Role.MIDFIELDER,
    "for": Role.FORWARD, "f": Role.FORWARD, "fw": Role.FORWARD, "forward": Role.FORWARD,
}

SITUATION_ALIASES: dict[str, Situation] = {
    "open_play": Situation.OPEN_PLAY, "openplay": Situation.OPEN_PLAY, "open play": Situation.OPEN_PLAY,
    "free_kick": Situation.FREE_KICK, "freekick": Situation.FREE_KICK,
    "directfreekick": Situation.FREE_KICK, "free kick": Situation.FREE_KICK,
    "penalty": Situation.PENALTY,
    "other": Situation.OTHER, "others": Situation.OTHER,
}

VENUE_ALIASES: dict[str, Venue] = {
    "h": Venue.HOME, "home": Venue.HOME,
    "a": Venue.AWAY, "away": Venue.AWAY,
}


class DatasetError(ValueError):
    """Base class for schema and validation failures; ``row`` is 1-based (header = row 1)."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        prefix = f"row {row}: " if row is not None else ""
        super().__init__(prefix + message)


class MissingColumn(DatasetError):
    pass


class BadEnum(DatasetError):
    pass


class BadRole(BadEnum):
    pass


class UnknownPlayer(DatasetError):
    def __init__(self, action_id: str, player_id: str, row: int | None = None):
        self.action_id = action_id
        self.player_id = player_id
        super().__init__(f"action {action_id!r} references unknown player {player_id!r}", row)


class UnknownCount(DatasetError):
    def __init__(self, action_id: str, declared: int, actual: int, row: int | None = None):
        self.action_id = action_id
        super().__init__(
            f"action {action_id!r}: players_nb={declared} but {actual} participants listed", row
        )


class DuplicateActionId(DatasetError):
    pass


class DuplicatePlayerId(DatasetError):
    pass


class OutOfRange(DatasetError):
    pass


class EmptyResult(DatasetError):
    pass


@dataclass(frozen=True)
class Player:
    player_id: str
    team_id: str
    name: str
    role: Role
    offensive_index: float
    minutes: float
    goals: int


@dataclass(frozen=True)
class ShotAction:
    action_id: str
    match_id: str
    team_id: str
    shooter_id: str
    participants: frozenset[str]
    outcome: int
    x: float
    y: float
    shot_angle: float
    first_pass_x: float
    first_pass_y: float
    pass_nb: int
    players_nb: int
    avg_pass_distance: float
    pl_performance_index: float
    h_a: Venue
    situation: Situation
    minute: float


@dataclass(frozen=True)
class FilterStep:
    name: str
    unit: str
    before: int
    after: int

    def __str__(self) -> str:
        return f"{self.name}: {self.before}→{self.after}"


@dataclass(frozen=True)
class Dataset:
    """A validated season.

    ``players`` always holds every known player so that shooter and
    participant keys keep resolving after filtering; players dropped by
    :func:`filter_dataset` are listed in ``excluded`` and no longer appear in
    any participant set.
    """

    players: tuple[Player, ...]
    actions: tuple[ShotAction, ...]
    provenance: str = ""
    filter_log: tuple[FilterStep, ...] = ()
    excluded: frozenset[str] = frozenset()
    meta: Mapping[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        known = {p.player_id for p in self.players}
        seen: set[str] = set()
        for a in self.actions:
            if a.action_id in seen:
                raise DuplicateActionId(f"duplicate action_id {a.action_id!r}")
            seen.add(a.action_id)
            for pid in a.participants | {a.shooter_id}:
                if pid not in known:
                    raise UnknownPlayer(a.action_id, pid)

    @property
    def player_map(self) -> dict[str, Player]:
        return {p.player_id: p for p in self.players}

    def roster(self, team_id: str) -> list[Player]:
        """Retained players of ``team_id`` ordered by player_id."""
        keep = [p for p in self.players if p.team_id == team_id and p.player_id not in self.excluded]
        return sorted(keep, key=lambda p: p.player_id)

    @property
    def team_ids(self) -> list[str]:
        return sorted({a.team_id for a in self.actions} | {p.team_id for p in self.players})

    def team_actions(self, team_id: str) -> list[ShotAction]:
        return [a for a in self.actions if a.team_id == team_id]


def _parse_enum(raw: str, aliases: Mapping[str, enum.Enum], what: str, row: int, exc=BadEnum):
    key = raw.strip().lower()
    if key in aliases:
        return aliases[key]
    raise exc(f"unknown {what} {raw!r}", row)


def _number(raw: str, column: str, row: int) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise DatasetError(f"column {column!r}: not a number: {raw!r}", row) from None
    if not math.isfinite(value):
        raise OutOfRange(f"column {column!r}: non-finite value {raw!r}", row)
    return value


def _integer(raw: str, column: str, row: int) -> int:
    value = _number(raw, column, row)
    if value != int(value):
        raise DatasetError(f"column {column!r}: not an integer: {raw!r}", row)
    return int(value)


def _bounded(value: float, column: str, row: int, lo: float = 0.0, hi: float = math.inf) -> float:
    if not lo <= value <= hi:
        raise OutOfRange(f"column {column!r}: {value} outside [{lo}, {hi}]", row)
    return value


def _read_rows(path: Path | str, columns: Sequence[str]) -> list[tuple[int, dict[str, str]]]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in columns if c not in header]
        if missing:
            raise MissingColumn(f"{path.name}: missing columns {missing}", 1)
        return [(i + 2, row) for i, row in enumerate(reader)]


def load_players(path: Path | str, role_aliases: Mapping[str, Role] | None = None) -> list[Player]:
    aliases = {**ROLE_ALIASES, **{k.lower(): v for k, v in (role_aliases or {}).items()}}
    players: list[Player] = []
    seen: set[str] = set()
    for row_no, row in _read_rows(path, PLAYER_COLUMNS):
        pid = row["player_id"].strip()
        if pid in seen:
            raise DuplicatePlayerId(f"duplicate player_id {pid!r}", row_no)
        seen.add(pid)
        players.append(
            Player(
                player_id=pid,
                team_id=row["team_id"].strip(),
                name=row["name"],
                role=_parse_enum(row["role"], aliases, "role", row_no, BadRole),
                offensive_index=_bounded(_number(row["offensive_index"], "offensive_index", row_no),
                                         "offensive_index", row_no, 0.0, 100.0),
                minutes=_bounded(_number(row["minutes"], "minutes", row_no), "minutes", row_no),
                goals=int(_bounded(_integer(row["goals"], "goals", row_no), "goals", row_no)),
            )
        )
    return players


def load_actions(
    path: Path | str,
    players: Iterable[Player],
    situation_aliases: Mapping[str, str | Situation] | None = None,
    strict: bool = True,
) -> list[ShotAction]:
    """Parse ``actions.csv`` against a known player set.

    ``situation_aliases`` extends the built-in alias table (e.g.
    ``{"corner": "other"}``).  With ``strict=False`` an unknown situation
    falls back to ``Situation.OTHER`` instead of raising :class:`BadEnum`.
    """
    aliases = dict(SITUATION_ALIASES)
    for k, v in (situation_aliases or {}).items():
        aliases[k.strip().lower()] = v if isinstance(v, Situation) else SITUATION_ALIASES[v.strip().lower()]
    known = {p.player_id for p in players}
    actions: list[ShotAction] = []
    seen: set[str] = set()
    for row_no, row in _read_rows(path, ACTION_COLUMNS):
        aid = row["action_id"].strip()
        if aid in seen:
            raise DuplicateActionId(f"duplicate action_id {aid!r}", row_no)
        seen.add(aid)
        parts = [p.strip() for p in row["participants"].split(";") if p.strip()]
        if not parts:
            raise DatasetError(f"action {aid!r}: empty participants", row_no)
        participants = frozenset(parts)
        players_nb = _integer(row["players_nb"], "players_nb", row_no)
        if players_nb != len(participants):
            raise UnknownCount(aid, players_nb, len(participants), row_no)
        shooter = row["shooter_id"].strip()
        for pid in sorted(participants | {shooter}):
            if pid not in known:
                raise UnknownPlayer(aid, pid, row_no)
        if shooter not in participants:
            raise DatasetError(f"action {aid!r}: shooter {shooter!r} not among participants", row_no)
        outcome = _integer(row["outcome"], "outcome", row_no)
        if outcome not in (0, 1):
            raise OutOfRange(f"column 'outcome': {outcome} not in {{0, 1}}", row_no)
        try:
            situation = _parse_enum(row["situation"], aliases, "situation", row_no)
        except BadEnum:
            if strict:
                raise
            situation = Situation.OTHER

        def pct(col: str) -> float:
            return _bounded(_number(row[col], col, row_no), col, row_no, 0.0, 100.0)

        def nonneg(col: str) -> float:
            return _bounded(_number(row[col], col, row_no), col, row_no)

        actions.append(
            ShotAction(
                action_id=aid,
                match_id=row["match_id"].strip(),
                team_id=row["team_id"].strip(),
                shooter_id=shooter,
                participants=participants,
                outcome=outcome,
                x=pct("x"),
                y=pct("y"),
                shot_angle=nonneg("shot_angle"),
                first_pass_x=pct("first_pass_x"),
                first_pass_y=pct("first_pass_y"),
                pass_nb=int(_bounded(_integer(row["pass_nb"], "pass_nb", row_no), "pass_nb", row_no)),
                players_nb=players_nb,
                avg_pass_distance=nonneg("avg_pass_distance"),
                pl_performance_index=_number(row["pl_performance_index"], "pl_performance_index", row_no),
                h_a=_parse_enum(row["h_a"], VENUE_ALIASES, "h_a", row_no),
                situation=situation,
                minute=nonneg("minute"),
            )
        )
    return actions


def load_dataset(
    actions_path: Path | str,
    players_path: Path | str,
    situation_aliases: Mapping[str, str] | None = None,
    role_aliases: Mapping[str, Role] | None = None,
    strict: bool = True,
) -> Dataset:
    players = load_players(players_path, role_aliases)
    actions = load_actions(actions_path, players, situation_aliases, strict)
    return Dataset(tuple(players), tuple(actions), provenance=str(actions_path))


def _fmt(value: float) -> str:
    return repr(float(value))


def write_players(players: Iterable[Player], path: Path | str) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PLAYER_COLUMNS)
        for p in players:
            w.writerow([p.player_id, p.team_id, p.name, p.role.value,
                        _fmt(p.offensive_index), _fmt(p.minutes), p.goals])


def write_actions(actions: Iterable[ShotAction], path: Path | str) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ACTION_COLUMNS)
        for a in actions:
            w.writerow([
                a.action_id, a.match_id, a.team_id, a.shooter_id, ";".join(sorted(a.participants)),
                a.outcome, _fmt(a.x), _fmt(a.y), _fmt(a.shot_angle), _fmt(a.first_pass_x),
                _fmt(a.first_pass_y), a.pass_nb, a.players_nb, _fmt(a.avg_pass_distance),
                _fmt(a.pl_performance_index), a.h_a.value, a.situation.value, _fmt(a.minute),
            ])


def write_dataset(ds: Dataset, directory: Path | str) -> tuple[Path, Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    players_path, actions_path = directory / "players.csv", directory / "actions.csv"
    write_players(ds.players, players_path)
    write_actions(ds.actions, actions_path)
    return actions_path, players_path


def _strip(actions: Sequence[ShotAction], drop: set[str]) -> list[ShotAction]:
    out = []
    for a in actions:
        if a.participants & drop:
            kept = a.participants - drop
            if not kept:
                continue
            # players_nb is a model feature recorded at collection time and stays untouched
            a = replace(a, participants=kept)
        out.append(a)
    return out


def filter_dataset(ds: Dataset, min_actions: int = 60) -> Dataset:
    """Drop penalties, goalkeepers and rarely involved players.

    Order: penalties, then goalkeepers, then the ``min_actions`` rule repeated
    until nothing changes.  Removed players leave every participant set; an
    action is dropped only when its participant set becomes empty.
    """
    if min_actions < 0:
        raise ValueError("min_actions must be >= 0")
    log = list(ds.filter_log)
    excluded = set(ds.excluded)

    before = len(ds.actions)
    actions = [a for a in ds.actions if a.situation is not Situation.PENALTY]
    log.append(FilterStep("penalty", "actions", before, len(actions)))

    active = [p for p in ds.players if p.player_id not in excluded]
    keepers = {p.player_id for p in active if p.role is Role.GOALKEEPER}
    excluded |= keepers
    log.append(FilterStep("goalkeeper", "players", len(active), len(active) - len(keepers)))
    before = len(actions)
    actions = _strip(actions, keepers)
    log.append(FilterStep("goalkeeper", "actions", before, len(actions)))

    rounds = 0
    while True:
        counts = Counter(pid for a in actions for pid in a.participants)
        active = [p for p in ds.players if p.player_id not in excluded]
        rare = {p.player_id for p in active if counts[p.player_id] < min_actions}
        if not rare:
            break
        rounds += 1
        excluded |= rare
        log.append(FilterStep(f"min_actions[{rounds}]", "players", len(active), len(active) - len(rare)))
        before = len(actions)
        actions = _strip(actions, rare)
        log.append(FilterStep(f"min_actions[{rounds}]", "actions", before, len(actions)))

    if not actions:
        raise EmptyResult("no actions survive filtering")
    return Dataset(ds.players, tuple(actions), ds.provenance, tuple(log), frozenset(excluded), ds.meta)


# --- synthetic generator -------------------------------------------------

# Share of observed coalitions by cardinality 1..10 (one Serie A club season).
CARDINALITY_WEIGHTS = np.array([3.02, 11.60, 16.71, 13.23, 14.85, 13.69, 9.28, 10.90, 4.87, 1.86])

SITUATION_PROBS = {
    Situation.OPEN_PLAY: 0.73, Situation.FREE_KICK: 0.09,
    Situation.PENALTY: 0.01, Situation.OTHER: 0.17,
}

# Cloglog slopes on the raw XGA design columns; the intercept is solved per
# dataset so that the expected goal rate matches the requested prevalence.
TRUE_SLOPES = {
    "x": 0.09,
    "y": 0.0,
    "shot_angle": -0.02,
    "first_pass_x": -0.008,
    "first_pass_y": 0.0,
    "pass_nb": 0.0,
    "players_nb": -0.12,
    "avg_pass_distance": -0.02,
    "pl_performance_index": 0.09,
    "h_a_home": 0.05,
    "situation_free_kick": -0.4,
    "situation_penalty": 2.0,
    "situation_other": -0.25,
}

_ROLE_CYCLE = (Role.DEFENDER, Role.MIDFIELDER, Role.FORWARD, Role.DEFENDER, Role.MIDFIELDER)
_ROLE_INDEX = {Role.GOALKEEPER: (60.0, 5.0), Role.DEFENDER: (76.0, 6.0),
               Role.MIDFIELDER: (83.0, 6.0), Role.FORWARD: (89.0, 5.0)}
_SHOOT_WEIGHT = {Role.GOALKEEPER: 0.0, Role.DEFENDER: 1.0, Role.MIDFIELDER: 2.0, Role.FORWARD: 5.0}


def _cloglog_inverse(eta: np.ndarray) -> np.ndarray:
    return -np.expm1(-np.exp(eta))


def generate_synthetic(
    seed: int = 0,
    n_teams: int = 2,
    players_per_team: int = 15,
    actions_per_team: int = 600,
    goal_prevalence: float = 0.10,
) -> Dataset:
    """Draw a reproducible season whose goals follow a known cloglog model.

    Ground truth (slopes, solved intercept, realised prevalence) is in
    ``Dataset.meta``.  Every team has one goalkeeper who occasionally joins
    the build-up, and roughly 1% of actions are penalties, so the filters
    have work to do.
    """
    if min(n_teams, players_per_team, actions_per_team) < 1:
        raise ValueError("counts must be positive")
    if not 0.0 < goal_prevalence < 1.0:
        raise ValueError("goal_prevalence must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    n_act = actions_per_team
    sit_levels = list(SITUATION_PROBS)

    players: list[Player] = []
    cols: dict[str, list[np.ndarray]] = {}
    participants: list[frozenset[str]] = []
    shooters: list[str] = []
    teams: list[str] = []
    matches: list[str] = []

    def push(name: str, values: np.ndarray) -> None:
        cols.setdefault(name, []).append(values)

    for t in range(n_teams):
        team = f"T{t + 1:02d}"
        if players_per_team == 1:
            roles = [Role.FORWARD]
        else:
            roles = [Role.GOALKEEPER] + [_ROLE_CYCLE[j % len(_ROLE_CYCLE)] for j in range(players_per_team - 1)]
        ids = np.array([f"{team}P{j + 1:02d}" for j in range(players_per_team)])
        mu_sd = np.array([_ROLE_INDEX[r] for r in roles])
        index = np.clip(rng.normal(mu_sd[:, 0], mu_sd[:, 1]), 0.0, 100.0)
        involvement = rng.gamma(6.0, 1.0, size=players_per_team)
        is_keeper = np.array([r is Role.GOALKEEPER for r in roles])
        outfield = np.flatnonzero(~is_keeper)
        shoot_w = np.array([_SHOOT_WEIGHT[r] for r in roles])

        situation = rng.choice(len(sit_levels), size=n_act, p=np.array(list(SITUATION_PROBS.values())))
        penalty = situation == sit_levels.index(Situation.PENALTY)
        k_max = min(len(CARDINALITY_WEIGHTS), len(outfield))
        k_probs = CARDINALITY_WEIGHTS[:k_max] / CARDINALITY_WEIGHTS[:k_max].sum()
        k = rng.choice(np.arange(1, k_max + 1), size=n_act, p=k_probs)
        k[penalty] = 1

        # weighted sampling without replacement: Gumbel top-k over outfield players
        keys = np.log(involvement[outfield]) + rng.gumbel(size=(n_act, len(outfield)))
        order = np.argsort(-keys, axis=1)
        member = np.zeros((n_act, players_per_team), dtype=bool)
        ranks = np.arange(len(outfield))[None, :] < k[:, None]
        rows_idx = np.repeat(np.arange(n_act), len(outfield)).reshape(n_act, -1)
        member[rows_idx[ranks], outfield[order[ranks]]] = True

        shoot_keys = np.where(member, np.log(np.where(shoot_w > 0, shoot_w, 1.0)) + rng.gumbel(size=member.shape),
                              -np.inf)
        shooter = np.argmax(shoot_keys, axis=1)
        keeper_joins = (rng.random(n_act) < 0.03) & ~penalty & is_keeper.any()
        if is_keeper.any():
            member[keeper_joins, np.flatnonzero(is_keeper)[0]] = True
        n_members = member.sum(axis=1)

        x = np.where(penalty, 88.5, np.clip(rng.normal(85.3, 7.4, n_act), 55.0, 99.5))
        y = np.where(penalty, 50.0, np.clip(rng.normal(50.8, 12.4, n_act), 5.0, 95.0))
        pass_nb = np.where(penalty, 0, n_members - 1 + rng.geometric(1.0 / 3.5, n_act) - 1)
        lateral = np.abs(y - 50.0) * 0.68
        depth = np.maximum(100.0 - x, 0.5) * 1.05
        angle = np.clip(np.degrees(np.arctan2(lateral, depth)) + rng.normal(10.0, 8.0, n_act), 0.0, 90.0)
        avg_dist = np.where(pass_nb == 0, 0.0, np.clip(rng.gamma(6.6, 27.3 / 6.6, n_act), 2.0, 90.0))

        push("x", x)
        push("y", y)
        push("shot_angle", angle)
        push("first_pass_x", np.clip(rng.normal(51.2, 24.0, n_act), 0.0, 100.0))
        push("first_pass_y", np.clip(rng.normal(50.8, 26.0, n_act), 0.0, 100.0))
        push("pass_nb", pass_nb)
        push("players_nb", n_members)
        push("avg_pass_distance", avg_dist)
        push("pl_performance_index", (member * index).sum(axis=1) / n_members)
        push("home", rng.random(n_act) < 0.54)
        push("situation", situation)
        push("minute", np.round(rng.uniform(0.0, 95.0, n_act), 1))
        match_no = rng.integers(38, size=n_act) + 1
        matches.extend(f"{team}M{m:02d}" for m in match_no)
        teams.extend([team] * n_act)
        shooters.extend(ids[shooter])
        participants.extend(frozenset(ids[row]) for row in member)

        minutes = np.round(rng.uniform(900.0, 3400.0, players_per_team), 0)
        for j in range(players_per_team):
            players.append(Player(str(ids[j]), team, f"Player {t + 1}-{j + 1}", roles[j],
                                  float(index[j]), float(minutes[j]), 0))

    data = {name: np.concatenate(parts) for name, parts in cols.items()}
    sit = data["situation"]
    design = np.column_stack([
        data["x"], data["y"], data["shot_angle"], data["first_pass_x"], data["first_pass_y"],
        data["pass_nb"], data["players_nb"], data["avg_pass_distance"], data["pl_performance_index"],
        data["home"].astype(float),
        (sit == sit_levels.index(Situation.FREE_KICK)).astype(float),
        (sit == sit_levels.index(Situation.PENALTY)).astype(float),
        (sit == sit_levels.index(Situation.OTHER)).astype(float),
    ])
    lin = design @ np.array(list(TRUE_SLOPES.values()))
    intercept = brentq(lambda b: _cloglog_inverse(b + lin).mean() - goal_prevalence, -60.0, 60.0, xtol=1e-12)
    outcome = (rng.random(len(lin)) < _cloglog_inverse(intercept + lin)).astype(int)

    goals = Counter(s for s, o in zip(shooters, outcome) if o)
    players = [replace(p, goals=goals[p.player_id]) for p in players]
    actions = tuple(
        ShotAction(
            action_id=f"A{h + 1:06d}", match_id=matches[h], team_id=teams[h], shooter_id=str(shooters[h]),
            participants=participants[h], outcome=int(outcome[h]),
            x=float(data["x"][h]), y=float(data["y"][h]), shot_angle=float(data["shot_angle"][h]),
            first_pass_x=float(data["first_pass_x"][h]), first_pass_y=float(data["first_pass_y"][h]),
            pass_nb=int(data["pass_nb"][h]), players_nb=int(data["players_nb"][h]),
            avg_pass_distance=float(data["avg_pass_distance"][h]),
            pl_performance_index=float(data["pl_performance_index"][h]),
            h_a=Venue.HOME if data["home"][h] else Venue.AWAY,
            situation=sit_levels[int(sit[h])], minute=float(data["minute"][h]),
        )
        for h in range(len(lin))
    )
    meta = {
        "seed": int(seed),
        "n_teams": n_teams,
        "players_per_team": players_per_team,
        "actions_per_team": actions_per_team,
        "goal_prevalence": goal_prevalence,
        "empirical_prevalence": float(outcome.mean()),
        "link": "cloglog",
        "intercept": float(intercept),
        "coefficients": dict(TRUE_SLOPES),
    }
    provenance = (f"synthetic(seed={seed}, n_teams={n_teams}, players_per_team={players_per_team}, "
                  f"actions_per_team={actions_per_team}, goal_prevalence={goal_prevalence})")
    return Dataset(tuple(players), actions, provenance=provenance, meta=meta)
