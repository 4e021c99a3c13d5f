"""Coalitions observed in a team's shot actions and the worth attached to them.

A coalition is the participant set of an action, encoded as a bit mask over
the team's filtered roster.  A player's restricted support is every
coalition obtained by removing that player from an observed coalition that
contains them; supports that were never observed themselves get an
out-of-sample worth from a synthetic feature row.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .dataset import Dataset, Player, ShotAction, Situation, Venue
from .shapley import EmptySupport, RestrictedSupport, popcount
from .xga.features import build_features
from .xga.model import FittedModel, predict_proba

MAX_ROSTER = 64


@dataclass(frozen=True)
class Roster:
    team_id: str
    players: tuple[str, ...]

    def __post_init__(self):
        if len(self.players) > MAX_ROSTER:
            raise ValueError(f"roster of {len(self.players)} exceeds {MAX_ROSTER} players")

    @property
    def n(self) -> int:
        return len(self.players)

    def index(self, player_id: str) -> int:
        return self.players.index(player_id)

    def mask(self, player_ids: Iterable[str]) -> int:
        m = 0
        for pid in player_ids:
            m |= 1 << self.players.index(pid)
        return m

    def members(self, mask: int) -> list[str]:
        return [p for j, p in enumerate(self.players) if mask >> j & 1]


def team_roster(ds: Dataset, team_id: str) -> Roster:
    return Roster(team_id, tuple(p.player_id for p in ds.roster(team_id)))


def extract_coalitions(ds: Dataset, team_id: str, roster: Roster | None = None) -> dict[int, list[ShotAction]]:
    """Group the team's actions by participant set (insertion order = first occurrence)."""
    roster = roster or team_roster(ds, team_id)
    out: dict[int, list[ShotAction]] = {}
    for a in ds.team_actions(team_id):
        out.setdefault(roster.mask(a.participants), []).append(a)
    return out


def player_support(observed: Iterable[int], i: int) -> RestrictedSupport:
    """Coalitions that can precede player ``i``, sorted by mask."""
    observed = set(observed)
    bit = 1 << i
    support = sorted({s & ~bit for s in observed if s & bit})
    if not support:
        raise EmptySupport(f"player {i} appears in no observed coalition")
    return RestrictedSupport(i, tuple(support), tuple(c in observed for c in support))


def compatible_unobserved(observed: Iterable[int]) -> frozenset[int]:
    """One-player removals of observed coalitions that were never observed (empty set excluded)."""
    observed = set(observed)
    out = set()
    for s in observed:
        rest = s
        while rest:
            bit = rest & -rest
            rest ^= bit
            out.add(s & ~bit)
    return frozenset(out - observed - {0})


CONTEXT_FEATURES = ("x", "y", "shot_angle", "first_pass_x", "first_pass_y", "avg_pass_distance")

SYNTH_RECIPE = {
    "players_nb": "coalition size",
    "pl_performance_index": "mean offensive_index of coalition members",
    "pass_nb": "max(coalition size - 1, 0)",
    **{f: "team mean over observed actions" for f in CONTEXT_FEATURES},
    "situation": Situation.OPEN_PLAY.value,
    "h_a": Venue.HOME.value,
}


@dataclass(frozen=True)
class TeamStats:
    team_id: str
    means: Mapping[str, float]


def team_stats(team_id: str, actions: Sequence[ShotAction]) -> TeamStats:
    if not actions:
        raise ValueError(f"team {team_id!r} has no actions")
    return TeamStats(team_id, {f: float(np.mean([getattr(a, f) for a in actions])) for f in CONTEXT_FEATURES})


def synth_coalition_features(mask: int, roster: Roster, stats: TeamStats, players: Mapping[str, Player]) -> ShotAction:
    """Feature row standing in for a coalition that never produced an action.

    The returned action carries no outcome (0) and uses the first member as a
    placeholder shooter; only its features matter.
    """
    members = roster.members(mask)
    if not members:
        raise ValueError("coalition must be non-empty")
    k = len(members)
    return ShotAction(
        action_id=f"synthetic:{roster.team_id}:{mask:x}",
        match_id="",
        team_id=roster.team_id,
        shooter_id=members[0],
        participants=frozenset(members),
        outcome=0,
        pass_nb=max(k - 1, 0),
        players_nb=k,
        pl_performance_index=float(np.mean([players[p].offensive_index for p in members])),
        h_a=Venue.HOME,
        situation=Situation.OPEN_PLAY,
        minute=0.0,
        **{f: stats.means[f] for f in CONTEXT_FEATURES},
    )


class Provenance(enum.Enum):
    OBSERVED_IN_SAMPLE = "observed_in_sample"
    UNOBSERVED_OUT_OF_SAMPLE = "unobserved_out_of_sample"
    EMPTY_CONVENTION = "empty_convention"


@dataclass(frozen=True)
class WorthEntry:
    worth: float
    provenance: Provenance
    action_count: int


class WorthTable(dict):
    """``mask -> WorthEntry``; indexing with :meth:`worth` gives plain floats."""

    @property
    def worth(self) -> dict[int, float]:
        return {c: e.worth for c, e in self.items()}


def aggregate(pred: np.ndarray, aggregation: str = "sum") -> float:
    if aggregation == "sum":
        return float(np.sum(pred))
    if aggregation == "mean":
        return float(np.mean(pred))
    raise ValueError(f"unknown aggregation {aggregation!r}")


def estimate_worth(
    observed: Mapping[int, Sequence[ShotAction]],
    unobserved: Iterable[int],
    model: FittedModel,
    roster: Roster,
    stats: TeamStats,
    players: Mapping[str, Player],
    aggregation: str = "sum",
) -> WorthTable:
    """Worth of every coalition a restricted Shapley computation can touch.

    Observed coalitions add up (or average, with ``aggregation="mean"``)
    the in-sample predictions of their actions; unobserved ones take one
    prediction on their synthetic row; the empty coalition is worth 0.
    """
    from .xga.features import Mode

    if model.spec.mode is not Mode.XGA:
        raise ValueError("worth requires a model fitted in XGA mode")
    table = WorthTable({0: WorthEntry(0.0, Provenance.EMPTY_CONVENTION, 0)})
    for mask, acts in observed.items():
        p = predict_proba(model, build_features(acts, model.spec))
        table[mask] = WorthEntry(aggregate(p, aggregation), Provenance.OBSERVED_IN_SAMPLE, len(acts))
    unobserved = sorted(unobserved)
    if unobserved:
        rows = [synth_coalition_features(c, roster, stats, players) for c in unobserved]
        p = predict_proba(model, build_features(rows, model.spec))
        for c, pc in zip(unobserved, p):
            table[c] = WorthEntry(float(pc), Provenance.UNOBSERVED_OUT_OF_SAMPLE, 0)
    return table


@dataclass(frozen=True)
class DistributionRow:
    cardinality: str
    all: int
    all_pct: float
    obs: int
    obs_pct: float


def coalition_distribution(observed: Iterable[int], n: int, k_max: int) -> list[DistributionRow]:
    """Possible versus observed coalitions by size, plus a totals row.

    Counts of possible coalitions are exact integers (``math.comb``).
    """
    if not 1 <= k_max <= n:
        raise ValueError("need 1 <= k_max <= n")
    sizes = [popcount(c) for c in observed]
    all_counts = [math.comb(n, k) for k in range(1, k_max + 1)]
    obs_counts = [sum(1 for s in sizes if s == k) for k in range(1, k_max + 1)]
    total_all, total_obs = sum(all_counts), sum(obs_counts)
    rows = [
        DistributionRow(str(k), a, 100.0 * a / total_all, o, 100.0 * o / total_obs if total_obs else 0.0)
        for k, a, o in zip(range(1, k_max + 1), all_counts, obs_counts)
    ]
    rows.append(DistributionRow("total", total_all, 100.0, total_obs, 100.0 if total_obs else 0.0))
    return rows


def write_distribution_csv(rows: Sequence[DistributionRow], path: Path | str, team_id: str | None = None) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow((["team"] if team_id is not None else []) + ["cardinality", "all", "all_pct", "obs", "obs_pct"])
        for r in rows:
            w.writerow(([team_id] if team_id is not None else [])
                       + [r.cardinality, r.all, f"{r.all_pct:.2f}", r.obs, f"{r.obs_pct:.2f}"])
