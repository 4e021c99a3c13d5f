import csv
from pathlib import Path

import pytest

from shotprs.dataset import ACTION_COLUMNS, PLAYER_COLUMNS, filter_dataset, generate_synthetic


def write_csv(path: Path, header, rows) -> Path:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return path


def player_row(pid, team="T1", role="MID", index=80.0, minutes=900.0, goals=0):
    return [pid, team, f"name {pid}", role, index, minutes, goals]


def action_row(aid, participants, shooter=None, situation="open_play", outcome=0, team="T1",
               players_nb=None, h_a="h", x=85.0):
    parts = participants.split(";")
    return [aid, "M1", team, shooter or parts[0], participants, outcome, x, 50.0, 20.0, 50.0, 50.0,
            len(parts) - 1, len(parts) if players_nb is None else players_nb, 20.0, 80.0, h_a, situation, 10.0]


@pytest.fixture
def csv_files(tmp_path):
    """Factory writing players/actions files; returns their paths."""

    def make(players, actions):
        return (write_csv(tmp_path / "players.csv", PLAYER_COLUMNS, players),
                write_csv(tmp_path / "actions.csv", ACTION_COLUMNS, actions))

    return make


@pytest.fixture(scope="session")
def small_raw():
    return generate_synthetic(seed=3, n_teams=2, players_per_team=8, actions_per_team=300)


@pytest.fixture(scope="session")
def small_filtered(small_raw):
    return filter_dataset(small_raw, 20)


def make_players(ids, team="T1", indices=None, role=None):
    from shotprs.dataset import Player, Role

    indices = indices or [80.0] * len(ids)
    return tuple(Player(pid, team, pid, role or Role.MIDFIELDER, float(ix), 900.0, 0) for pid, ix in zip(ids, indices))


def make_action(aid, participants, team="T1", outcome=0, **kw):
    from shotprs.dataset import ShotAction, Situation, Venue

    parts = frozenset(participants)
    fields = dict(action_id=aid, match_id="M1", team_id=team, shooter_id=sorted(parts)[0], participants=parts,
                  outcome=outcome, x=85.0, y=50.0, shot_angle=20.0, first_pass_x=50.0, first_pass_y=50.0,
                  pass_nb=len(parts) - 1, players_nb=len(parts), avg_pass_distance=20.0,
                  pl_performance_index=80.0, h_a=Venue.HOME, situation=Situation.OPEN_PLAY, minute=10.0)
    fields.update(kw)
    return ShotAction(**fields)
