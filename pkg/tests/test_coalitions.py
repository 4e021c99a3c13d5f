import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shotprs.coalitions import (
    Provenance, Roster, coalition_distribution, compatible_unobserved, estimate_worth, extract_coalitions,
    player_support, synth_coalition_features, team_roster, team_stats, write_distribution_csv,
)
from shotprs.dataset import Dataset, Situation, Venue
from shotprs.shapley import EmptySupport
from shotprs.xga import FeatureSpec, build_features, fit_cloglog, predict_proba

from conftest import make_action, make_players

A, B, C = 0b001, 0b010, 0b100


def dataset(groups, ids=("A", "B", "C")):
    acts = tuple(make_action(f"a{j}", g) for j, g in enumerate(groups))
    return Dataset(make_players(ids), acts)


def test_extract_counts():
    ds = dataset([{"A", "B"}, {"A", "B"}, {"A", "C"}])
    obs = extract_coalitions(ds, "T1")
    assert {m: len(v) for m, v in obs.items()} == {A | B: 2, A | C: 1}


def test_extract_empty_team():
    ds = dataset([{"A"}])
    assert extract_coalitions(ds, "T9", Roster("T9", ())) == {}


def test_support_examples():
    assert player_support([A | B, A | C], 0).coalitions == (B, C)
    assert player_support([A], 0).coalitions == (0,)
    sup = player_support([A | B, A | B | C], 0)
    assert sup.coalitions == (B, B | C)
    assert sup.observed == (False, False)
    with pytest.raises(EmptySupport):
        player_support([A | B], 2)


def test_compatible_unobserved():
    assert compatible_unobserved([A | B, A | B | C]) == {A, B, A | C, B | C}
    assert compatible_unobserved([A]) == set()
    assert compatible_unobserved(range(1, 8)) == set()


@given(st.sets(st.integers(1, 255), min_size=1, max_size=30))
def test_completeness_and_disjointness(observed):
    unobs = compatible_unobserved(observed)
    assert not unobs & observed
    for s in observed:
        for i in range(8):
            if s >> i & 1:
                rest = s & ~(1 << i)
                assert rest == 0 or rest in observed or rest in unobs


def test_synth_recipe():
    players = {p.player_id: p for p in make_players(["A", "B", "C", "D"], indices=[80, 90, 85, 70])}
    roster = Roster("T1", ("A", "B", "C", "D"))
    acts = [make_action("a1", {"A"}, x=80.0), make_action("a2", {"B"}, x=90.0)]
    stats = team_stats("T1", acts)
    row = synth_coalition_features(0b0111, roster, stats, players)
    assert (row.pl_performance_index, row.players_nb, row.pass_nb) == (85.0, 3, 2)
    assert row.x == 85.0
    assert row.situation is Situation.OPEN_PLAY and row.h_a is Venue.HOME
    single = synth_coalition_features(0b1000, roster, stats, players)
    assert single.pass_nb == 0 and single.pl_performance_index == 70.0


def test_synth_equal_composition_gives_equal_rows():
    players = {p.player_id: p for p in make_players(["A", "B", "C", "D"], indices=[80, 90, 90, 80])}
    roster = Roster("T1", ("A", "B", "C", "D"))
    stats = team_stats("T1", [make_action("a1", {"A"})])
    m = build_features([synth_coalition_features(0b0011, roster, stats, players),
                        synth_coalition_features(0b1100, roster, stats, players)], FeatureSpec.xga())
    assert np.array_equal(m.values[0], m.values[1])


def test_estimate_worth(small_filtered, small_raw):
    spec = FeatureSpec.xga()
    model = fit_cloglog(build_features(small_raw.actions, spec), spec=spec)
    team = small_filtered.team_ids[0]
    roster = team_roster(small_filtered, team)
    obs = extract_coalitions(small_filtered, team, roster)
    unobs = compatible_unobserved(obs)
    table = estimate_worth(obs, unobs, model, roster, team_stats(team, small_filtered.team_actions(team)),
                           small_filtered.player_map)
    assert table[0].worth == 0.0 and table[0].provenance is Provenance.EMPTY_CONVENTION
    for mask, acts in obs.items():
        entry = table[mask]
        assert entry.provenance is Provenance.OBSERVED_IN_SAMPLE and entry.action_count == len(acts) >= 1
        expected = predict_proba(model, build_features(acts, spec)).sum()
        assert abs(entry.worth - expected) < 1e-12
    for mask in unobs:
        assert table[mask].provenance is Provenance.UNOBSERVED_OUT_OF_SAMPLE
        assert 0.0 < table[mask].worth < 1.0
    mean_table = estimate_worth(obs, (), model, roster, team_stats(team, small_filtered.team_actions(team)),
                                small_filtered.player_map, aggregation="mean")
    some = next(iter(obs))
    assert mean_table[some].worth == pytest.approx(table[some].worth / len(obs[some]), rel=1e-12)


def test_estimate_worth_requires_xga(small_raw):
    model = fit_cloglog(build_features(small_raw.actions, FeatureSpec.xg()))
    with pytest.raises(ValueError):
        estimate_worth({}, (), model, Roster("T1", ()), None, {})


def test_two_action_sum():
    # two actions predicted 0.1 and 0.3 -> worth 0.4
    from shotprs.coalitions import aggregate
    assert aggregate(np.array([0.1, 0.3])) == pytest.approx(0.4, abs=1e-15)


def test_table_one_all_column():
    rows = coalition_distribution([], 18, 10)
    by_k = {r.cardinality: r.all for r in rows}
    assert by_k["3"] == 816
    assert by_k["5"] == 8568
    assert by_k["total"] == 199139


def test_distribution_observed_counts(tmp_path):
    rows = coalition_distribution([A, B, A | B, A | B | C], 3, 3)
    assert [r.obs for r in rows] == [2, 1, 1, 4]
    assert rows[0].obs_pct == 50.0
    write_distribution_csv(rows, tmp_path / "t1.csv", "T1")
    lines = (tmp_path / "t1.csv").read_text().splitlines()
    assert lines[0] == "team,cardinality,all,all_pct,obs,obs_pct"
    assert lines[-1].startswith("T1,total,7,")


def test_distribution_big_n_exact():
    rows = coalition_distribution([], 64, 64)
    assert rows[-1].all == 2**64 - 1


@given(st.integers(2, 70), st.data())
def test_pascal(n, data):
    k = data.draw(st.integers(1, n - 1))
    a = {r.cardinality: r.all for r in coalition_distribution([], n, n)}
    b = {r.cardinality: r.all for r in coalition_distribution([], n - 1, n - 1)}
    assert a[str(k)] == b.get(str(k - 1), 1) + b.get(str(k), 0)


def test_roster_limit():
    with pytest.raises(ValueError):
        Roster("T1", tuple(f"p{j}" for j in range(65)))
