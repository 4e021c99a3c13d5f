"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` or directly with
``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import math
import shutil
import sys
import tempfile
import time
import warnings
from pathlib import Path

import numpy as np
import pytest

from shotprs.cli import main as cli_main
from shotprs.coalitions import coalition_distribution
from shotprs.config import load_config
from shotprs.dataset import Role, Situation, filter_dataset, generate_synthetic
from shotprs.inference import BootstrapConfig, bootstrap_phi, bootstrap_se, build_team_game, point_estimates, prs_table
from shotprs.shapley import RestrictedSupport, classical_shapley, restricted_shapley, restricted_weights
from shotprs.xga import (
    ActionMatrix, FeatureSpec, LearnerConfig, ModelKind, SeparationDetected, auc_score, build_features,
    evaluate_metrics, fit_cloglog, fit_gbt, fit_model, oob_bootstrap_eval, predict_proba,
)

CRITERIA: dict[int, tuple[str, object]] = {}


def criterion(num: int, title: str):
    def register(fn):
        CRITERIA[num] = (title, fn)
        return fn
    return register


def _permutation_average(n, v):
    phi = np.zeros(n)
    for order in itertools.permutations(range(n)):
        mask = 0
        for i in order:
            phi[i] += v[mask | 1 << i] - v[mask]
            mask |= 1 << i
    return phi / math.factorial(n)


def _games(count=100, seed=2024):
    rng = np.random.default_rng(seed)
    for g in range(count):
        n = (3, 4, 5, 6)[g % 4]
        v = rng.normal(size=1 << n)
        v[0] = 0.0
        yield n, v


@criterion(1, "classical Shapley vs all-permutations oracle")
def classical_oracle():
    start = time.perf_counter()
    err = eff = 0.0
    for n, v in _games():
        phi = classical_shapley(n, v).phi
        err = max(err, float(np.max(np.abs(phi - _permutation_average(n, v)))))
        eff = max(eff, abs(phi.sum() - v[-1]))
    elapsed = time.perf_counter() - start
    return err < 1e-9 and eff < 1e-9 and elapsed < 5.0, f"max|dphi|={err:.2e} max|eff|={eff:.2e} {elapsed:.2f}s"


@criterion(2, "restricted value with full supports equals classical")
def restricted_reduction():
    err = 0.0
    for n, v in _games():
        supports = {i: RestrictedSupport(i, tuple(m for m in range(1 << n) if not m >> i & 1)) for i in range(n)}
        phi_r = restricted_shapley(n, supports, dict(enumerate(v))).phi
        err = max(err, float(np.max(np.abs(phi_r - classical_shapley(n, v).phi))))
    return err < 1e-9, f"max|dphi|={err:.2e}"


@criterion(3, "restricted weights positive and normalized")
def weight_normalization():
    rng = np.random.default_rng(3)
    worst, positive = 0.0, True
    for _ in range(1000):
        n = int(rng.integers(2, 21))
        i = int(rng.integers(n))
        size = int(rng.integers(1, min(64, 1 << (n - 1)) + 1))
        raw = rng.choice(1 << (n - 1), size=size, replace=False)
        # insert a zero bit at position i so player i is never in the support
        support = sorted(int((r & ((1 << i) - 1)) | ((r >> i) << (i + 1))) for r in raw)
        w = restricted_weights(n, support)
        positive &= bool(np.all(w > 0))
        worst = max(worst, abs(w.sum() - 1.0))
    hand = restricted_weights(3, [0b010, 0b110])
    hand_err = float(np.max(np.abs(hand - [1 / 3, 2 / 3])))
    ok = positive and worst < 1e-12 and hand_err < 1e-12
    return ok, f"max|sum-1|={worst:.2e} n=3 hand weights err={hand_err:.2e}"


@criterion(4, "hand-worked restricted value n=3")
def hand_worked():
    worth = {0b011: 0.3, 0b010: 0.1, 0b111: 0.5, 0b110: 0.2}
    phi = restricted_shapley(3, {0: RestrictedSupport(0, (0b010, 0b110))}, worth, [0]).phi[0]
    exact = (1 / 3) * 0.2 + (2 / 3) * 0.3
    return abs(phi - exact) < 1e-12 and round(phi, 4) == 0.2667, f"phi_1={phi:.12f}"


@criterion(5, "coalition counts for n=18")
def combinatorics():
    rows = {r.cardinality: r.all for r in coalition_distribution([], 18, 10)}
    ok = rows["3"] == 816 and rows["5"] == 8568 and rows["total"] == 199139
    return ok, f"k=3:{rows['3']} k=5:{rows['5']} total:{rows['total']}"


@criterion(6, "cloglog intercept identity and coefficient recovery")
def glm_correctness():
    start = time.perf_counter()
    H = 2721
    y = np.zeros(H)
    y[:1720] = 1.0  # 1720/2721 = 1 - 1/e to 1.5e-8
    b0 = fit_cloglog(ActionMatrix(np.empty((H, 0)), y, (), tuple(map(str, range(H))))).parameters[0]
    spec = FeatureSpec.xga()
    hits = None
    for seed in range(100):
        ds = generate_synthetic(seed, 2, 15, 2500)
        m = build_features(ds.actions, spec)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SeparationDetected)
            model = fit_model(m, spec, LearnerConfig(ModelKind.CLOGLOG))
        truth = np.array([ds.meta["intercept"]] + [ds.meta["coefficients"][c] for c in spec.columns])
        within = np.abs(model.parameters - truth) <= 3 * np.array(model.train_meta["std_errors"])
        hits = within.astype(int) if hits is None else hits + within
    elapsed = time.perf_counter() - start
    ok = abs(b0) < 1e-6 and int(hits.min()) >= 95 and elapsed < 60
    return ok, f"|b0|={abs(b0):.1e} min coverage {int(hits.min())}/100 over {len(hits)} coefs {elapsed:.1f}s"


@criterion(7, "boosted trees separable AUC and determinism")
def gbt_sanity():
    x = np.linspace(0, 1, 400)
    m = ActionMatrix(x[:, None], (x > 0.5).astype(float), ("x",), tuple(map(str, range(400))))
    model = fit_gbt(m, rounds=10)
    auc = auc_score(m.y, predict_proba(model, m))
    ds = generate_synthetic(1, 2, 15, 300)
    mx = build_features(ds.actions, FeatureSpec.xga())
    same = np.array_equal(predict_proba(fit_gbt(mx, rounds=30, seed=8), mx),
                          predict_proba(fit_gbt(mx, rounds=30, seed=8), mx))
    return auc == 1.0 and same, f"AUC={auc} identical={same}"


@criterion(8, "metric identities")
def metric_identities():
    y = np.array([1, 0, 0, 1, 1, 0, 1, 0])
    r = evaluate_metrics(y, y.astype(float), 0.5)
    perfect = (r.sensitivity, r.specificity, r.f1, r.precision, r.mcc, r.auc, r.brier) == (1, 1, 1, 1, 1, 1, 0)
    yb = np.tile([0, 1], 50)
    c = evaluate_metrics(yb, np.full(100, 0.5), 0.5)
    const = c.auc == 0.5 and c.brier == 0.25
    return perfect and const, f"perfect={perfect} constant: AUC={c.auc} Brier={c.brier}"


@criterion(9, "out-of-bag AUC of XGA exceeds XG")
def nested_direction():
    wins = 0
    cfg = LearnerConfig(ModelKind.CLOGLOG)
    for seed in range(100):
        ds = generate_synthetic(1000 + seed, 2, 15, 600)
        auc = {}
        for spec in (FeatureSpec.xg(), FeatureSpec.xga()):
            res = oob_bootstrap_eval(build_features(ds.actions, spec), spec, cfg, B=20, seed=seed)
            auc[spec.mode.value] = res.mean["auc"]
        wins += auc["XGA"] > auc["XG"]
    return wins >= 90, f"XGA ahead in {wins}/100 runs"


@criterion(10, "bootstrap SE of a sample mean")
def bootstrap_calibration():
    start = time.perf_counter()
    ses = []
    for seed in range(50):
        x = np.random.default_rng(seed).normal(size=100)
        ses.append(bootstrap_se(x, np.mean, B=1000, seed=10_000 + seed))
    mean_se = float(np.mean(ses))
    elapsed = time.perf_counter() - start
    return abs(mean_se / 0.1 - 1) < 0.2 and elapsed < 30, f"mean SE={mean_se:.4f} (target 0.1) {elapsed:.1f}s"


@criterion(11, "PRS invariant to positive worth scaling")
def prs_invariance():
    raw = generate_synthetic(21, 2, 12, 500)
    ds = filter_dataset(raw, 60)
    spec = FeatureSpec.xga()
    train = build_features(raw.actions, spec)
    games = [build_team_game(ds, t, train, spec) for t in ds.team_ids]
    learner = LearnerConfig(ModelKind.GBT, rounds=30)
    model = fit_model(train, spec, learner)
    tables = {}
    for k in (1.0, 2.0, 1e3, 0.01):
        cfg = BootstrapConfig(B=30, base_seed=5, worth_scale=k)
        point = point_estimates(games, model, train, cfg)
        boot = bootstrap_phi(train, games, spec, learner, cfg)
        tables[k] = {g.team_id: prs_table(g.team_id, g.players, point[g.team_id], boot.matrices[g.team_id], cfg)
                     for g in games}
    worst, same_order = 0.0, True
    for k, teams in tables.items():
        for t, rows in teams.items():
            base = tables[1.0][t]
            same_order &= [r.player for r in rows] == [r.player for r in base]
            worst = max(worst, max(abs(r.prs - b.prs) for r, b in zip(rows, base)))
    return worst < 1e-9 and same_order, f"max|dPRS|={worst:.1e} ranking unchanged={same_order}"


@criterion(12, "end-to-end run is deterministic and filters hold")
def end_to_end():
    tmp = Path(tempfile.mkdtemp(prefix="shotprs-accept-"))
    try:
        # same config, same output directory: the first run is snapshotted before the rerun
        start = time.perf_counter()
        codes = []
        for run in ("a", "b"):
            codes.append(cli_main(["prs", "--config", "builtin:synthetic", "--out", str(tmp / "run"), "--quiet"]))
            shutil.copytree(tmp / "run", tmp / run)
        per_run = (time.perf_counter() - start) / 2
        names = sorted(p.name for p in (tmp / "a").iterdir())
        differing = [n for n in names if n != "manifest.json"
                     and (tmp / "a" / n).read_bytes() != (tmp / "b" / n).read_bytes()]
        manifests = [json.loads((tmp / r / "manifest.json").read_text()) for r in ("a", "b")]
        for mf in manifests:
            mf.pop("run")
        if manifests[0] != manifests[1]:
            differing.append("manifest.json")
        hashes_ok = all(
            hashlib.sha256((tmp / "a" / n).read_bytes()).hexdigest() == h
            for n, h in manifests[0]["artifacts"].items()
        )
        cfg = load_config("builtin:synthetic")
        s = cfg["synthetic"]
        ds = filter_dataset(generate_synthetic(s["seed"], s["n_teams"], s["players_per_team"],
                                               s["actions_per_team"], s["goal_prevalence"]),
                            cfg["filter"]["min_actions"])
        pmap = ds.player_map
        penalties = sum(a.situation is Situation.PENALTY for a in ds.actions)
        keepers = sum(pmap[p].role is Role.GOALKEEPER for a in ds.actions for p in a.participants)
        counts = {p.player_id: 0 for t in ds.team_ids for p in ds.roster(t)}
        for a in ds.actions:
            for p in a.participants:
                counts[p] += 1
        short = sum(c < cfg["filter"]["min_actions"] for c in counts.values())
        ok = (codes == [0, 0] and not differing and hashes_ok and per_run < 600
              and penalties == 0 and keepers == 0 and short == 0)
        detail = (f"exit={codes} {len(names)} files, differing={differing or 'none'} "
                  f"{per_run:.0f}s/run penalties={penalties} goalkeepers={keepers} under-threshold={short}")
        return ok, detail
    finally:
        shutil.rmtree(tmp, ignore_errors=True)


def _line(num: int, ok: bool, detail: str) -> str:
    return f"{'PASS' if ok else 'FAIL'}  criterion {num:>2}  {CRITERIA[num][0]}: {detail}"


@pytest.fixture
def emit(pytestconfig):
    reporter = pytestconfig.pluginmanager.getplugin("terminalreporter")

    def write(text: str) -> None:
        if reporter is not None:
            reporter.write_line("")
            reporter.write_line(text)
        else:
            print(text)

    return write


@pytest.mark.parametrize("num", sorted(CRITERIA), ids=lambda n: f"criterion_{n:02d}")
def test_criterion(num, emit):
    ok, detail = CRITERIA[num][1]()
    emit(_line(num, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for num in sorted(CRITERIA):
        ok, detail = CRITERIA[num][1]()
        failures += not ok
        print(_line(num, ok, detail), flush=True)
    sys.exit(1 if failures else 0)
