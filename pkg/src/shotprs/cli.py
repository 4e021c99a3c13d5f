"""Command-line entry point.

Exit codes: 0 success, 2 input error (missing file, bad config), 3 data
validation error, 4 pipeline error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
import time
import warnings
from contextlib import contextmanager
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .coalitions import coalition_distribution, compatible_unobserved, extract_coalitions, team_roster
from .config import ConfigError, bootstrap_config, dump_config, learner_config, load_config
from .dataset import Dataset, DatasetError, filter_dataset, generate_synthetic, load_dataset, write_dataset
from .inference import (
    PrsRow, bootstrap_phi, build_team_game, efficiency_metric, point_estimates, prs_table, quadrant,
    read_prs_csv, write_prs_csv, write_prs_json,
)
from .xga import (
    METRIC_NAMES, FeatureSpec, ModelKind, SeparationDetected, build_features, compute_vif, feature_importance,
    fit_model, oob_bootstrap_eval, save_model,
)

EXIT_OK, EXIT_INPUT, EXIT_VALIDATION, EXIT_PIPELINE = 0, 2, 3, 4

log = logging.getLogger("shotprs")


class StageError(Exception):
    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {type(cause).__name__}: {cause}")


@contextmanager
def stage(name: str, timings: dict | None = None):
    start = time.perf_counter()
    try:
        yield
    except (DatasetError, FileNotFoundError, ConfigError, StageError):
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc
    finally:
        if timings is not None:
            timings[name] = round(time.perf_counter() - start, 3)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class Context:
    def __init__(self, args: argparse.Namespace):
        overrides: dict = {}
        if args.seed is not None:
            overrides.setdefault("bootstrap", {})["base_seed"] = args.seed
        if args.out is not None:
            overrides.setdefault("paths", {})["out"] = args.out
        if args.team:
            overrides["teams"] = list(args.team)
        self.cfg = load_config(args.config, overrides)
        self.quiet = args.quiet
        self.out = Path(self.cfg["paths"]["out"])

    def say(self, *parts) -> None:
        if not self.quiet:
            print(*parts)

    def load_raw(self) -> Dataset:
        paths = self.cfg["paths"]
        if paths["actions"] is None and paths["players"] is None:
            s = self.cfg["synthetic"]
            return generate_synthetic(int(s["seed"]), int(s["n_teams"]), int(s["players_per_team"]),
                                      int(s["actions_per_team"]), float(s["goal_prevalence"]))
        if paths["actions"] is None or paths["players"] is None:
            raise ConfigError("paths.actions and paths.players must be given together")
        for key in ("players", "actions"):
            if not Path(paths[key]).is_file():
                raise FileNotFoundError(f"MissingFile: {paths[key]}")
        f = self.cfg["filter"]
        return load_dataset(paths["actions"], paths["players"], f["situation_aliases"], f["role_aliases"],
                            bool(f["strict"]))

    def filtered(self, raw: Dataset) -> Dataset:
        return filter_dataset(raw, int(self.cfg["filter"]["min_actions"]))

    def teams(self, ds: Dataset) -> list[str]:
        wanted = self.cfg["teams"]
        teams = [t for t in ds.team_ids if ds.team_actions(t) and ds.roster(t)]
        if wanted:
            unknown = sorted(set(wanted) - set(ds.team_ids))
            if unknown:
                raise ConfigError(f"unknown teams {unknown}")
            teams = [t for t in teams if t in wanted]
        return teams


# --- subcommands ---------------------------------------------------------

def cmd_synth(ctx: Context) -> int:
    s = ctx.cfg["synthetic"]
    ds = generate_synthetic(int(s["seed"]), int(s["n_teams"]), int(s["players_per_team"]),
                            int(s["actions_per_team"]), float(s["goal_prevalence"]))
    actions_path, players_path = write_dataset(ds, ctx.out)
    (ctx.out / "meta.json").write_text(json.dumps(dict(ds.meta), indent=1, sort_keys=True), encoding="utf-8")
    ctx.say(f"wrote {actions_path}, {players_path}, {ctx.out / 'meta.json'}")
    ctx.say(f"{len(ds.actions)} actions, prevalence {ds.meta['empirical_prevalence']:.4f}")
    return EXIT_OK


def cmd_validate(ctx: Context) -> int:
    raw = ctx.load_raw()
    ds = ctx.filtered(raw)
    ctx.say(f"source: {raw.provenance}")
    for step in ds.filter_log:
        ctx.say(f"filter {step} ({step.unit})")
    for team in ctx.teams(ds):
        roster = team_roster(ds, team)
        observed = extract_coalitions(ds, team, roster)
        ctx.say(f"team {team}: actions={len(ds.team_actions(team))} roster={roster.n} "
                f"observed_coalitions={len(observed)} unobserved_compatible={len(compatible_unobserved(observed))}")
    return EXIT_OK


def _train(ctx: Context, raw: Dataset, mode: str | None = None):
    mode = mode or ctx.cfg["model"]["mode"]
    spec = FeatureSpec.for_mode(mode)
    train = build_features(raw.actions, spec)
    learner = learner_config(ctx.cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SeparationDetected)
        model = fit_model(train, spec, learner)
    return spec, train, learner, model


def cmd_train(ctx: Context) -> int:
    raw = ctx.load_raw()
    with stage("train"):
        _, _, _, model = _train(ctx, raw)
        ctx.out.mkdir(parents=True, exist_ok=True)
        digest = save_model(model, ctx.out / "model.json")
    ctx.say(f"wrote {ctx.out / 'model.json'} (sha256 {digest[:12]})")
    return EXIT_OK


def write_metrics_table(ctx: Context, raw: Dataset, path: Path) -> None:
    """Out-of-bag metrics for both learners on both feature sets, estimate and SE columns."""
    ev = ctx.cfg["evaluate"]
    results = {}
    for mode in ("XGA", "XG"):
        spec = FeatureSpec.for_mode(mode)
        m = build_features(raw.actions, spec)
        for kind in (ModelKind.CLOGLOG, ModelKind.GBT):
            res = oob_bootstrap_eval(m, spec, learner_config(ctx.cfg, kind.value), int(ev["B"]), int(ev["seed"]))
            results[(mode, kind.value)] = res
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        header = ["metric"]
        for mode, kind in results:
            header += [f"{mode.lower()}_{kind}_est", f"{mode.lower()}_{kind}_se"]
        w.writerow(header)
        for name in METRIC_NAMES:
            row = [name]
            for res in results.values():
                row += [repr(res.mean[name]), repr(res.se[name])]
            w.writerow(row)


def cmd_evaluate(ctx: Context) -> int:
    raw = ctx.load_raw()
    ev = ctx.cfg["evaluate"]
    ctx.out.mkdir(parents=True, exist_ok=True)
    with stage("evaluate"):
        write_metrics_table(ctx, raw, ctx.out / "metrics.csv")
        spec = FeatureSpec.xga()
        m = build_features(raw.actions, spec)
        vif, flag = compute_vif(m)
        with (ctx.out / "vif.csv").open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["feature", "vif", "collinear"])
            for c, v, f in zip(m.columns, vif, flag):
                w.writerow([c, repr(float(v)), int(f)])
        with (ctx.out / "importance.csv").open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["learner", "feature", "estimate", "low", "high", "standardized", "standardized_low",
                        "standardized_high"])
            for kind in (ModelKind.GBT, ModelKind.CLOGLOG):
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", SeparationDetected)
                    model = fit_model(m, spec, learner_config(ctx.cfg, kind.value))
                imp = feature_importance(model, m, int(ev["importance_B"]), int(ev["seed"]), float(ev["level"]))
                for k, c in enumerate(imp.features):
                    std = ["", "", ""] if imp.standardized is None else [
                        repr(float(imp.standardized[k])), repr(float(imp.standardized_low[k])),
                        repr(float(imp.standardized_high[k]))]
                    w.writerow([kind.value, c, repr(float(imp.estimate[k])), repr(float(imp.low[k])),
                                repr(float(imp.high[k])), *std])
    ctx.say(f"wrote metrics.csv, vif.csv, importance.csv to {ctx.out}")
    return EXIT_OK


def write_coalition_tables(ctx: Context, ds: Dataset, teams: Sequence[str], path: Path) -> dict:
    counts = {}
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["team", "cardinality", "all", "all_pct", "obs", "obs_pct"])
        for team in teams:
            roster = team_roster(ds, team)
            observed = extract_coalitions(ds, team, roster)
            n = ctx.cfg["shapley"]["n_override"] or roster.n
            k_max = min(int(ctx.cfg["shapley"]["k_max"]), n)
            for r in coalition_distribution(observed, n, k_max):
                w.writerow([team, r.cardinality, r.all, f"{r.all_pct:.2f}", r.obs, f"{r.obs_pct:.2f}"])
            counts[team] = {"actions": len(ds.team_actions(team)), "n": n, "observed": len(observed),
                            "unobserved_compatible": len(compatible_unobserved(observed))}
    return counts


def cmd_coalitions(ctx: Context) -> int:
    ds = ctx.filtered(ctx.load_raw())
    ctx.out.mkdir(parents=True, exist_ok=True)
    counts = write_coalition_tables(ctx, ds, ctx.teams(ds), ctx.out / "coalitions.csv")
    for team, c in counts.items():
        ctx.say(f"team {team}: " + " ".join(f"{k}={v}" for k, v in c.items()))
    return EXIT_OK


def write_scatter(ctx: Context, raw: Dataset, ds: Dataset, prs: dict[str, list[dict]], path: Path) -> dict:
    """Join PRS rows with finishing efficiency; returns quadrant counts per team."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SeparationDetected)
        _, _, _, xg_model = _train(ctx, raw, "XG")
    summary = {}
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["team", "player", "prs", "g90", "xg90", "diff", "quadrant"])
        for team, rows in prs.items():
            scored = [r for r in rows if r["prs"] != ""]
            eff = {e.player: e for e in efficiency_metric(ds, xg_model, [r["player"] for r in scored])}
            if not scored:
                continue
            median = float(np.median([float(r["prs"]) for r in scored]))
            counts = {q: 0 for q in ("top-left", "top-right", "bottom-left", "bottom-right")}
            for r in scored:
                e = eff.get(r["player"])
                if e is None:
                    continue
                q = quadrant(float(r["prs"]), e.diff, median)
                counts[q] += 1
                w.writerow([team, r["player"], r["prs"], repr(e.g90), repr(e.xg90), repr(e.diff), q])
            summary[team] = {"median_prs": median, **counts}
    return summary


def _prs_files(out: Path) -> dict[str, Path]:
    return {p.stem[len("prs_"):]: p for p in sorted(out.glob("prs_*.csv"))}


def cmd_scatter(ctx: Context) -> int:
    files = _prs_files(ctx.out)
    if not files:
        raise FileNotFoundError(f"MissingFile: no prs_<team>.csv in {ctx.out}; run `shotprs prs` first")
    raw = ctx.load_raw()
    ds = ctx.filtered(raw)
    with stage("scatter"):
        summary = write_scatter(ctx, raw, ds, {t: read_prs_csv(p) for t, p in files.items()},
                                ctx.out / "scatter.csv")
        (ctx.out / "quadrants.json").write_text(json.dumps(summary, indent=1, sort_keys=True), encoding="utf-8")
    for team, s in summary.items():
        ctx.say(f"team {team}: " + " ".join(f"{k}={v}" for k, v in s.items()))
    return EXIT_OK


def cmd_run_prs(ctx: Context) -> int:
    cfg = ctx.cfg
    if cfg["model"]["mode"] != "XGA":
        raise ConfigError("the worth model must use XGA mode")
    timings: dict[str, float] = {}
    out = ctx.out
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.resolved.yaml").write_text(dump_config(cfg), encoding="utf-8")

    with stage("load", timings):
        raw = ctx.load_raw()
        ds = ctx.filtered(raw)
        teams = ctx.teams(ds)
    with stage("train", timings):
        spec, train, learner, model = _train(ctx, raw)
        save_model(model, out / "model.json")
    with stage("evaluate", timings):
        write_metrics_table(ctx, raw, out / "metrics.csv")
    with stage("coalitions", timings):
        counts = write_coalition_tables(ctx, ds, teams, out / "coalitions.csv")
        games = [build_team_game(ds, t, train, spec, cfg["shapley"]["n_override"]) for t in teams]
    bcfg = bootstrap_config(cfg)
    with stage("bootstrap", timings):
        point = point_estimates(games, model, train, bcfg)
        boot = bootstrap_phi(train, games, spec, learner, bcfg, model)
    with stage("prs", timings):
        pmap = ds.player_map
        all_rows: list[PrsRow] = []
        for g in games:
            rows = prs_table(g.team_id, g.players, point[g.team_id], boot.matrices[g.team_id], bcfg,
                             {p: pmap[p].role.value for p in g.players}, g.action_counts)
            write_prs_csv(rows, out / f"prs_{g.team_id}.csv")
            all_rows += rows
        meta = {
            "B": bcfg.B, "base_seed": bcfg.base_seed, "refit_model": bcfg.refit_model,
            "n": {g.team_id: g.n for g in games}, "coalitions": counts,
            "filter_log": [str(s) for s in ds.filter_log], "model_sha256": _sha256(out / "model.json"),
            "missing_replications": boot.missing, "retries": boot.retries,
            "mean_distinct_fraction": float(np.nanmean(boot.distinct_fraction)),
            "aggregation": bcfg.aggregation, "missing_worth": bcfg.missing_worth,
        }
        write_prs_json(all_rows, out / "prs.json", meta)
    with stage("scatter", timings):
        summary = write_scatter(ctx, raw, ds, {t: read_prs_csv(p) for t, p in _prs_files(out).items()
                                               if t in teams}, out / "scatter.csv")
        (out / "quadrants.json").write_text(json.dumps(summary, indent=1, sort_keys=True), encoding="utf-8")

    artifacts = ["config.resolved.yaml", "model.json", "metrics.csv", "coalitions.csv",
                 *[f"prs_{t}.csv" for t in teams], "prs.json", "scatter.csv", "quadrants.json"]
    manifest = {
        "version": __version__,
        "source": raw.provenance,
        "config": cfg,
        "seeds": {"base_seed": bcfg.base_seed, "evaluate_seed": cfg["evaluate"]["seed"],
                  "model_seed": cfg["model"]["gbt"]["seed"], "synthetic_seed": cfg["synthetic"]["seed"]},
        "artifacts": {name: _sha256(out / name) for name in artifacts},
        "run": {"created": time.strftime("%Y-%m-%dT%H:%M:%S%z"), "timings": timings},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True), encoding="utf-8")
    for r in all_rows:
        prs = "-" if r.prs is None else f"{r.prs:+.2f}"
        ctx.say(f"{r.team} {r.player:<10} {r.role:<4} actions={r.actions:<4} phi={r.phi_hat:+.4f} "
                f"se={r.se:.4f} prs={prs}")
    ctx.say(f"artifacts written to {out}")
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "synth": cmd_synth,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "coalitions": cmd_coalitions,
    "prs": cmd_run_prs,
    "scatter": cmd_scatter,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML config (or builtin:NAME); default from $SHOTPRS_CONFIG")
    common.add_argument("--seed", type=int, help="override bootstrap.base_seed")
    common.add_argument("--out", help="output directory")
    common.add_argument("--team", action="append", help="restrict to a team (repeatable)")
    common.add_argument("--quiet", action="store_true")
    parser = argparse.ArgumentParser(prog="shotprs", description="Player contribution to shot actions.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _report(code: int, exc: BaseException) -> int:
    err = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, StageError):
        err.update(stage=exc.stage, cause=type(exc.cause).__name__)
    if getattr(exc, "row", None) is not None:
        err["row"] = exc.row
    print(json.dumps(err), file=sys.stderr)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(levelname)s %(message)s")
    try:
        ctx = Context(args)
        return COMMANDS[args.command](ctx)
    except (FileNotFoundError, ConfigError) as exc:
        return _report(EXIT_INPUT, exc)
    except DatasetError as exc:
        return _report(EXIT_VALIDATION, exc)
    except StageError as exc:
        return _report(EXIT_PIPELINE, exc)
    except Exception as exc:  # pragma: no cover - last-resort guard
        return _report(EXIT_PIPELINE, exc)


if __name__ == "__main__":
    sys.exit(main())
