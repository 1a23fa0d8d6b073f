"""Command-line front end.

Subcommands: fit, path, cv, stabsel, simulate, roc.  All outputs are
deterministic given identical inputs and seed: one JSON document per run
plus tidy CSV tables, no timestamps, full-precision numbers.  Exit codes:
0 success, 2 configuration error, 3 data error, 4 internal failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from ordfit import __version__
from ordfit.dataio import (
    read_config_file,
    read_ordinal_csv,
    read_table,
    write_json,
    write_table,
)
from ordfit.errors import ConfigError, DataError, OrdfitError
from ordfit.penalty import PenaltySpec
from ordfit.selection import cross_validate, stability_selection
from ordfit.simlab import (
    GroundTruth,
    SimulationScenario,
    roc_selection,
    run_replications,
)
from ordfit.solver import (
    SolverConfig,
    auto_lambda_grid,
    fit_path,
    _FITTERS,
)

_PENALTY_ALIASES = {
    "smooth": "smooth-group",
    "smooth-group": "smooth-group",
    "fused": "fused",
    "numeric": "numeric-lasso",
    "numeric-lasso": "numeric-lasso",
}


class _Parser(argparse.ArgumentParser):
    """Argparse variant that reports errors on one machine-parsable line."""

    def error(self, message):
        print(f"error: config: {message}", file=sys.stderr)
        raise SystemExit(2)


def _build_parser() -> _Parser:
    parser = _Parser(prog="ordfit", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, penalty=True):
        p.add_argument("--input", required=True, help="input CSV (or scenario JSON)")
        p.add_argument("--config", default=None, help="flat key=value config file")
        if penalty:
            p.add_argument("--response", default=None, help="response column name")
            p.add_argument(
                "--penalty", default=None,
                choices=sorted(_PENALTY_ALIASES), help="penalty kind",
            )
            p.add_argument(
                "--lambda-grid", default=None,
                help="'auto' or a file with one lambda per line (decreasing)",
            )
            p.add_argument("--grid-points", type=int, default=None)
            p.add_argument("--grid-floor", type=float, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--format", default=None, help="comma list of json,csv")
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--max-outer-iters", type=int, default=None)
        return p

    p_fit = common(sub.add_parser("fit", help="fit at a single lambda"))
    p_fit.add_argument("--lam", type=float, default=None, help="raw lambda")
    p_fit.add_argument("--lam-n", type=float, default=None, help="lambda times n")

    common(sub.add_parser("path", help="warm-started lambda path"))

    p_cv = common(sub.add_parser("cv", help="K-fold cross-validation"))
    p_cv.add_argument("--folds", type=int, default=None)
    p_cv.add_argument("--metric", default=None, choices=["brier", "rps"])

    p_st = common(sub.add_parser("stabsel", help="stability selection"))
    p_st.add_argument("--subsamples", type=int, default=None)
    p_st.add_argument("--subsample-fraction", type=float, default=None)
    p_st.add_argument("--pi-thr", type=float, default=None)

    p_sim = common(sub.add_parser("simulate", help="replication study"), penalty=False)
    p_sim.add_argument("--replicates", type=int, default=None)
    p_sim.add_argument("--methods", default=None, help="comma list of methods")
    p_sim.add_argument("--grid-points", type=int, default=None)
    p_sim.add_argument("--grid-floor", type=float, default=None)

    p_roc = common(sub.add_parser("roc", help="selection ROC from a score table"),
                   penalty=False)
    p_roc.add_argument("--truth", default=None, help="CSV with variable,relevant")
    return parser


def _resolve(ns, key, default, cast=None, file_cfg=None):
    """Flag value, else config-file value, else default."""
    val = getattr(ns, key.replace("-", "_"), None)
    if val is None and file_cfg and key in file_cfg:
        val = file_cfg[key]
        if cast is not None:
            try:
                val = cast(val)
            except ValueError as exc:
                raise ConfigError(f"config key {key!r}: {exc}") from exc
    if val is None:
        val = default
    return val


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _cast_bool(v):
    if isinstance(v, bool):
        return v
    if v.lower() in _TRUE:
        return True
    if v.lower() in _FALSE:
        return False
    raise ValueError(f"expected a boolean, got {v!r}")


class _Run:
    """Resolved options plus shared output helpers for one command."""

    def __init__(self, ns):
        self.ns = ns
        self.file_cfg = read_config_file(ns.config) if ns.config else {}
        self.command = ns.command
        self.seed = int(self._get("seed", 0, int))
        self.out_dir = ns.out
        formats = self._get("format", "json,csv", str)
        self.formats = {f.strip() for f in formats.split(",") if f.strip()}
        bad = self.formats - {"json", "csv"}
        if bad:
            raise ConfigError(f"unknown output format(s): {sorted(bad)}")
        self.warnings = []
        os.makedirs(self.out_dir, exist_ok=True)

    def _get(self, key, default, cast=None):
        return _resolve(self.ns, key, default, cast, self.file_cfg)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            tol=float(self._get("tol", 1e-8, float)),
            max_outer_iters=int(self._get("max-outer-iters", 1000, int)),
        )

    def level_maps(self):
        maps = {}
        for key, value in self.file_cfg.items():
            if key.startswith("levels."):
                maps[key[len("levels."):]] = [v.strip() for v in value.split(",")]
        return maps

    def load_data(self):
        response = self._get("response", None, str)
        if not response:
            raise ConfigError("--response is required (flag or config file)")
        data, meta = read_ordinal_csv(
            self._get("input", None, str), response, self.level_maps()
        )
        self.warnings.extend(meta["warnings"])
        return data, meta

    def penalty_kind(self):
        raw = self._get("penalty", None, str)
        if raw is None:
            raise ConfigError("--penalty is required (flag or config file)")
        if raw not in _PENALTY_ALIASES:
            raise ConfigError(f"unknown penalty {raw!r}")
        return _PENALTY_ALIASES[raw]

    def lambda_grid(self, data, kind):
        raw = self._get("lambda-grid", "auto", str)
        n_points = int(self._get("grid-points", 30, int))
        floor = float(self._get("grid-floor", 1e-3, float))
        if raw == "auto":
            return auto_lambda_grid(data, kind, n_points=n_points, floor_ratio=floor)
        try:
            with open(raw, "r", encoding="utf-8") as fh:
                vals = [float(line.strip()) for line in fh if line.strip()]
        except OSError as exc:
            raise ConfigError(f"cannot read lambda grid file {raw}: {exc}") from exc
        except ValueError as exc:
            raise ConfigError(f"bad lambda value in {raw}: {exc}") from exc
        return np.asarray(vals, dtype=float)

    def echo(self, extra=None):
        # the output directory is not a semantic input; leaving it out keeps
        # reruns into fresh directories byte-identical
        doc = {
            "command": self.command,
            "seed": self.seed,
            "options": {
                k: v
                for k, v in vars(self.ns).items()
                if k not in {"command", "out"} and v is not None
            },
            "config_file": self.file_cfg,
            "version": __version__,
        }
        if extra:
            doc.update(extra)
        return doc

    def emit(self, json_doc, tables):
        if "json" in self.formats:
            json_doc = dict(json_doc)
            json_doc["warnings"] = self.warnings
            write_json(os.path.join(self.out_dir, "run.json"), json_doc)
        if "csv" in self.formats:
            for name, (header, rows) in tables.items():
                write_table(os.path.join(self.out_dir, name), header, rows)


def _coef_rows(data, params, lam=None, n=None):
    rows = []
    for j, name in enumerate(data.names):
        for l, value in enumerate(params.groups[j], start=1):
            row = [name, l, value]
            if lam is not None:
                row = [lam, lam * n] + row
            rows.append(row)
    return rows


def _threshold_rows(params, lam=None, n=None):
    rows = []
    for r, value in enumerate(params.thresholds, start=1):
        row = [r, value]
        if lam is not None:
            row = [lam, lam * n] + row
        rows.append(row)
    return rows


def cmd_fit(run: _Run):
    data, meta = run.load_data()
    kind = run.penalty_kind()
    lam = run._get("lam", None, float)
    lam_n = run._get("lam-n", None, float)
    if (lam is None) == (lam_n is None):
        raise ConfigError("fit needs exactly one of --lam or --lam-n")
    if lam is None:
        lam = float(lam_n) / data.n
    spec = PenaltySpec.for_data(kind, [lam], data.levels)
    fit = _FITTERS[kind](data, spec, float(lam), run.solver_config())
    if not fit.converged:
        run.warnings.append(
            f"solver did not converge within the iteration budget at lambda={lam!r}"
        )
    doc = run.echo(
        {
            "results": {
                "lambda": lam,
                "lambda_times_n": lam * data.n,
                "objective": fit.objective,
                "iterations": fit.iterations,
                "converged": fit.converged,
                "active_variables": sorted(data.names[j] for j in fit.active_groups),
                "thresholds": fit.params.thresholds,
                "coefficients": {
                    data.names[j]: fit.params.groups[j] for j in range(data.p)
                },
                "remaps": meta["remaps"],
            }
        }
    )
    run.emit(
        doc,
        {
            "coefficients.csv": (
                ["variable", "level", "coefficient"],
                _coef_rows(data, fit.params),
            ),
            "thresholds.csv": (
                ["threshold_index", "value"],
                _threshold_rows(fit.params),
            ),
        },
    )


def cmd_path(run: _Run):
    data, meta = run.load_data()
    kind = run.penalty_kind()
    grid = run.lambda_grid(data, kind)
    spec = PenaltySpec.for_data(kind, grid, data.levels)
    path = fit_path(data, spec, run.solver_config())
    coef_rows, thr_rows = [], []
    for lam, fit in zip(path.lambda_grid, path.fits):
        if fit is None:
            continue
        if not fit.converged:
            run.warnings.append(f"non-convergence at lambda={float(lam)!r}")
        coef_rows.extend(_coef_rows(data, fit.params, float(lam), data.n))
        thr_rows.extend(_threshold_rows(fit.params, float(lam), data.n))
    entry_rows = [
        [data.names[j], path.entry_order.get(j, float("nan")),
         path.entry_order.get(j, float("nan")) * data.n]
        for j in range(data.p)
    ]
    doc = run.echo(
        {
            "results": {
                "lambda_grid": path.lambda_grid,
                "lambda_grid_times_n": path.lambda_grid * data.n,
                "entry_order": {
                    data.names[j]: lam for j, lam in sorted(path.entry_order.items())
                },
                "total_iterations": path.total_iterations,
                "failures": path.failures,
                "remaps": meta["remaps"],
            }
        }
    )
    run.emit(
        doc,
        {
            "path_coefficients.csv": (
                ["lambda", "lambda_times_n", "variable", "level", "coefficient"],
                coef_rows,
            ),
            "path_thresholds.csv": (
                ["lambda", "lambda_times_n", "threshold_index", "value"],
                thr_rows,
            ),
            "entry_order.csv": (
                ["variable", "entry_lambda", "entry_lambda_times_n"],
                entry_rows,
            ),
        },
    )


def cmd_cv(run: _Run):
    data, meta = run.load_data()
    kind = run.penalty_kind()
    grid = run.lambda_grid(data, kind)
    spec = PenaltySpec.for_data(kind, grid, data.levels)
    folds = int(run._get("folds", 5, int))
    metric = run._get("metric", "brier", str)
    cv = cross_validate(
        data, spec, k=folds, config=run.solver_config(), seed=run.seed, metric=metric
    )
    score_rows = []
    for f in range(folds):
        for i, lam in enumerate(cv.lambda_grid):
            score_rows.append(
                [lam, lam * data.n, f, "validation", cv.fold_scores[f, i]]
            )
            score_rows.append([lam, lam * data.n, f, "training", cv.train_scores[f, i]])
    curve_rows = [
        [lam, lam * data.n, cv.mean_scores[i], cv.mean_train_scores[i]]
        for i, lam in enumerate(cv.lambda_grid)
    ]
    doc = run.echo(
        {
            "results": {
                "metric": metric,
                "folds": folds,
                "optimal_lambda": cv.optimal_lambda,
                "optimal_lambda_times_n": cv.optimal_lambda * data.n,
                "lambda_grid": cv.lambda_grid,
                "mean_scores": cv.mean_scores,
                "mean_train_scores": cv.mean_train_scores,
                "remaps": meta["remaps"],
            }
        }
    )
    run.emit(
        doc,
        {
            "cv_scores.csv": (
                ["lambda", "lambda_times_n", "fold", "split", "score"],
                score_rows,
            ),
            "cv_curve.csv": (
                ["lambda", "lambda_times_n", "mean_validation_score",
                 "mean_training_score"],
                curve_rows,
            ),
        },
    )


def cmd_stabsel(run: _Run):
    data, meta = run.load_data()
    kind = run.penalty_kind()
    grid = run.lambda_grid(data, kind)
    spec = PenaltySpec.for_data(kind, grid, data.levels)
    b = int(run._get("subsamples", 100, int))
    frac = float(run._get("subsample-fraction", 0.5, float))
    pi_thr = float(run._get("pi-thr", 0.6, float))
    st = stability_selection(
        data, spec, b=b, subsample_fraction=frac,
        config=run.solver_config(), seed=run.seed, pi_thr=pi_thr,
    )
    rows = []
    for j in range(data.p):
        for i, lam in enumerate(st.lambda_grid):
            rows.append([data.names[j], lam, lam * data.n, st.pi_hat[j, i]])
    doc = run.echo(
        {
            "results": {
                "subsamples": st.b,
                "subsample_size": st.subsample_size,
                "pi_thr": st.pi_thr,
                "lambda_grid": st.lambda_grid,
                "max_frequency": {
                    data.names[j]: float(st.pi_hat[j].max()) for j in range(data.p)
                },
                "n_subsample_failures": len(st.failures),
                "remaps": meta["remaps"],
            }
        }
    )
    run.emit(
        doc,
        {
            "stability_path.csv": (
                ["variable", "lambda", "lambda_times_n", "selection_frequency"],
                rows,
            ),
        },
    )


def _load_scenario(path, seed):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario file {path} is not valid JSON: {exc}") from exc
    kwargs = {"seed": seed}
    keys = {
        "p": int, "levels": int, "n": int, "effect_scale": float,
        "fused_variant": _cast_bool, "noise_count": int,
    }
    rename = {"levels": "levels_per_predictor"}
    for key, cast in keys.items():
        if key in raw:
            kwargs[rename.get(key, key)] = cast(raw[key])
    if "thresholds" in raw:
        kwargs["thresholds"] = [float(v) for v in raw["thresholds"]]
    if "informative" in raw:
        kwargs["informative"] = [np.asarray(cv, dtype=float) for cv in raw["informative"]]
    unknown = set(raw) - set(keys) - {"thresholds", "informative"}
    if unknown:
        raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
    return SimulationScenario(**kwargs)


def cmd_simulate(run: _Run):
    scenario = _load_scenario(run._get("input", None, str), run.seed)
    methods_raw = run._get("methods", "ors,orf,numeric-lasso", str)
    methods = tuple(m.strip() for m in methods_raw.split(",") if m.strip())
    r = int(run._get("replicates", 20, int))
    grid_points = int(run._get("grid-points", 30, int))
    grid_floor = float(run._get("grid-floor", 1e-3, float))
    config = SolverConfig(
        tol=float(run._get("tol", 1e-7, float)),
        max_outer_iters=int(run._get("max-outer-iters", 1000, int)),
    )
    summary = run_replications(
        scenario, methods=methods, r=r, config=config,
        grid_points=grid_points, grid_floor=grid_floor,
    )
    rows = []
    for method in methods:
        for i, res in enumerate(summary.results[method]):
            rows.append([i, method, res.auc, res.failed, res.all_converged, res.error])
    doc = run.echo(
        {
            "results": {
                "replicates": r,
                "methods": list(methods),
                "mean_auc": {m: summary.mean_auc(m) for m in methods},
                "failure_counts": {m: summary.failure_count(m) for m in methods},
                "convergence_counts": {m: summary.convergence_count(m) for m in methods},
            }
        }
    )
    run.emit(
        doc,
        {
            "auc.csv": (
                ["replicate", "method", "auc", "failed", "all_converged", "error"],
                rows,
            ),
        },
    )


def cmd_roc(run: _Run):
    truth_path = run._get("truth", None, str)
    if not truth_path:
        raise ConfigError("roc needs --truth (CSV with variable,relevant)")
    t_header, t_rows = read_table(truth_path)
    s_header, s_rows = read_table(run._get("input", None, str))
    for header, path, need in (
        (t_header, truth_path, {"variable", "relevant"}),
        (s_header, run._get("input", None, str), {"variable", "score"}),
    ):
        if not need.issubset(header):
            raise DataError(f"{path} must have columns {sorted(need)}")
    ti = {name: t_header.index(name) for name in ("variable", "relevant")}
    si = {name: s_header.index(name) for name in ("variable", "score")}
    scores_by_name = {}
    for i, row in enumerate(s_rows):
        raw = row[si["score"]].strip()
        scores_by_name[row[si["variable"]]] = (
            float("nan") if raw in {"", "NA", "nan"} else float(raw)
        )
    names, labels, scores = [], set(), []
    for i, row in enumerate(t_rows):
        name = row[ti["variable"]]
        names.append(name)
        flag = row[ti["relevant"]].strip()
        if flag not in {"0", "1"}:
            raise DataError("relevant must be 0 or 1", row=i + 2, column="relevant")
        if flag == "1":
            labels.add(len(names) - 1)
        scores.append(scores_by_name.get(name, float("nan")))
    truth = GroundTruth(
        relevant_variables=labels, true_differences={}, levels=2, p=len(names)
    )
    roc = roc_selection(np.asarray(scores), truth, seed=run.seed)
    doc = run.echo({"results": {"auc": roc.auc, "n_variables": len(names)}})
    run.emit(
        doc,
        {
            "roc_points.csv": (
                ["fpr", "tpr"],
                [[roc.fpr[i], roc.tpr[i]] for i in range(roc.fpr.size)],
            ),
        },
    )


_COMMANDS = {
    "fit": cmd_fit,
    "path": cmd_path,
    "cv": cmd_cv,
    "stabsel": cmd_stabsel,
    "simulate": cmd_simulate,
    "roc": cmd_roc,
}


def main(argv=None) -> int:
    parser = _build_parser()
    ns = parser.parse_args(argv)
    try:
        run = _Run(ns)
        _COMMANDS[ns.command](run)
        return 0
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: data: {exc}", file=sys.stderr)
        return 3
    except OrdfitError as exc:
        print(f"error: internal: {exc}", file=sys.stderr)
        return 4
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: internal: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
