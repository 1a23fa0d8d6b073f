"""Synthetic ordinal-on-ordinal scenarios and selection-accuracy evaluation.

Scenarios follow the standard design of this problem class: 50 ordinal
predictors of which 12 carry effects (4 non-monotone, 4 monotone-nonlinear,
4 linear across levels) and 38 are noise, a 5-category response generated
through the cumulative logit model, and 5- or 9-level predictors.  The
default effect curves below are implementation choices with those
qualitative shapes; magnitudes were calibrated once (see
``scripts/calibrate_effect_curves.py``) and are user-overridable.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import expit

from ordfit.data import OrdinalDataset
from ordfit.errors import ConfigError, SeparationError
from ordfit.penalty import PenaltySpec
from ordfit.solver import (
    SolverConfig,
    auto_lambda_grid,
    fit_mle_newton,
    fit_path,
)
from ordfit._parallel import parallel_map

# Calibrated so that ordinal rank selection lands a mean AUC in (0.9, 1.0)
# at n=500 with 5 levels; frozen output of the calibration script.
DEFAULT_EFFECT_SCALE = 0.7

_MEMBER_SCALES = (1.0, 1.15, 0.9, 1.05)

_SHAPES_5 = {
    "peak": np.array([0.0, 1.0, 1.6, 1.0, 0.0]),
    "concave": np.array([0.0, 0.9, 1.35, 1.6, 1.7]),
    "linear": np.array([0.0, 0.4, 0.8, 1.2, 1.6]),
}
_SHAPES_9 = {
    "peak": 1.6 * (1.0 - ((np.arange(1, 10) - 5.0) / 4.0) ** 2),
    "concave": 1.7 * np.sqrt((np.arange(1, 10) - 1.0) / 8.0),
    "linear": 1.6 * (np.arange(1, 10) - 1.0) / 8.0,
}
_FUSED_5 = {
    "peak": np.array([0.0, 1.5, 1.5, 1.5, 0.0]),
    "concave": np.array([0.0, 0.0, 1.2, 1.2, 1.8]),
    "linear": np.array([0.0, 0.8, 0.8, 1.6, 1.6]),
}
_FUSED_9 = {
    "peak": np.array([0.0, 0.0, 1.5, 1.5, 1.5, 1.5, 1.5, 0.0, 0.0]),
    "concave": np.array([0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.8, 1.8, 1.8]),
    "linear": np.array([0.0, 0.6, 0.6, 0.6, 1.2, 1.2, 1.2, 1.8, 1.8]),
}


def default_informative_curves(
    levels: int, fused: bool, effect_scale: float, center_shift: float
) -> list:
    """Twelve default effect curves: 4 peaked, 4 concave, 4 linear.

    Each curve is a zero-mean shape scaled by ``effect_scale`` (and a small
    per-member factor so the quadruples are not carbon copies) plus
    ``center_shift``, which positions the response against the thresholds.
    Fused variants use stepwise-constant plateaus instead.
    """
    if levels == 5:
        shapes = _FUSED_5 if fused else _SHAPES_5
    elif levels == 9:
        shapes = _FUSED_9 if fused else _SHAPES_9
    else:
        raise ConfigError(
            "default curves exist for 5 or 9 levels; pass explicit curves otherwise"
        )
    curves = []
    for kind in ("peak", "concave", "linear"):
        base = shapes[kind]
        for s in _MEMBER_SCALES:
            z = base - base.mean()
            curves.append(effect_scale * s * z + center_shift)
    return curves


@dataclass
class SimulationScenario:
    """Generator settings for one synthetic design.

    ``informative`` holds the true effect curves (one vector per relevant
    predictor); the remaining ``noise_count`` predictors have identically
    zero curves.  When ``informative`` is omitted the 12 default curves for
    ``levels_per_predictor`` are built, shifted so the predictor sum is
    centered against ``thresholds``.
    """

    p: int = 50
    levels_per_predictor: int = 5
    n: int = 500
    thresholds: tuple = (5.5, 6.5, 7.5, 8.5)
    fused_variant: bool = False
    effect_scale: float = DEFAULT_EFFECT_SCALE
    informative: list = None
    noise_count: int = None
    seed: object = 0

    def __post_init__(self):
        self.thresholds = np.asarray(self.thresholds, dtype=float)
        if np.any(np.diff(self.thresholds) <= 0):
            raise ConfigError("scenario thresholds must be strictly increasing")
        if self.levels_per_predictor < 2:
            raise ConfigError("predictors need at least 2 levels")
        if self.informative is None:
            shift = float(self.thresholds.mean()) / 12.0
            self.informative = default_informative_curves(
                self.levels_per_predictor, self.fused_variant,
                self.effect_scale, shift,
            )
        self.informative = [np.asarray(cv, dtype=float) for cv in self.informative]
        for cv in self.informative:
            if cv.size != self.levels_per_predictor:
                raise ConfigError("effect curve length does not match the level count")
        if self.noise_count is None:
            self.noise_count = self.p - len(self.informative)
        if len(self.informative) + self.noise_count != self.p:
            raise ConfigError("informative count plus noise count must equal p")
        if self.noise_count < 0:
            raise ConfigError("more curves than predictors")

    @property
    def c(self) -> int:
        return self.thresholds.size + 1

    def all_curves(self) -> list:
        zero = np.zeros(self.levels_per_predictor)
        return list(self.informative) + [zero] * self.noise_count


@dataclass
class GroundTruth:
    """Relevant-variable labels and nonzero adjacent-difference labels.

    ``relevant_variables`` marks the informative block (0-based indices);
    ``true_differences`` maps a variable to the 0-based indices l of
    adjacent pairs (level l+1 vs l+2) whose true effects differ.
    """

    relevant_variables: set
    true_differences: dict
    levels: int
    p: int

    def all_contrasts(self) -> list:
        return [(j, l) for j in range(self.p) for l in range(self.levels - 1)]


def generate(scenario: SimulationScenario):
    """Draw one dataset from the scenario: uniform levels, cumulative logit response."""
    rng = np.random.default_rng(scenario.seed)
    k = scenario.levels_per_predictor
    x = rng.integers(1, k + 1, size=(scenario.n, scenario.p))
    curves = scenario.all_curves()
    w = np.zeros(scenario.n)
    for j, cv in enumerate(curves):
        w += cv[x[:, j] - 1]
    cum = expit(scenario.thresholds[None, :] - w[:, None])
    u = rng.random(scenario.n)
    y = (u[:, None] > cum).sum(axis=1) + 1
    data = OrdinalDataset(
        x=x, y=y, levels=np.full(scenario.p, k), c=scenario.c
    )
    true_diffs = {}
    for j, cv in enumerate(scenario.informative):
        nz = np.flatnonzero(np.diff(cv) != 0.0)
        if nz.size:
            true_diffs[j] = set(int(l) for l in nz)
    truth = GroundTruth(
        relevant_variables=set(range(len(scenario.informative))),
        true_differences=true_diffs,
        levels=k,
        p=scenario.p,
    )
    return data, truth


# ---------------------------------------------------------------------------
# ROC / AUC
# ---------------------------------------------------------------------------


@dataclass
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    auc: float


def _roc_from_scores(scores: np.ndarray, labels: np.ndarray) -> RocCurve:
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    lab = labels[order].astype(float)
    cut = np.flatnonzero(np.diff(s) != 0.0)
    cut = np.concatenate([cut, [s.size - 1]])
    tps = np.cumsum(lab)[cut]
    fps = (cut + 1.0) - tps
    n_pos = max(lab.sum(), 1.0)
    n_neg = max(lab.size - lab.sum(), 1.0)
    tpr = np.concatenate([[0.0], tps / n_pos])
    fpr = np.concatenate([[0.0], fps / n_neg])
    return RocCurve(fpr=fpr, tpr=tpr, auc=float(np.trapezoid(tpr, fpr)))


def _fill_unranked(scores: np.ndarray, seed) -> np.ndarray:
    """Give unranked items (NaN scores) a seeded random strict tail order."""
    scores = np.asarray(scores, dtype=float).copy()
    missing = np.flatnonzero(np.isnan(scores))
    if missing.size:
        finite = scores[~np.isnan(scores)]
        base = (finite.min() if finite.size else 0.0) - 1.0
        rng = np.random.default_rng(seed)
        order = rng.permutation(missing.size)
        scores[missing] = base - order
    return scores


def roc_selection(ranking, truth: GroundTruth, seed=0) -> RocCurve:
    """Variable-selection ROC for a relevance ranking.

    ``ranking`` is one score per variable, larger meaning selected earlier;
    NaN marks variables the method never ranked, which are coerced to the
    back in seeded random order.  AUC is the trapezoid area over the
    relevant/noise labeling.
    """
    scores = _fill_unranked(np.asarray(ranking, dtype=float), seed)
    if scores.size != truth.p:
        raise ConfigError("ranking must cover all variables")
    labels = np.zeros(truth.p, dtype=bool)
    labels[sorted(truth.relevant_variables)] = True
    return _roc_from_scores(scores, labels)


def roc_fusion(difference_scores: dict, truth: GroundTruth, seed=0) -> RocCurve:
    """Fusion ROC: each adjacent-level contrast is one classification instance.

    ``difference_scores`` maps (variable, difference index) to the lambda at
    which that difference first became nonzero along the path; missing
    contrasts are coerced to the back in seeded random order.
    """
    contrasts = truth.all_contrasts()
    scores = np.array(
        [difference_scores.get(cl, np.nan) for cl in contrasts], dtype=float
    )
    scores = _fill_unranked(scores, seed)
    labels = np.array(
        [l in truth.true_differences.get(j, set()) for j, l in contrasts]
    )
    return _roc_from_scores(scores, labels)


def fusion_rates(fit, truth: GroundTruth):
    """(FPR, FNR) of the nonzero-difference pattern of one fit vs truth."""
    fp = tn = fn = tp = 0
    for j in range(truth.p):
        est = set(np.flatnonzero(fit.split_params[j] != 0.0))
        true = truth.true_differences.get(j, set())
        for l in range(truth.levels - 1):
            if l in true:
                tp, fn = (tp + 1, fn) if l in est else (tp, fn + 1)
            else:
                fp, tn = (fp + 1, tn) if l in est else (fp, tn + 1)
    fpr = fp / max(fp + tn, 1)
    fnr = fn / max(fn + tp, 1)
    return fpr, fnr


def path_entry_scores(path, p: int) -> np.ndarray:
    """Entry lambdas as a selection score vector (NaN for never-active)."""
    scores = np.full(p, np.nan)
    for j, lam in path.entry_order.items():
        scores[j] = lam
    return scores


def difference_entry_scores(path, levels) -> dict:
    """First lambda at which each adjacent difference becomes nonzero."""
    entry = {}
    for lam, fit in zip(path.lambda_grid, path.fits):
        if fit is None:
            continue
        for j, nz in fit.nonzero_differences.items():
            for l in nz:
                entry.setdefault((j, int(l)), float(lam))
    return entry


# ---------------------------------------------------------------------------
# the unpenalized forward-stepwise baseline
# ---------------------------------------------------------------------------


def forward_stepwise_aic(data: OrdinalDataset, config: SolverConfig = None) -> list:
    """Forward AIC selection over grouped dummies with the Fisher-scoring MLE.

    Returns the entry order of selected predictors.  Any candidate model
    whose fit diverges or fails to converge aborts the whole procedure with
    :class:`SeparationError`, matching how unpenalized stepwise routines
    behave on quasi-separated data.
    """
    config = config or SolverConfig()
    n, p, c = data.n, data.p, data.c
    counts = np.bincount(data.y, minlength=c + 1)[1:c + 1]
    nz = counts[counts > 0]
    ll0 = float(np.sum(nz * np.log(nz / n)))
    current_aic = 2.0 * (c - 1) - 2.0 * ll0
    included = []
    remaining = list(range(p))
    while remaining:
        best_j, best_aic, best_defer = None, None, None
        for j in remaining:
            cols = included + [j]
            sub = OrdinalDataset(
                x=data.x[:, cols], y=data.y,
                levels=data.levels[cols], c=c,
            )
            fit = fit_mle_newton(sub, config)
            if not fit.converged:
                raise SeparationError(
                    f"stepwise candidate with predictors {cols} did not converge"
                )
            npar = (c - 1) + int(np.sum(data.levels[cols] - 1))
            aic = 2.0 * npar + 2.0 * n * fit.objective
            if best_aic is None or aic < best_aic:
                best_j, best_aic = j, aic
        if best_aic < current_aic - 1e-8:
            included.append(best_j)
            remaining.remove(best_j)
            current_aic = best_aic
        else:
            break
    return included


# ---------------------------------------------------------------------------
# replication driver
# ---------------------------------------------------------------------------

METHODS = ("ors", "orf", "numeric-lasso", "mle-stepwise")

_METHOD_KIND = {
    "ors": "smooth-group",
    "orf": "fused",
    "numeric-lasso": "numeric-lasso",
}


@dataclass
class MethodResult:
    auc: float
    failed: bool
    all_converged: bool
    error: str = ""


@dataclass
class ReplicationSummary:
    """Per-method AUC samples and failure counts over R replicates."""

    scenario: SimulationScenario
    replicates: int
    results: dict = field(default_factory=dict)  # method -> list[MethodResult]

    def aucs(self, method: str) -> np.ndarray:
        return np.array(
            [r.auc for r in self.results[method] if not r.failed], dtype=float
        )

    def mean_auc(self, method: str) -> float:
        vals = self.aucs(method)
        return float(vals.mean()) if vals.size else float("nan")

    def failure_count(self, method: str) -> int:
        return sum(r.failed for r in self.results[method])

    def convergence_count(self, method: str) -> int:
        return sum(r.all_converged for r in self.results[method])


def _run_method(method, data, truth, config, grid_points, grid_floor, tail_seed):
    if method == "mle-stepwise":
        order = forward_stepwise_aic(data, config)
        scores = np.full(data.p, np.nan)
        for pos, j in enumerate(order):
            scores[j] = float(len(order) - pos)
        roc = roc_selection(scores, truth, seed=tail_seed)
        return MethodResult(auc=roc.auc, failed=False, all_converged=True)
    kind = _METHOD_KIND[method]
    grid = auto_lambda_grid(data, kind, n_points=grid_points, floor_ratio=grid_floor)
    spec = PenaltySpec.for_data(kind, grid, data.levels)
    path = fit_path(data, spec, config)
    roc = roc_selection(path_entry_scores(path, data.p), truth, seed=tail_seed)
    all_conv = not path.failures and all(f.converged for f in path.fits)
    return MethodResult(auc=roc.auc, failed=False, all_converged=all_conv)


def run_replications(
    scenario: SimulationScenario,
    methods=("ors", "orf", "numeric-lasso"),
    r: int = 20,
    config: SolverConfig = None,
    grid_points: int = 30,
    grid_floor: float = 1e-3,
) -> ReplicationSummary:
    """Generate R datasets and score each method's selection AUC on each.

    Per-replicate failures (separation, non-convergence of the stepwise
    baseline) are recorded and excluded from AUC samples, never fatal.
    Everything is deterministic given the scenario seed and R.
    """
    if r < 1:
        raise ConfigError("replicate count must be >= 1")
    for m in methods:
        if m not in METHODS:
            raise ConfigError(f"unknown method {m!r}; expected subset of {METHODS}")
    config = config or SolverConfig(tol=1e-7)

    def one_replicate(rep):
        scen = replace(scenario, seed=(scenario.seed, rep), informative=scenario.informative)
        data, truth = generate(scen)
        out = {}
        for mi, method in enumerate(methods):
            try:
                out[method] = _run_method(
                    method, data, truth, config, grid_points, grid_floor,
                    tail_seed=(scenario.seed, rep, mi),
                )
            except (SeparationError, np.linalg.LinAlgError) as exc:
                out[method] = MethodResult(
                    auc=float("nan"), failed=True, all_converged=False,
                    error=f"{type(exc).__name__}: {exc}",
                )
        return out

    per_rep = parallel_map(one_replicate, range(r))
    summary = ReplicationSummary(scenario=scenario, replicates=r)
    for method in methods:
        summary.results[method] = [per_rep[i][method] for i in range(r)]
    return summary
