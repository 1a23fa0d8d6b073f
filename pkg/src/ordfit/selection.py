"""Tuning-parameter selection: cross-validated Brier score and stability selection."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ordfit.data import OrdinalDataset
from ordfit.errors import ConfigError, DataError
from ordfit.model import probability_table
from ordfit.penalty import PenaltySpec
from ordfit.solver import SolverConfig, fit_path
from ordfit._parallel import parallel_map


def brier_score(pi: np.ndarray, y: np.ndarray) -> float:
    """Sum over observations and categories of (indicator - probability)^2."""
    pi = np.atleast_2d(np.asarray(pi, dtype=float))
    y = np.asarray(y)
    if pi.shape[0] != y.size:
        raise DataError(
            f"probability rows ({pi.shape[0]}) do not match responses ({y.size})"
        )
    v = np.zeros_like(pi)
    v[np.arange(y.size), y - 1] = 1.0
    return float(((v - pi) ** 2).sum(axis=1).sum())


def ranked_probability_score(pi: np.ndarray, y: np.ndarray) -> float:
    """Cumulative analogue of the Brier score, sensitive to ordinal distance.

    Sums, over the first c-1 categories, the squared gaps between cumulative
    predicted probabilities and cumulative truth indicators.
    """
    pi = np.atleast_2d(np.asarray(pi, dtype=float))
    y = np.asarray(y)
    if pi.shape[0] != y.size:
        raise DataError(
            f"probability rows ({pi.shape[0]}) do not match responses ({y.size})"
        )
    cum_pi = np.cumsum(pi, axis=1)[:, :-1]
    cum_v = (np.arange(1, pi.shape[1])[None, :] >= y[:, None]).astype(float)
    return float(((cum_pi - cum_v) ** 2).sum(axis=1).sum())


_METRICS = {"brier": brier_score, "rps": ranked_probability_score}


@dataclass
class CvResult:
    """Cross-validation scores per lambda plus the chosen optimum."""

    lambda_grid: np.ndarray
    fold_scores: np.ndarray      # K x L validation scores (NaN where a fit failed)
    mean_scores: np.ndarray      # length L, NaN where any fold is missing
    train_scores: np.ndarray     # K x L in-sample scores of the fold fits
    mean_train_scores: np.ndarray
    optimal_lambda: float
    fold_assignments: np.ndarray
    metric: str = "brier"


def assign_folds(y: np.ndarray, k: int, seed) -> np.ndarray:
    """Seeded fold labels in 0..k-1, stratified by response when possible.

    Stratification (round-robin within each category after a seeded
    shuffle) is used when every observed category has at least k members,
    so no training fold loses an entire response level.  K equal to n is
    leave-one-out and maps observation i to fold i, with no randomness.
    """
    y = np.asarray(y)
    n = y.size
    if k < 2 or k > n:
        raise ConfigError(f"fold count must be in [2, n]; got {k} with n={n}")
    if k == n:
        return np.arange(n)
    rng = np.random.default_rng(seed)
    folds = np.empty(n, dtype=int)
    values, counts = np.unique(y, return_counts=True)
    if np.all(counts >= k):
        for v in values:
            idx = np.flatnonzero(y == v)
            rng.shuffle(idx)
            folds[idx] = np.arange(idx.size) % k
    else:
        perm = rng.permutation(n)
        folds[perm] = np.arange(n) % k
    return folds


def cross_validate(
    data: OrdinalDataset,
    spec: PenaltySpec,
    k: int = 5,
    config: SolverConfig = None,
    seed=0,
    metric: str = "brier",
    fold_assignments=None,
) -> CvResult:
    """K-fold cross-validation of the penalty level over ``spec.lambda_grid``.

    Each fold fits a warm-started path on its training portion and scores
    the held-out portion.  Lambdas with a failed fit in any fold are
    excluded from the argmin; ties break toward the larger (more
    parsimonious) lambda.  ``fold_assignments`` overrides the seeded
    assignment with explicit labels in 0..k-1.
    """
    if metric not in _METRICS:
        raise ConfigError(f"unknown metric {metric!r}; expected one of {sorted(_METRICS)}")
    score_fn = _METRICS[metric]
    config = config or SolverConfig()
    if fold_assignments is not None:
        folds = np.asarray(fold_assignments)
        if folds.shape != (data.n,) or folds.min() < 0 or folds.max() >= k:
            raise ConfigError("fold assignments must be n labels in 0..k-1")
    else:
        folds = assign_folds(data.y, k, seed)
    grid = np.asarray(spec.lambda_grid, dtype=float)
    n_lam = grid.size

    def one_fold(f):
        train = data.subset(folds != f)
        valid = data.subset(folds == f)
        path = fit_path(train, spec, config)
        val_scores = np.full(n_lam, np.nan)
        tr_scores = np.full(n_lam, np.nan)
        for i, fit in enumerate(path.fits):
            if fit is None:
                continue
            val_scores[i] = score_fn(probability_table(valid, fit.params).pi, valid.y)
            tr_scores[i] = score_fn(probability_table(train, fit.params).pi, train.y)
        return val_scores, tr_scores

    results = parallel_map(one_fold, range(k))
    fold_scores = np.vstack([r[0] for r in results])
    train_scores = np.vstack([r[1] for r in results])
    mean_scores = np.where(
        np.any(np.isnan(fold_scores), axis=0), np.nan, fold_scores.mean(axis=0)
    )
    mean_train = np.where(
        np.any(np.isnan(train_scores), axis=0), np.nan, train_scores.mean(axis=0)
    )
    if np.all(np.isnan(mean_scores)):
        raise DataError("cross-validation failed at every lambda")
    # grid is decreasing, so among ties argmin keeps the largest lambda
    best = int(np.nanargmin(mean_scores))
    return CvResult(
        lambda_grid=grid,
        fold_scores=fold_scores,
        mean_scores=mean_scores,
        train_scores=train_scores,
        mean_train_scores=mean_train,
        optimal_lambda=float(grid[best]),
        fold_assignments=folds,
        metric=metric,
    )


@dataclass
class StabilityResult:
    """Selection frequencies per (variable, lambda) over B subsamples."""

    lambda_grid: np.ndarray
    pi_hat: np.ndarray          # p x L selection frequencies
    b: int
    subsample_size: int
    pi_thr: float
    failures: list = field(default_factory=list)

    def stable_set(self, lam_index: int, pi_thr: float = None) -> list:
        """Variables whose frequency at the given grid index reaches the cutoff."""
        thr = self.pi_thr if pi_thr is None else pi_thr
        return [int(j) for j in np.flatnonzero(self.pi_hat[:, lam_index] >= thr)]


def stability_selection(
    data: OrdinalDataset,
    spec: PenaltySpec,
    b: int = 100,
    subsample_fraction: float = 0.5,
    config: SolverConfig = None,
    seed=0,
    pi_thr: float = 0.6,
) -> StabilityResult:
    """Selection frequencies over B seeded subsamples without replacement.

    Each subsample gets an independent random stream derived from
    ``(seed, index)``, so results are identical regardless of execution
    order.  A variable counts as selected at a lambda when any of its
    adjacent differences is nonzero there; subsamples whose path fails at a
    lambda count as "not selected" and are reported in ``failures``.
    """
    if b < 1:
        raise ConfigError("subsample count B must be >= 1")
    if not 0.0 < subsample_fraction < 1.0:
        raise ConfigError("subsample fraction must be in (0, 1)")
    config = config or SolverConfig()
    m = int(np.floor(subsample_fraction * data.n))
    if m < 1:
        raise ConfigError("subsample size is zero; increase the fraction")
    grid = np.asarray(spec.lambda_grid, dtype=float)

    def one_subsample(idx_b):
        rng = np.random.default_rng((seed, idx_b))
        rows = rng.choice(data.n, size=m, replace=False)
        sub = data.subset(np.sort(rows))
        selected = np.zeros((data.p, grid.size), dtype=bool)
        fail = []
        path = fit_path(sub, spec, config)
        for i, fit in enumerate(path.fits):
            if fit is None:
                fail.append((idx_b, i, path.failures.get(i, "fit failed")))
                continue
            for j in fit.active_groups:
                selected[j, i] = True
        return selected, fail

    results = parallel_map(one_subsample, range(b))
    counts = np.zeros((data.p, grid.size))
    failures = []
    for selected, fail in results:
        counts += selected
        failures.extend(fail)
    return StabilityResult(
        lambda_grid=grid,
        pi_hat=counts / b,
        b=b,
        subsample_size=m,
        pi_thr=pi_thr,
        failures=failures,
    )
