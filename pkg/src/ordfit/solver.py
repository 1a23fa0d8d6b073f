"""Penalized and unpenalized fitting of the cumulative logit model.

Three fitting routes share one internal parameterization: thresholds plus
split-coded coefficients (adjacent-level differences), in which the
smoothing penalty is a plain group-lasso norm and the fusion penalty a
plain L1 norm.

* ``fit_smooth_group``: cyclic block coordinate descent with a per-block
  closed-form group-soft-threshold direction and Armijo backtracking.
* ``fit_fused`` / ``fit_numeric_lasso``: proximal gradient with
  backtracking on the smooth part; soft-thresholding yields exact zeros.
* ``fit_mle_newton``: Fisher scoring with step halving, the unpenalized
  oracle; raises :class:`SeparationError` when the MLE does not exist.

The smooth objective everywhere is the negative log-likelihood scaled by
1/n, so user-facing lambda values follow the "lambda times n" reporting
convention used in the docs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit, logit

from ordfit.data import OrdinalDataset, DesignMatrices, build_design
from ordfit.errors import ConfigError, SeparationError
from ordfit.model import (
    CURV_MAX,
    CURV_MIN,
    PROB_FLOOR,
    ModelParams,
    _threshold_terms,
    pointwise_terms,
)
from ordfit.penalty import PenaltySpec, from_split_params, to_split_params


@dataclass(frozen=True)
class SolverConfig:
    """Line-search and stopping controls shared by all solvers.

    ``alpha0``, ``delta`` and ``sigma`` are the Armijo constants (initial
    step, backtracking factor, sufficient-decrease constant).  Convergence
    is declared when the objective changes by less than ``tol`` over a full
    pass; if ``kkt_tol`` is set, the optimality residual must additionally
    drop below it.
    """

    alpha0: float = 1.0
    delta: float = 0.5
    sigma: float = 0.1
    max_outer_iters: int = 1000
    tol: float = 1e-8
    max_armijo_steps: int = 50
    kkt_tol: float = None
    newton_grad_tol: float = 1e-6
    divergence_bound: float = 1e3
    saturation_bound: float = 30.0

    def __post_init__(self):
        if not (0.0 < self.sigma < 1.0):
            raise ConfigError("sigma must be in (0, 1)")
        if not (0.0 < self.delta < 1.0):
            raise ConfigError("delta must be in (0, 1)")
        if self.alpha0 <= 0:
            raise ConfigError("alpha0 must be positive")
        if self.tol <= 0:
            raise ConfigError("tol must be positive")


@dataclass
class FitResult:
    """One fitted model: effect-coded parameters plus diagnostics.

    ``split_params`` holds the per-group difference vectors exactly as the
    solver left them; zeros there are exact zeros, so selection decisions
    need no epsilon.  ``active_groups`` is the set of predictors with any
    nonzero difference.
    """

    params: ModelParams
    objective: float
    iterations: int
    converged: bool
    active_groups: set
    per_iter_objective: np.ndarray
    lam: float
    kind: str
    split_params: list
    numeric_slopes: np.ndarray = None
    theta_internal: np.ndarray = None
    coef_internal: np.ndarray = None
    message: str = ""

    @property
    def nonzero_differences(self) -> dict:
        """Per group, the 0-based indices of nonzero adjacent differences."""
        return {
            j: np.flatnonzero(d != 0.0)
            for j, d in enumerate(self.split_params)
            if np.any(d != 0.0)
        }


@dataclass
class PathResult:
    """Warm-started fits along a decreasing lambda grid."""

    lambda_grid: np.ndarray
    fits: list
    entry_order: dict
    failures: dict = field(default_factory=dict)

    @property
    def total_iterations(self) -> int:
        return int(sum(f.iterations for f in self.fits if f is not None))


# ---------------------------------------------------------------------------
# internal objective pieces (split or numeric design; thresholds unpenalized)
# ---------------------------------------------------------------------------


def _theta_valid(theta: np.ndarray) -> bool:
    return bool(np.all(np.isfinite(theta)) and np.all(np.diff(theta) > 0.0))


def _nll(theta, w, y, c, n):
    """Scaled negative log-likelihood; +inf for invalid thresholds."""
    if not _theta_valid(theta):
        return np.inf
    upper = np.concatenate([theta, [np.inf]])
    lower = np.concatenate([[-np.inf], theta])
    pi = expit(upper[y - 1] - w) - expit(lower[y - 1] - w)
    return -float(np.sum(np.log(np.maximum(pi, PROB_FLOOR)))) / n


def _pointwise_uc(theta, w, y, c):
    """(u, curv): first/second derivatives of -log pi_i w.r.t. w_i, unscaled sign.

    u is d log pi / d w (as in model.pointwise_terms); curv is the second
    derivative of -log pi.
    """
    upper = np.concatenate([theta, [np.inf]])
    lower = np.concatenate([[-np.inf], theta])
    fa_cdf = expit(upper[y - 1] - w)
    fb_cdf = expit(lower[y - 1] - w)
    pi = np.maximum(fa_cdf - fb_cdf, PROB_FLOOR)
    fa = fa_cdf * (1.0 - fa_cdf)
    fb = fb_cdf * (1.0 - fb_cdf)
    u = (fb - fa) / pi
    curv = u * u - (fa * (1.0 - 2.0 * fa_cdf) - fb * (1.0 - 2.0 * fb_cdf)) / pi
    return u, curv


def intercept_only_thresholds(y: np.ndarray, c: int) -> np.ndarray:
    """Closed-form MLE thresholds of the intercept-only model.

    theta_r is the empirical logit of P(y <= r).  Cumulative counts are
    clipped away from 0 and n (and ties are spread by a tiny increment) so
    degenerate subsamples still yield valid strictly increasing thresholds.
    """
    y = np.asarray(y)
    n = y.size
    counts = np.bincount(y, minlength=c + 1)[1:c + 1]
    cum = np.cumsum(counts)[: c - 1].astype(float)
    cum = np.clip(cum, 0.5, n - 0.5)
    theta = logit(cum / n)
    for r in range(1, theta.size):
        if theta[r] <= theta[r - 1]:
            theta[r] = theta[r - 1] + 1e-6
    return theta


def _numeric_design(data: OrdinalDataset):
    """Column-centered numeric design (levels as numbers) and its means."""
    x = data.x.astype(float)
    means = x.mean(axis=0)
    return x - means[None, :], means


def _effect_params_from_split(theta, coef, offsets) -> ModelParams:
    groups = []
    shift = 0.0
    for j in range(len(offsets) - 1):
        g = from_split_params(coef[offsets[j]:offsets[j + 1]])
        groups.append(g)
        shift += g[0]
    return ModelParams(thresholds=theta + shift, groups=groups)


def _split_from_effect(params: ModelParams):
    coef = np.concatenate([to_split_params(g) for g in params.groups])
    shift = sum(float(g[0]) for g in params.groups)
    return params.thresholds - shift, coef


def _effect_params_from_numeric(theta, slopes, levels, means) -> ModelParams:
    groups = []
    shift = 0.0
    for j, k in enumerate(levels):
        lv = np.arange(1, k + 1, dtype=float)
        groups.append(slopes[j] * (lv - lv.mean()))
        shift += slopes[j] * (means[j] - lv.mean())
    return ModelParams(thresholds=theta + shift, groups=groups)


# ---------------------------------------------------------------------------
# KKT residuals
# ---------------------------------------------------------------------------


def _grad_blocks(theta, w, y, c, n, P):
    """Gradient of the scaled negative log-likelihood: (thresholds, coefficients)."""
    u, _ = _pointwise_uc(theta, w, y, c)
    g_theta, _ = _threshold_terms(theta, w, y, c)
    return -g_theta / n, -(P.T @ u) / n


def _kkt_smooth(g_coef, coef, offsets, lam, sqrt_df):
    res = 0.0
    for j in range(len(offsets) - 1):
        sl = slice(offsets[j], offsets[j + 1])
        gj, bj = g_coef[sl], coef[sl]
        if np.any(bj != 0.0):
            r = np.linalg.norm(gj + lam * sqrt_df[j] * bj / np.linalg.norm(bj))
        else:
            r = max(0.0, np.linalg.norm(gj) - lam * sqrt_df[j])
        res = max(res, r)
    return res


def _kkt_l1(g_coef, coef, lam):
    active = coef != 0.0
    res = 0.0
    if np.any(active):
        res = np.max(np.abs(g_coef[active] + lam * np.sign(coef[active])))
    if np.any(~active):
        res = max(res, max(0.0, np.max(np.abs(g_coef[~active])) - lam))
    return res


def kkt_residual(data: OrdinalDataset, fit: FitResult, design: DesignMatrices = None) -> float:
    """Max-norm optimality residual of a fit under its own penalty.

    Zero groups must satisfy the dual-norm bound, active groups the
    stationarity equation; the threshold gradient must vanish.  The value
    is directly comparable to the solver's ``kkt_tol``.
    """
    y, c, n = data.y, data.c, data.n
    if fit.kind == "numeric-lasso":
        P, _ = _numeric_design(data)
        coef = fit.numeric_slopes
    else:
        if design is None:
            design = build_design(data)
        P = design.split
        coef = fit.coef_internal
    theta = fit.theta_internal
    w = P @ coef
    g_theta, g_coef = _grad_blocks(theta, w, y, c, n, P)
    res = float(np.max(np.abs(g_theta)))
    if fit.kind == "smooth-group":
        offsets = design.split_offsets
        sqrt_df = np.sqrt(np.asarray(data.levels, dtype=float) - 1.0)
        res = max(res, _kkt_smooth(g_coef, coef, offsets, fit.lam, sqrt_df))
    else:
        res = max(res, _kkt_l1(g_coef, coef, fit.lam))
    return res


# ---------------------------------------------------------------------------
# lambda grids
# ---------------------------------------------------------------------------


def lambda_max(data: OrdinalDataset, kind: str, design: DesignMatrices = None) -> float:
    """Smallest penalty level at which every coefficient group is zero.

    Evaluated at zero coefficients with intercept-only MLE thresholds: the
    group-norm (smooth), max-abs (fused) or per-column-abs (numeric) dual
    norm of the scaled negative log-likelihood gradient.
    """
    theta0 = intercept_only_thresholds(data.y, data.c)
    n = data.n
    u, _ = _pointwise_uc(theta0, np.zeros(n), data.y, data.c)
    if kind == "numeric-lasso":
        P, _ = _numeric_design(data)
        return float(np.max(np.abs(P.T @ u) / n))
    if design is None:
        design = build_design(data)
    g = -(design.split.T @ u) / n
    if kind == "fused":
        return float(np.max(np.abs(g)))
    if kind == "smooth-group":
        offsets = design.split_offsets
        sqrt_df = np.sqrt(np.asarray(data.levels, dtype=float) - 1.0)
        return float(
            max(
                np.linalg.norm(g[offsets[j]:offsets[j + 1]]) / sqrt_df[j]
                for j in range(data.p)
            )
        )
    raise ConfigError(f"unknown penalty kind {kind!r}")


def auto_lambda_grid(
    data: OrdinalDataset,
    kind: str,
    n_points: int = 30,
    floor_ratio: float = 1e-3,
    design: DesignMatrices = None,
) -> np.ndarray:
    """Log-spaced decreasing grid from lambda_max down to floor_ratio of it."""
    lmax = lambda_max(data, kind, design=design)
    return np.geomspace(lmax, lmax * floor_ratio, n_points)


# ---------------------------------------------------------------------------
# block coordinate descent (smoothing group lasso)
# ---------------------------------------------------------------------------


def _bcd_group_solve(theta, coef, P, offsets, y, c, lam, sqrt_df, config):
    """Cyclic block descent over thresholds and split-coded groups.

    Per sweep: the threshold block takes a scaled gradient step; each
    coefficient group either jumps exactly to zero (when the gradient at
    the tentative zero lies inside the dual-norm ball) or moves along the
    group-soft-threshold direction.  Every step is Armijo backtracked, so
    the tracked objective never increases.
    """
    n = y.size
    n_groups = len(offsets) - 1
    w = P @ coef
    pen = np.array(
        [
            sqrt_df[j] * np.linalg.norm(coef[offsets[j]:offsets[j + 1]])
            for j in range(n_groups)
        ]
    )
    obj = _nll(theta, w, y, c, n) + lam * pen.sum()
    trace = [obj]
    converged = False
    it = 0
    for it in range(1, config.max_outer_iters + 1):
        # threshold block: plain quasi-Newton step with backtracking
        g_theta, theta_diag = _threshold_terms(theta, w, y, c)
        g0 = -g_theta / n
        h0 = np.clip(np.max(np.abs(theta_diag)) / n, CURV_MIN, CURV_MAX)
        d0 = -g0 / h0
        delta_model = float(d0 @ g0)
        if delta_model < -1e-16:
            nll_base = obj - lam * pen.sum()
            alpha = config.alpha0
            for _ in range(config.max_armijo_steps):
                trial = _nll(theta + alpha * d0, w, y, c, n)
                if trial - nll_base <= alpha * config.sigma * delta_model:
                    theta = theta + alpha * d0
                    obj = trial + lam * pen.sum()
                    break
                alpha *= config.delta

        u, curv = _pointwise_uc(theta, w, y, c)
        for j in range(n_groups):
            sl = slice(offsets[j], offsets[j + 1])
            Pj = P[:, sl]
            bj = coef[sl]
            gj = -(Pj.T @ u) / n
            hj = np.clip(np.max(np.abs(Pj.T @ curv)) / n, CURV_MIN, CURV_MAX)
            wj = lam * sqrt_df[j]
            v = gj - hj * bj
            vnorm = np.linalg.norm(v)
            if vnorm <= wj:
                if not np.any(bj != 0.0):
                    continue
                dj = -bj
            else:
                dj = -(gj - wj * v / vnorm) / hj
            pen_new_full = wj * np.linalg.norm(bj + dj)
            delta_model = float(dj @ gj) + pen_new_full - wj * np.linalg.norm(bj)
            if delta_model > -1e-16:
                continue
            step_w = Pj @ dj
            step_pen = lam * (pen.sum() - pen[j])
            alpha = config.alpha0
            for _ in range(config.max_armijo_steps):
                b_trial = bj + alpha * dj
                pen_trial = sqrt_df[j] * np.linalg.norm(b_trial)
                nll_trial = _nll(theta, w + alpha * step_w, y, c, n)
                obj_trial = nll_trial + step_pen + lam * pen_trial
                if obj_trial - obj <= alpha * config.sigma * delta_model:
                    coef[sl] = b_trial
                    w = w + alpha * step_w
                    pen[j] = pen_trial
                    obj = obj_trial
                    u, curv = _pointwise_uc(theta, w, y, c)
                    break
                alpha *= config.delta
        trace.append(obj)
        if abs(trace[-2] - trace[-1]) < config.tol:
            if config.kkt_tol is not None:
                g0_now, g_coef = _grad_blocks(theta, w, y, c, n, P)
                res = max(
                    float(np.max(np.abs(g0_now))),
                    _kkt_smooth(g_coef, coef, offsets, lam, sqrt_df),
                )
                if res > config.kkt_tol:
                    continue
            converged = True
            break
    return theta, coef, it, converged, np.asarray(trace)


# ---------------------------------------------------------------------------
# proximal gradient (fused lasso on split design; numeric lasso)
# ---------------------------------------------------------------------------


def _soft(x, t):
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def _prox_l1_solve(theta, coef, P, y, c, lam, config):
    """Monotone accelerated proximal gradient on the L1-penalized objective.

    Each iteration takes a gradient step at the extrapolated point, then
    soft-thresholds the coefficients by step*lambda (thresholds stay
    unpenalized).  The step is backtracked against the quadratic upper
    bound, with invalid trial thresholds counting as +inf; the accelerated
    candidate is kept only when it does not increase the objective, and
    momentum restarts otherwise, so the recorded objective never increases.
    Soft-thresholding makes zeros exact.
    """
    n = y.size
    w = P @ coef
    obj = _nll(theta, w, y, c, n) + lam * float(np.sum(np.abs(coef)))
    trace = [obj]
    t = 1.0
    momentum = 1.0
    y_theta, y_coef, y_w = theta, coef, w
    converged = False
    just_restarted = False
    it = 0
    for it in range(1, config.max_outer_iters + 1):
        if not _theta_valid(y_theta):
            momentum = 1.0
            y_theta, y_coef, y_w = theta, coef, w
        smooth_y = _nll(y_theta, y_w, y, c, n)
        g_theta, g_coef = _grad_blocks(y_theta, y_w, y, c, n, P)
        z_theta = z_coef = z_w = None
        for _ in range(200):
            z_theta = y_theta - t * g_theta
            z_coef = _soft(y_coef - t * g_coef, t * lam)
            d_theta = z_theta - y_theta
            d_coef = z_coef - y_coef
            z_w = P @ z_coef
            smooth_z = _nll(z_theta, z_w, y, c, n)
            bound = (
                smooth_y
                + float(g_theta @ d_theta)
                + float(g_coef @ d_coef)
                + (float(d_theta @ d_theta) + float(d_coef @ d_coef)) / (2.0 * t)
            )
            if smooth_z <= bound + 1e-15 * max(1.0, abs(bound)):
                break
            t *= config.delta
        obj_z = smooth_z + lam * float(np.sum(np.abs(z_coef)))
        momentum_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * momentum * momentum))
        if obj_z <= obj:
            # accelerated extrapolation around the accepted candidate
            y_theta = z_theta + (momentum - 1.0) / momentum_next * (z_theta - theta)
            y_coef = z_coef + (momentum - 1.0) / momentum_next * (z_coef - coef)
            y_w = P @ y_coef
            delta_obj = obj - obj_z
            theta, coef, w, obj = z_theta, z_coef, z_w, obj_z
            momentum = momentum_next
            just_restarted = False
        elif just_restarted:
            # even the plain prox step from x cannot decrease the objective:
            # x is stationary to machine precision
            trace.append(obj)
            delta_obj = 0.0
            if config.kkt_tol is not None:
                g_theta_n, g_coef_n = _grad_blocks(theta, w, y, c, n, P)
                res = max(float(np.max(np.abs(g_theta_n))), _kkt_l1(g_coef_n, coef, lam))
                converged = res <= config.kkt_tol
            else:
                converged = True
            break
        else:
            # candidate increased the objective: restart momentum at x; the
            # next iteration is a plain prox step from x
            y_theta, y_coef, y_w = theta, coef, w
            momentum = 1.0
            delta_obj = None
            just_restarted = True
        trace.append(obj)
        if delta_obj is not None and delta_obj < config.tol:
            if config.kkt_tol is not None:
                g_theta_n, g_coef_n = _grad_blocks(theta, w, y, c, n, P)
                res = max(float(np.max(np.abs(g_theta_n))), _kkt_l1(g_coef_n, coef, lam))
                if res > config.kkt_tol:
                    t /= config.delta
                    continue
            converged = True
            break
        t /= config.delta
    return theta, coef, it, converged, np.asarray(trace)


# ---------------------------------------------------------------------------
# public fitters
# ---------------------------------------------------------------------------


def _prepare_init(data, design, init):
    if init is None:
        theta0 = intercept_only_thresholds(data.y, data.c)
        coef0 = np.zeros(design.split.shape[1])
    elif isinstance(init, tuple):
        theta0, coef0 = np.asarray(init[0], float).copy(), np.asarray(init[1], float).copy()
    else:
        theta0, coef0 = _split_from_effect(init)
    return theta0, coef0


def _check_fit_inputs(data, spec, kind, lam):
    if spec.kind != kind:
        raise ConfigError(f"penalty spec kind {spec.kind!r} does not match {kind!r}")
    if lam < 0:
        raise ConfigError("lambda must be nonnegative")
    if spec.df.size != data.p:
        raise ConfigError("penalty spec df length does not match predictor count")


def fit_smooth_group(
    data: OrdinalDataset,
    spec: PenaltySpec,
    lam: float,
    config: SolverConfig = None,
    init=None,
    design: DesignMatrices = None,
) -> FitResult:
    """Smoothing group-lasso fit at a single penalty level.

    Whole predictors are selected or dropped; within a selected predictor,
    level effects are shrunk toward each other via the difference norm.
    Returns effect-coded parameters; non-convergence is reported through
    ``converged=False`` rather than an exception.
    """
    config = config or SolverConfig()
    _check_fit_inputs(data, spec, "smooth-group", lam)
    if design is None:
        design = build_design(data)
    theta0, coef0 = _prepare_init(data, design, init)
    sqrt_df = np.sqrt(spec.df)
    theta, coef, iters, conv, trace = _bcd_group_solve(
        theta0, coef0, design.split, design.split_offsets, data.y, data.c,
        lam, sqrt_df, config,
    )
    return _assemble_split_result(
        data, design, theta, coef, iters, conv, trace, lam, "smooth-group"
    )


def fit_fused(
    data: OrdinalDataset,
    spec: PenaltySpec,
    lam: float,
    config: SolverConfig = None,
    init=None,
    design: DesignMatrices = None,
) -> FitResult:
    """Fused-lasso fit: exact fusion of adjacent levels at a single lambda.

    Zeros in the returned ``split_params`` are exact and encode fused
    adjacent categories; a predictor whose differences are all zero is
    excluded.
    """
    config = config or SolverConfig()
    _check_fit_inputs(data, spec, "fused", lam)
    if design is None:
        design = build_design(data)
    theta0, coef0 = _prepare_init(data, design, init)
    theta, coef, iters, conv, trace = _prox_l1_solve(
        theta0, coef0, design.split, data.y, data.c, lam, config
    )
    return _assemble_split_result(
        data, design, theta, coef, iters, conv, trace, lam, "fused"
    )


def fit_numeric_lasso(
    data: OrdinalDataset,
    spec: PenaltySpec,
    lam: float,
    config: SolverConfig = None,
    init=None,
) -> FitResult:
    """Plain lasso treating each predictor's level as one numeric column.

    The baseline that ignores the categorical structure; included so the
    simulation comparisons are self-contained.  ``init`` may be a
    (thresholds, slopes) tuple.
    """
    config = config or SolverConfig()
    _check_fit_inputs(data, spec, "numeric-lasso", lam)
    P, means = _numeric_design(data)
    if init is None:
        theta0 = intercept_only_thresholds(data.y, data.c)
        coef0 = np.zeros(data.p)
    elif isinstance(init, tuple):
        theta0, coef0 = np.asarray(init[0], float).copy(), np.asarray(init[1], float).copy()
    else:
        raise ConfigError("numeric-lasso warm starts take a (thresholds, slopes) tuple")
    theta, coef, iters, conv, trace = _prox_l1_solve(
        theta0, coef0, P, data.y, data.c, lam, config
    )
    params = _effect_params_from_numeric(theta, coef, data.levels, means)
    split = [np.full(int(k) - 1, coef[j]) for j, k in enumerate(data.levels)]
    return FitResult(
        params=params,
        objective=float(trace[-1]),
        iterations=iters,
        converged=conv,
        active_groups={j for j in range(data.p) if coef[j] != 0.0},
        per_iter_objective=trace,
        lam=lam,
        kind="numeric-lasso",
        split_params=split,
        numeric_slopes=coef,
        theta_internal=theta,
        coef_internal=coef,
    )


def _assemble_split_result(data, design, theta, coef, iters, conv, trace, lam, kind):
    offsets = design.split_offsets
    params = _effect_params_from_split(theta, coef, offsets)
    split = [coef[offsets[j]:offsets[j + 1]].copy() for j in range(data.p)]
    active = {j for j in range(data.p) if np.any(split[j] != 0.0)}
    return FitResult(
        params=params,
        objective=float(trace[-1]),
        iterations=iters,
        converged=conv,
        active_groups=active,
        per_iter_objective=trace,
        lam=lam,
        kind=kind,
        split_params=split,
        theta_internal=theta,
        coef_internal=coef,
    )


_FITTERS = {
    "smooth-group": fit_smooth_group,
    "fused": fit_fused,
    "numeric-lasso": fit_numeric_lasso,
}


def fit_path(
    data: OrdinalDataset,
    spec: PenaltySpec,
    config: SolverConfig = None,
) -> PathResult:
    """Sequential fits along ``spec.lambda_grid`` with warm starts.

    The grid is traversed in its (decreasing) order; each fit starts from
    the previous solution.  ``entry_order`` records, per predictor, the
    largest lambda at which it first becomes active, which is the ranking
    used for selection ROC curves.  Per-lambda failures are recorded and
    the path continues from the last good solution.
    """
    config = config or SolverConfig()
    design = None if spec.kind == "numeric-lasso" else build_design(data)
    fits = []
    failures = {}
    entry = {}
    warm = None
    for idx, lam in enumerate(spec.lambda_grid):
        try:
            if spec.kind == "numeric-lasso":
                fit = fit_numeric_lasso(data, spec, float(lam), config, init=warm)
            else:
                fit = _FITTERS[spec.kind](
                    data, spec, float(lam), config, init=warm, design=design
                )
        except Exception as exc:  # noqa: BLE001 - recorded, path continues
            fits.append(None)
            failures[idx] = f"{type(exc).__name__}: {exc}"
            continue
        fits.append(fit)
        warm = (fit.theta_internal, fit.coef_internal)
        for j in sorted(fit.active_groups):
            entry.setdefault(j, float(lam))
    return PathResult(
        lambda_grid=np.asarray(spec.lambda_grid, dtype=float),
        fits=fits,
        entry_order=entry,
        failures=failures,
    )


# ---------------------------------------------------------------------------
# Fisher scoring (unpenalized oracle)
# ---------------------------------------------------------------------------


def _fisher_blocks(theta, w, y, c, P):
    """Expected information of (thresholds, coefficients) at the current fit.

    Built from the multinomial covariance of the first c-1 category
    indicators and the bidiagonal derivative of the category probabilities
    with respect to the cumulative logits.
    """
    n = w.size
    q = c - 1
    eta = theta[None, :] - w[:, None]
    cum = expit(eta)
    f = cum * (1.0 - cum)
    pi = np.empty((n, c))
    pi[:, 0] = cum[:, 0]
    pi[:, 1:q] = cum[:, 1:] - cum[:, :-1]
    pi[:, q] = 1.0 - cum[:, -1]
    pi = np.maximum(pi, PROB_FLOOR)
    idx = np.arange(q)
    sig = -pi[:, :q, None] * pi[:, None, :q]
    sig[:, idx, idx] += pi[:, :q]
    sig[:, idx, idx] += 1e-12
    d = np.zeros((n, q, q))
    d[:, idx, idx] = f
    if q > 1:
        idx2 = np.arange(q - 1)
        d[:, idx2 + 1, idx2] = -f[:, :-1]
    # weight = J^T Sigma^{-1} J with J[r, s] = d pi_r / d eta_s
    m = np.linalg.solve(sig, d)
    wmat = np.transpose(d, (0, 2, 1)) @ m
    f_tt = wmat.sum(axis=0)
    rows = wmat.sum(axis=2)
    f_tb = -(rows.T @ P)
    total = rows.sum(axis=1)
    f_bb = P.T @ (P * total[:, None])
    top = np.concatenate([f_tt, f_tb], axis=1)
    bottom = np.concatenate([f_tb.T, f_bb], axis=1)
    return np.concatenate([top, bottom], axis=0)


def _unscaled_score(theta, w, y, c, P):
    u, _ = _pointwise_uc(theta, w, y, c)
    g_theta, _ = _threshold_terms(theta, w, y, c)
    return np.concatenate([g_theta, P.T @ u])


def fit_mle_newton(
    data: OrdinalDataset,
    config: SolverConfig = None,
    design: DesignMatrices = None,
) -> FitResult:
    """Unpenalized MLE via Fisher scoring with step halving.

    Serves as the lambda -> 0 oracle and as the unpenalized baseline.
    Divergence (any parameter beyond the divergence bound, or a singular
    information matrix) raises :class:`SeparationError`; plain
    non-convergence within the iteration budget returns ``converged=False``.
    """
    config = config or SolverConfig()
    if design is None:
        design = build_design(data)
    P = design.split
    y, c, n = data.y, data.c, data.n
    theta = intercept_only_thresholds(y, c)
    coef = np.zeros(P.shape[1])
    w = P @ coef
    ll = -n * _nll(theta, w, y, c, n)
    trace = [-ll / n]
    converged = False
    it = 0
    for it in range(1, config.max_outer_iters + 1):
        s = _unscaled_score(theta, w, y, c, P)
        if not np.all(np.isfinite(s)):
            raise SeparationError(
                "MLE does not exist / separation: non-finite score"
            )
        if np.max(np.abs(s)) < config.newton_grad_tol:
            # a vanished score with saturated logits is a divergent ray, not
            # an interior optimum: the gradient underflows once |eta| ~ 36
            scale = max(
                np.max(np.abs(theta)), np.max(np.abs(coef), initial=0.0)
            )
            if scale > config.saturation_bound:
                raise SeparationError(
                    "MLE does not exist / separation: score vanished with "
                    f"saturated probabilities (parameter scale {scale:.1f})"
                )
            converged = True
            break
        fisher = _fisher_blocks(theta, w, y, c, P)
        try:
            direction = np.linalg.solve(fisher, s)
        except np.linalg.LinAlgError as exc:
            raise SeparationError(
                f"MLE does not exist / separation: singular information ({exc})"
            ) from exc
        q = c - 1
        alpha = 1.0
        improved = False
        while alpha > 1e-12:
            theta_t = theta + alpha * direction[:q]
            coef_t = coef + alpha * direction[q:]
            if _theta_valid(theta_t):
                w_t = P @ coef_t
                ll_t = -n * _nll(theta_t, w_t, y, c, n)
                if ll_t >= ll:
                    theta, coef, w, ll = theta_t, coef_t, w_t, ll_t
                    improved = True
                    break
            alpha *= 0.5
        trace.append(-ll / n)
        bound = config.divergence_bound
        if (
            not np.all(np.isfinite(coef))
            or not np.all(np.isfinite(theta))
            or np.max(np.abs(coef), initial=0.0) > bound
            or np.max(np.abs(theta)) > bound
        ):
            raise SeparationError(
                "MLE does not exist / separation: parameters diverged beyond "
                f"{bound:g}"
            )
        if not improved:
            converged = bool(np.max(np.abs(s)) < 1e-6)
            break
    return _assemble_split_result(
        data, design, theta, coef, it, converged, np.asarray(trace), 0.0, "mle"
    )
