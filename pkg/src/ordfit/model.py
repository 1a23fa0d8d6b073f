"""Cumulative logit model: probabilities, log-likelihood, gradient, curvature.

The linear predictor follows the minus convention eta_ir = theta_r - sum_j
beta_{j, x_ij}: larger coefficients push probability mass toward higher
response categories.  Probabilities are floor-clamped at ``PROB_FLOOR``
before logs so near-degenerate fits keep a finite objective.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from ordfit.data import OrdinalDataset
from ordfit.errors import DataError, DimensionError

PROB_FLOOR = 1e-12

# clamp window for the per-block curvature scalars
CURV_MIN = 1e-6
CURV_MAX = 1e8


@dataclass
class ModelParams:
    """Thresholds plus one coefficient vector per predictor.

    ``thresholds`` must be strictly increasing (the two outer thresholds at
    -inf/+inf are implicit).  Fitted parameters returned by the solvers are
    effect-coded (each group sums to zero); arbitrary groups are accepted
    here because the likelihood is invariant under per-group shifts.
    """

    thresholds: np.ndarray
    groups: list

    def __post_init__(self):
        self.thresholds = np.asarray(self.thresholds, dtype=float)
        if self.thresholds.ndim != 1 or self.thresholds.size < 1:
            raise DimensionError("thresholds must be a 1-d vector of length c-1")
        if not np.all(np.isfinite(self.thresholds)):
            raise DimensionError("thresholds must be finite")
        if np.any(np.diff(self.thresholds) <= 0):
            raise DimensionError("thresholds must be strictly increasing")
        self.groups = [np.asarray(g, dtype=float) for g in self.groups]
        for j, g in enumerate(self.groups):
            if g.ndim != 1 or g.size < 2:
                raise DimensionError(
                    "coefficient group must be a vector with >= 2 levels", group=j
                )

    @property
    def c(self) -> int:
        return self.thresholds.size + 1

    def copy(self) -> "ModelParams":
        return ModelParams(self.thresholds.copy(), [g.copy() for g in self.groups])


@dataclass
class ProbabilityTable:
    """Per-observation category probabilities and cumulative probabilities.

    ``pi`` is n x c with rows summing to one (up to the floor clamp applied
    after validation); ``cumulative`` is n x (c-1) with F(eta_ir).
    """

    pi: np.ndarray
    cumulative: np.ndarray


def _check_dims(data: OrdinalDataset, params: ModelParams) -> None:
    if len(params.groups) != data.p:
        raise DimensionError(
            f"expected {data.p} coefficient groups, got {len(params.groups)}"
        )
    if params.thresholds.size != data.c - 1:
        raise DimensionError(
            f"expected {data.c - 1} thresholds, got {params.thresholds.size}"
        )
    for j, g in enumerate(params.groups):
        if g.size != data.levels[j]:
            raise DimensionError(
                f"coefficient group has {g.size} entries but predictor "
                f"declares {data.levels[j]} levels",
                group=j,
            )


def predictor_sums(data: OrdinalDataset, groups) -> np.ndarray:
    """w_i = sum_j beta_{j, x_ij}, the predictor part of the linear predictor."""
    w = np.zeros(data.n)
    for j, g in enumerate(groups):
        w += np.asarray(g, dtype=float)[data.x[:, j] - 1]
    return w


def linear_predictor(data: OrdinalDataset, params: ModelParams) -> np.ndarray:
    """eta_ir = theta_r - sum_j beta_{j, x_ij}, returned as an n x (c-1) matrix."""
    _check_dims(data, params)
    w = predictor_sums(data, params.groups)
    return params.thresholds[None, :] - w[:, None]


def category_probs(eta: np.ndarray) -> ProbabilityTable:
    """Category probabilities from the cumulative logits.

    pi_1 = F(eta_1), pi_r = F(eta_r) - F(eta_{r-1}) for interior r, and
    pi_c = 1 - F(eta_{c-1}) with logistic F.  A negative raw probability
    means the cumulative logits are not monotone (invalid thresholds) and
    raises a DataError naming the first offending row and category.
    """
    eta = np.atleast_2d(np.asarray(eta, dtype=float))
    if not np.all(np.isfinite(eta)):
        raise DataError("linear predictor contains non-finite values")
    cum = expit(eta)
    n, cm1 = cum.shape
    pi = np.empty((n, cm1 + 1))
    pi[:, 0] = cum[:, 0]
    pi[:, 1:cm1] = cum[:, 1:] - cum[:, :-1]
    pi[:, cm1] = 1.0 - cum[:, -1]
    if np.any(pi < 0.0):
        i, r = np.argwhere(pi < 0.0)[0]
        raise DataError(
            f"negative category probability at observation {int(i) + 1}, "
            f"category {int(r) + 1}: cumulative probabilities are not monotone"
        )
    return ProbabilityTable(pi=np.maximum(pi, PROB_FLOOR), cumulative=cum)


def _bounds(theta: np.ndarray, w: np.ndarray, y: np.ndarray, c: int):
    """Upper/lower cumulative logits (A, B) of each observation's own category."""
    upper = np.concatenate([theta, [np.inf]])
    lower = np.concatenate([[-np.inf], theta])
    return upper[y - 1] - w, lower[y - 1] - w


def pointwise_terms(theta: np.ndarray, w: np.ndarray, y: np.ndarray, c: int):
    """Per-observation log-likelihood terms and their w-derivatives.

    Returns (loglik_i, u_i, curv_i) where u_i is the derivative of
    log pi_{i,y_i} with respect to w_i and curv_i the second derivative of
    -log pi_{i,y_i}; probabilities are floor-clamped first.  These three
    vectors drive every solver in the package.
    """
    a, b = _bounds(theta, w, y, c)
    fa_cdf = expit(a)
    fb_cdf = expit(b)
    pi = np.maximum(fa_cdf - fb_cdf, PROB_FLOOR)
    fa = fa_cdf * (1.0 - fa_cdf)
    fb = fb_cdf * (1.0 - fb_cdf)
    fpa = fa * (1.0 - 2.0 * fa_cdf)
    fpb = fb * (1.0 - 2.0 * fb_cdf)
    u = (fb - fa) / pi
    curv = u * u - (fpa - fpb) / pi
    return np.log(pi), u, curv


def _threshold_terms(theta: np.ndarray, w: np.ndarray, y: np.ndarray, c: int):
    """Gradient and (negative log-lik) curvature diagonal for the thresholds."""
    a, b = _bounds(theta, w, y, c)
    fa_cdf = expit(a)
    fb_cdf = expit(b)
    pi = np.maximum(fa_cdf - fb_cdf, PROB_FLOOR)
    fa = fa_cdf * (1.0 - fa_cdf)
    fb = fb_cdf * (1.0 - fb_cdf)
    fpa = fa * (1.0 - 2.0 * fa_cdf)
    fpb = fb * (1.0 - 2.0 * fb_cdf)
    # an observation with response r contributes +f(A)/pi to d l / d theta_r
    # (its upper threshold) and -f(B)/pi to d l / d theta_{r-1} (its lower)
    up = np.bincount(y, weights=fa / pi, minlength=c + 1)
    lo = np.bincount(y - 1, weights=fb / pi, minlength=c + 1)
    grad = up[1:c] - lo[1:c]
    up2 = np.bincount(y, weights=(fa / pi) ** 2 - fpa / pi, minlength=c + 1)
    lo2 = np.bincount(y - 1, weights=fpb / pi + (fb / pi) ** 2, minlength=c + 1)
    curv_diag = up2[1:c] + lo2[1:c]
    return grad, curv_diag


def log_likelihood(data: OrdinalDataset, params: ModelParams) -> float:
    """Sum over observations of log pi_{i, y_i} (with floor-clamped pi)."""
    _check_dims(data, params)
    w = predictor_sums(data, params.groups)
    ll, _, _ = pointwise_terms(params.thresholds, w, data.y, data.c)
    return float(np.sum(ll))


def score(data: OrdinalDataset, params: ModelParams) -> list:
    """Analytic gradient of the log-likelihood, blockwise.

    Returns ``[g_0, g_1, ..., g_p]`` where block 0 holds the threshold
    gradient (length c-1) and block j the gradient for predictor j's dummy
    coefficients (length k_j).
    """
    _check_dims(data, params)
    w = predictor_sums(data, params.groups)
    _, u, _ = pointwise_terms(params.thresholds, w, data.y, data.c)
    g_theta, _ = _threshold_terms(params.thresholds, w, data.y, data.c)
    blocks = [g_theta]
    for j in range(data.p):
        k = int(data.levels[j])
        t = np.bincount(data.x[:, j], weights=u, minlength=k + 1)
        blocks.append(t[1:k + 1])
    return blocks


def curvature_diag(data: OrdinalDataset, params: ModelParams) -> np.ndarray:
    """Per-block curvature scalars h_j, intercept block first.

    Each scalar is the largest absolute entry of that block's diagonal of
    the negative log-likelihood Hessian, clamped to [1e-6, 1e8].  The
    clamped scalar is the step-size control the block descent solver uses.
    """
    _check_dims(data, params)
    w = predictor_sums(data, params.groups)
    _, _, curv = pointwise_terms(params.thresholds, w, data.y, data.c)
    _, theta_diag = _threshold_terms(params.thresholds, w, data.y, data.c)
    h = np.empty(data.p + 1)
    h[0] = np.max(np.abs(theta_diag))
    for j in range(data.p):
        k = int(data.levels[j])
        d = np.bincount(data.x[:, j], weights=curv, minlength=k + 1)[1:k + 1]
        h[j + 1] = np.max(np.abs(d))
    return np.clip(h, CURV_MIN, CURV_MAX)


def raw_curvature_diag(data: OrdinalDataset, params: ModelParams) -> list:
    """Unclamped diagonal of the negative log-likelihood Hessian, blockwise.

    Exposed for finite-difference verification; ``curvature_diag`` collapses
    these vectors to clamped scalars.
    """
    _check_dims(data, params)
    w = predictor_sums(data, params.groups)
    _, _, curv = pointwise_terms(params.thresholds, w, data.y, data.c)
    _, theta_diag = _threshold_terms(params.thresholds, w, data.y, data.c)
    blocks = [theta_diag]
    for j in range(data.p):
        k = int(data.levels[j])
        blocks.append(np.bincount(data.x[:, j], weights=curv, minlength=k + 1)[1:k + 1])
    return blocks


def probability_table(data: OrdinalDataset, params: ModelParams) -> ProbabilityTable:
    """Full n x c probability table for ``data`` under ``params``."""
    return category_probs(linear_predictor(data, params))
