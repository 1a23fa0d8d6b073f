"""Difference penalties and the split-coding reparameterization.

Both penalties act on adjacent-level differences of a coefficient group, so
they are invariant under adding a constant to the group.  Expressed in
split-coded parameters (the difference vector) the smoothing penalty is a
plain group-lasso norm and the fusion penalty a plain L1 norm, which is the
identity both solvers rely on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ordfit.errors import ConfigError

PENALTY_KINDS = ("smooth-group", "fused", "numeric-lasso")


def difference_matrix(k: int) -> np.ndarray:
    """First-order difference matrix, (k-1) x k, rows (-1, 1) on adjacent cols."""
    if k < 2:
        raise ConfigError(f"difference matrix needs k >= 2 levels, got {k}")
    d = np.zeros((k - 1, k))
    idx = np.arange(k - 1)
    d[idx, idx] = -1.0
    d[idx, idx + 1] = 1.0
    return d


def to_split_params(beta_j) -> np.ndarray:
    """Adjacent-level differences; the split-coded coefficients of a group."""
    beta_j = np.asarray(beta_j, dtype=float)
    return np.diff(beta_j)


def from_split_params(beta_tilde_j) -> np.ndarray:
    """Inverse of :func:`to_split_params`, anchored by effect coding.

    Cumulative sums starting at zero give one representative of the shift
    class; centering it picks the representative with sum zero.  Exactly
    zero differences map back to exactly equal adjacent coefficients.
    """
    beta_tilde_j = np.asarray(beta_tilde_j, dtype=float)
    levels = np.concatenate([[0.0], np.cumsum(beta_tilde_j)])
    return levels - levels.mean()


def smooth_group_penalty(beta_j, df_j: float) -> float:
    """sqrt(df_j) times the L2 norm of the adjacent-level differences."""
    return float(np.sqrt(df_j) * np.linalg.norm(to_split_params(beta_j)))


def fused_penalty(beta_j) -> float:
    """Sum of absolute adjacent-level differences."""
    return float(np.sum(np.abs(to_split_params(beta_j))))


def split_code(level: int, k: int) -> np.ndarray:
    """Split-coded 0/1 row for a level: first level-1 entries one, rest zero."""
    if not 1 <= level <= k:
        raise ConfigError(f"level {level} out of range 1..{k}")
    row = np.zeros(k - 1)
    row[: level - 1] = 1.0
    return row


@dataclass
class PenaltySpec:
    """Penalty kind, lambda grid, and per-group degrees-of-freedom weights.

    The grid must be strictly decreasing and positive; a single terminal
    zero is allowed and means an unpenalized final fit.  ``df`` carries
    k_j - 1 for each group (the smoothing penalty's group weights).
    """

    kind: str
    lambda_grid: np.ndarray
    df: np.ndarray

    def __post_init__(self):
        if self.kind not in PENALTY_KINDS:
            raise ConfigError(
                f"unknown penalty kind {self.kind!r}; expected one of {PENALTY_KINDS}"
            )
        self.lambda_grid = np.asarray(self.lambda_grid, dtype=float)
        if self.lambda_grid.ndim != 1 or self.lambda_grid.size < 1:
            raise ConfigError("lambda grid must be a non-empty vector")
        if np.any(np.diff(self.lambda_grid) >= 0):
            raise ConfigError("lambda grid must be strictly decreasing")
        if np.any(self.lambda_grid[:-1] <= 0) or self.lambda_grid[-1] < 0:
            raise ConfigError("lambda values must be positive (terminal 0 allowed)")
        self.df = np.asarray(self.df, dtype=float)
        if np.any(self.df < 1):
            raise ConfigError("df weights must be >= 1 (k_j - 1 with k_j >= 2)")

    @classmethod
    def for_data(cls, kind: str, lambda_grid, levels) -> "PenaltySpec":
        """Spec with the standard df_j = k_j - 1 weights for ``levels``."""
        levels = np.asarray(levels)
        return cls(kind=kind, lambda_grid=lambda_grid, df=levels - 1.0)
