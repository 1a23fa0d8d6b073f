"""Ordinal datasets and their dummy / split-coded design matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ordfit.errors import DataError


@dataclass
class OrdinalDataset:
    """n observations of p ordinal predictors and one ordinal response.

    Predictor values are integer levels ``1..k_j`` (column j), the response
    takes values ``1..c``.  ``levels`` may declare more categories than are
    observed; empty categories stay in the design and are handled by the
    penalties.

    Attributes
    ----------
    x : (n, p) int array of predictor levels.
    y : (n,) int array of response levels.
    levels : (p,) int array, number of categories k_j per predictor.
    c : int, number of response categories.
    names : optional list of predictor names (defaults to x1..xp).
    """

    x: np.ndarray
    y: np.ndarray
    levels: np.ndarray = None
    c: int = None
    names: list = None

    def __post_init__(self):
        self.x = np.asarray(self.x)
        self.y = np.asarray(self.y)
        if self.x.ndim == 1:
            self.x = self.x.reshape(-1, 1)
        if self.x.ndim != 2:
            raise DataError("predictor matrix must be 2-dimensional")
        if not np.issubdtype(self.x.dtype, np.integer):
            xi = self.x.astype(np.int64)
            if np.any(xi != self.x):
                raise DataError("predictor levels must be integers")
            self.x = xi
        if not np.issubdtype(self.y.dtype, np.integer):
            yi = self.y.astype(np.int64)
            if np.any(yi != self.y):
                raise DataError("response levels must be integers")
            self.y = yi
        n, p = self.x.shape
        if n < 1 or p < 1:
            raise DataError("need at least one observation and one predictor")
        if self.y.shape != (n,):
            raise DataError(
                f"response length {self.y.shape} does not match n={n}"
            )
        if self.levels is None:
            self.levels = self.x.max(axis=0)
        self.levels = np.asarray(self.levels, dtype=np.int64)
        if self.levels.shape != (p,):
            raise DataError("levels must give one category count per predictor")
        if np.any(self.levels < 2):
            j = int(np.argmin(self.levels))
            raise DataError(f"predictor {j} has fewer than 2 levels")
        if self.c is None:
            self.c = int(self.y.max())
        self.c = int(self.c)
        if self.c < 2:
            raise DataError("response needs at least 2 categories")
        if np.any(self.x < 1) or np.any(self.x > self.levels[None, :]):
            bad = np.argwhere((self.x < 1) | (self.x > self.levels[None, :]))[0]
            raise DataError(
                f"predictor level out of range {{1..k_j}}",
                row=int(bad[0]) + 1,
                column=int(bad[1]),
            )
        if np.any(self.y < 1) or np.any(self.y > self.c):
            bad = int(np.argwhere((self.y < 1) | (self.y > self.c))[0])
            raise DataError(f"response level out of range {{1..{self.c}}}", row=bad + 1)
        if self.names is None:
            self.names = [f"x{j + 1}" for j in range(p)]

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    def subset(self, idx) -> "OrdinalDataset":
        """Row subset keeping the full level structure (and category count)."""
        idx = np.asarray(idx)
        return OrdinalDataset(
            x=self.x[idx], y=self.y[idx], levels=self.levels.copy(), c=self.c,
            names=list(self.names),
        )


@dataclass
class DesignMatrices:
    """Dummy and split-coded designs for an ordinal dataset.

    ``dummy`` has one 0/1 indicator column per (predictor, level); block j
    occupies columns ``dummy_offsets[j]:dummy_offsets[j+1]`` (k_j columns).
    ``split`` uses cumulative coding: the row for level l has its first
    l-1 block entries equal to 1; block j occupies
    ``split_offsets[j]:split_offsets[j+1]`` (k_j - 1 columns).  Under split
    coding the coefficients are the adjacent-level differences of the dummy
    coefficients, which is the parameterization both penalized solvers use.
    """

    dummy: np.ndarray
    split: np.ndarray
    dummy_offsets: np.ndarray
    split_offsets: np.ndarray

    def dummy_block(self, j: int) -> np.ndarray:
        return self.dummy[:, self.dummy_offsets[j]:self.dummy_offsets[j + 1]]

    def split_block(self, j: int) -> np.ndarray:
        return self.split[:, self.split_offsets[j]:self.split_offsets[j + 1]]


def build_design(data: OrdinalDataset) -> DesignMatrices:
    """Construct dummy and split-coded design matrices for ``data``."""
    n, p = data.n, data.p
    k = data.levels
    dummy_offsets = np.concatenate([[0], np.cumsum(k)])
    split_offsets = np.concatenate([[0], np.cumsum(k - 1)])
    dummy = np.zeros((n, int(dummy_offsets[-1])))
    split = np.zeros((n, int(split_offsets[-1])))
    rows = np.arange(n)
    for j in range(p):
        xj = data.x[:, j]
        dummy[rows, dummy_offsets[j] + xj - 1] = 1.0
        # split columns l = 1..k-1 are indicators of x > l
        blk = split[:, split_offsets[j]:split_offsets[j + 1]]
        blk[:] = (xj[:, None] > np.arange(1, k[j])[None, :]).astype(float)
    return DesignMatrices(
        dummy=dummy,
        split=split,
        dummy_offsets=dummy_offsets,
        split_offsets=split_offsets,
    )
