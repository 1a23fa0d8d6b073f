"""Shared fixtures and synthetic-instance helpers."""

import numpy as np
import pytest
from scipy.special import expit

from ordfit import OrdinalDataset, ModelParams


def sample_response(theta, w, rng):
    """Draw ordinal responses from the cumulative logit model."""
    cum = expit(np.asarray(theta)[None, :] - np.asarray(w)[:, None])
    u = rng.random(w.size)
    return (u[:, None] > cum).sum(axis=1) + 1


def make_instance(seed, n=60, levels=(4, 3, 5), theta=(-1.0, 0.0, 1.2), scale=0.8):
    """Random dataset with moderate true effects; returns (data, true_params)."""
    rng = np.random.default_rng(seed)
    levels = np.asarray(levels)
    x = np.column_stack([rng.integers(1, k + 1, size=n) for k in levels])
    groups = [np.linspace(-scale, scale, k) for k in levels]
    w = sum(g[x[:, j] - 1] for j, g in enumerate(groups))
    y = sample_response(theta, w, rng)
    data = OrdinalDataset(x=x, y=y, levels=levels, c=len(theta) + 1)
    return data, ModelParams(np.asarray(theta, float), groups)


def make_wellposed_instance(seed, n=180, levels=(4, 3), c=4, scale=0.7):
    """Instance where the MLE exists: every response category well populated.

    Scans seeds deterministically from ``seed`` until each category has at
    least max(5, n/(4c)) observations.
    """
    want = max(5, n // (4 * c))
    theta = np.linspace(-1.2, 1.2, c - 1)
    for s in range(seed, seed + 200):
        rng = np.random.default_rng(s)
        levels_arr = np.asarray(levels)
        x = np.column_stack([rng.integers(1, k + 1, size=n) for k in levels_arr])
        groups = [scale * np.sin(np.linspace(0.3, 2.2, k)) for k in levels_arr]
        w = sum(g[x[:, j] - 1] for j, g in enumerate(groups))
        y = sample_response(theta, w, rng)
        counts = np.bincount(y, minlength=c + 1)[1:c + 1]
        if counts.min() >= want:
            return OrdinalDataset(x=x, y=y, levels=levels_arr, c=c)
    raise RuntimeError("could not build a well-posed instance")


@pytest.fixture
def small_data():
    data, _ = make_instance(seed=3)
    return data
