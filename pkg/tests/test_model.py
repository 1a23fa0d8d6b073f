import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ordfit import (
    OrdinalDataset,
    ModelParams,
    linear_predictor,
    category_probs,
    log_likelihood,
    score,
    curvature_diag,
    DataError,
    DimensionError,
)
from ordfit.model import CURV_MAX, CURV_MIN, raw_curvature_diag

from conftest import make_instance


def test_linear_predictor_zero_coefficients():
    data = OrdinalDataset(x=[[2], [1], [3]], y=[1, 2, 3], levels=[3], c=3)
    params = ModelParams([-1.0, 1.0], [np.zeros(3)])
    eta = linear_predictor(data, params)
    assert np.allclose(eta, np.array([[-1.0, 1.0]] * 3))


def test_linear_predictor_single_row_formula():
    # c=2, theta=(0), one binary predictor with effect (0.5, -0.5), level 1
    data = OrdinalDataset(x=[[1]], y=[1], levels=[2], c=2)
    params = ModelParams([0.0], [np.array([0.5, -0.5])])
    eta = linear_predictor(data, params)
    assert eta.shape == (1, 1)
    assert eta[0, 0] == pytest.approx(-0.5, abs=1e-15)


def test_linear_predictor_shift_invariance():
    data, params = make_instance(seed=1)
    eta = linear_predictor(data, params)
    shifted = params.copy()
    delta = 0.73
    shifted.groups[1] = shifted.groups[1] + delta
    shifted = ModelParams(shifted.thresholds + delta, shifted.groups)
    assert np.allclose(eta, linear_predictor(data, shifted), atol=1e-12)


def test_linear_predictor_dimension_errors():
    data = OrdinalDataset(x=[[1, 2]], y=[1], levels=[2, 3], c=2)
    with pytest.raises(DimensionError):
        linear_predictor(data, ModelParams([0.0], [np.zeros(2)]))
    with pytest.raises(DimensionError) as err:
        linear_predictor(data, ModelParams([0.0], [np.zeros(2), np.zeros(4)]))
    assert "group=1" in str(err.value)


def test_category_probs_symmetric_binary():
    table = category_probs(np.array([[0.0]]))
    assert np.allclose(table.pi, [[0.5, 0.5]])


def test_category_probs_three_categories():
    # F(-1) = 1/(1+e), F(1) = e/(1+e)
    table = category_probs(np.array([[-1.0, 1.0]]))
    f1 = 1.0 / (1.0 + math.e)
    expected = [f1, 1.0 - 2.0 * f1, f1]
    assert np.allclose(table.pi[0], expected, atol=1e-5)
    assert table.pi[0, 0] == pytest.approx(0.26894, abs=1e-5)
    assert table.pi[0, 1] == pytest.approx(0.46212, abs=1e-5)


def test_category_probs_rejects_nonmonotone():
    with pytest.raises(DataError) as err:
        category_probs(np.array([[1.0, -1.0]]))
    assert "observation 1" in str(err.value) and "category 2" in str(err.value)


@given(
    st.lists(
        st.lists(st.floats(-30, 30), min_size=2, max_size=5),
        min_size=1,
        max_size=8,
    )
)
def test_category_probs_rows_sum_to_one(rows):
    width = min(len(r) for r in rows)
    eta = np.sort(np.array([r[:width] for r in rows]), axis=1)
    keep = np.all(np.diff(eta, axis=1) > 0, axis=1)
    if not np.any(keep):
        return
    table = category_probs(eta[keep])
    assert np.allclose(table.pi.sum(axis=1), 1.0, atol=1e-12)
    assert np.all(np.diff(table.cumulative, axis=1) >= 0.0)


def test_log_likelihood_single_balanced_observation():
    data = OrdinalDataset(x=[[1]], y=[1], levels=[2], c=2)
    params = ModelParams([0.0], [np.zeros(2)])
    assert log_likelihood(data, params) == pytest.approx(math.log(0.5), abs=1e-12)


def test_log_likelihood_additive_over_duplicates():
    data, params = make_instance(seed=2, n=17)
    doubled = OrdinalDataset(
        x=np.vstack([data.x, data.x]),
        y=np.concatenate([data.y, data.y]),
        levels=data.levels,
        c=data.c,
    )
    assert log_likelihood(doubled, params) == pytest.approx(
        2.0 * log_likelihood(data, params), rel=1e-12
    )


def test_log_likelihood_matches_bruteforce_sum():
    data, params = make_instance(seed=7, n=5)
    table = category_probs(linear_predictor(data, params))
    expected = 0.0
    for i in range(5):
        expected += math.log(table.pi[i, data.y[i] - 1])
    assert log_likelihood(data, params) == pytest.approx(expected, abs=1e-12)


def test_restriction_invariance_of_likelihood():
    data, params = make_instance(seed=4)
    base = log_likelihood(data, params)
    for delta in (-2.0, 0.31, 5.0):
        for j in range(data.p):
            groups = [g.copy() for g in params.groups]
            groups[j] = groups[j] + delta
            moved = ModelParams(params.thresholds + delta, groups)
            assert log_likelihood(data, moved) == pytest.approx(base, abs=1e-9)


def _finite_diff_score(data, params, h=1e-6):
    blocks = [np.zeros_like(params.thresholds)]
    for r in range(params.thresholds.size):
        tp, tm = params.thresholds.copy(), params.thresholds.copy()
        tp[r] += h
        tm[r] -= h
        blocks[0][r] = (
            log_likelihood(data, ModelParams(tp, params.groups))
            - log_likelihood(data, ModelParams(tm, params.groups))
        ) / (2 * h)
    for j, g in enumerate(params.groups):
        out = np.zeros_like(g)
        for l in range(g.size):
            gp = [x.copy() for x in params.groups]
            gm = [x.copy() for x in params.groups]
            gp[j][l] += h
            gm[j][l] -= h
            out[l] = (
                log_likelihood(data, ModelParams(params.thresholds, gp))
                - log_likelihood(data, ModelParams(params.thresholds, gm))
            ) / (2 * h)
        blocks.append(out)
    return blocks


def test_score_matches_finite_differences():
    rng = np.random.default_rng(99)
    for trial in range(6):
        c = int(rng.integers(2, 6))
        levels = rng.integers(2, 6, size=int(rng.integers(1, 4)))
        data, _ = make_instance(
            seed=trial + 100,
            n=int(rng.integers(10, 50)),
            levels=tuple(levels),
            theta=np.linspace(-1.0, 1.0, c - 1) if c > 2 else (0.1,),
        )
        params = ModelParams(
            np.sort(rng.normal(0, 1, c - 1) * 0.8 + np.linspace(-1, 1, c - 1)),
            [rng.normal(0, 0.5, k) for k in levels],
        )
        analytic = score(data, params)
        fd = _finite_diff_score(data, params)
        for a, f in zip(analytic, fd):
            assert np.max(np.abs(a - f) / np.maximum(1.0, np.abs(f))) < 1e-6


def test_score_antisymmetric_on_symmetric_data():
    # symmetric response frequencies, beta = 0, symmetric thresholds
    x = np.array([[1], [1], [2], [2]])
    y = np.array([1, 3, 1, 3])  # categories 1 and 3 equally frequent, none in 2
    data = OrdinalDataset(x=x, y=y, levels=[2], c=3)
    params = ModelParams([-0.7, 0.7], [np.zeros(2)])
    g_theta = score(data, params)[0]
    assert g_theta[0] == pytest.approx(-g_theta[1], abs=1e-12)


def test_score_vanishes_at_mle():
    from ordfit import fit_mle_newton

    data, _ = make_instance(seed=12, n=200)
    fit = fit_mle_newton(data)
    assert fit.converged
    blocks = score(data, fit.params)
    assert max(np.max(np.abs(b)) for b in blocks) < 1e-6


def test_curvature_clamp_bounds():
    # the clamp window itself
    assert np.clip(1e-9, CURV_MIN, CURV_MAX) == 1e-6
    assert np.clip(1e12, CURV_MIN, CURV_MAX) == 1e8
    data, params = make_instance(seed=5)
    h = curvature_diag(data, params)
    assert h.shape == (data.p + 1,)
    assert np.all(h >= CURV_MIN) and np.all(h <= CURV_MAX)
    raw = raw_curvature_diag(data, params)
    for j, block in enumerate(raw):
        assert h[j] == pytest.approx(
            np.clip(np.max(np.abs(block)), CURV_MIN, CURV_MAX)
        )


def test_raw_curvature_matches_finite_differences():
    data, params = make_instance(seed=6, n=40)
    raw = raw_curvature_diag(data, params)
    h = 1e-4

    def ll(theta, groups):
        return log_likelihood(data, ModelParams(theta, groups))

    base = ll(params.thresholds, params.groups)
    for r in range(params.thresholds.size):
        tp, tm = params.thresholds.copy(), params.thresholds.copy()
        tp[r] += h
        tm[r] -= h
        fd = -(ll(tp, params.groups) - 2 * base + ll(tm, params.groups)) / h**2
        assert raw[0][r] == pytest.approx(fd, rel=1e-4, abs=1e-6)
    for j in range(data.p):
        for l in range(params.groups[j].size):
            gp = [g.copy() for g in params.groups]
            gm = [g.copy() for g in params.groups]
            gp[j][l] += h
            gm[j][l] -= h
            fd = -(
                ll(params.thresholds, gp) - 2 * base + ll(params.thresholds, gm)
            ) / h**2
            assert raw[j + 1][l] == pytest.approx(fd, rel=1e-4, abs=1e-6)


def test_model_params_validation():
    with pytest.raises(DimensionError):
        ModelParams([1.0, 0.5], [np.zeros(2)])  # decreasing thresholds
    with pytest.raises(DimensionError):
        ModelParams([0.0, 0.0], [np.zeros(2)])  # tie
