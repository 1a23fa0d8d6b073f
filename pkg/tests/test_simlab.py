import numpy as np
import pytest
from scipy import stats
from scipy.special import expit

from ordfit import (
    ConfigError,
    SolverConfig,
    fit_mle_newton,
    generate,
    roc_selection,
    roc_fusion,
    fusion_rates,
    run_replications,
    SimulationScenario,
    GroundTruth,
)
from ordfit.simlab import (
    default_informative_curves,
    forward_stepwise_aic,
    _fill_unranked,
)


def test_generate_is_deterministic():
    scen = SimulationScenario(p=8, n=50, informative=[], noise_count=8, seed=99)
    d1, t1 = generate(scen)
    d2, _ = generate(scen)
    assert np.array_equal(d1.x, d2.x) and np.array_equal(d1.y, d2.y)
    assert t1.relevant_variables == set()


def test_generate_null_matches_threshold_distribution():
    # all-zero effect curves: category probabilities are the F-differences
    # of the design thresholds
    theta = np.array([5.5, 6.5, 7.5, 8.5])
    scen = SimulationScenario(
        p=4, n=10000, thresholds=theta, informative=[], noise_count=4, seed=31415,
    )
    data, _ = generate(scen)
    cum = np.concatenate([[0.0], expit(theta), [1.0]])
    probs = np.diff(cum)
    counts = np.bincount(data.y, minlength=6)[1:6]
    for r in range(5):
        se = np.sqrt(scen.n * probs[r] * (1.0 - probs[r]))
        assert abs(counts[r] - scen.n * probs[r]) <= 3.0 * se


def test_generate_levels_uniform():
    scen = SimulationScenario(
        p=4, n=10000, thresholds=(-1.5, -0.5, 0.5, 1.5),
        informative=[], noise_count=4, seed=2718,
    )
    data, _ = generate(scen)
    for j in range(4):
        counts = np.bincount(data.x[:, j], minlength=6)[1:6]
        assert stats.chisquare(counts).pvalue > 0.001


def test_default_curve_structure():
    for levels in (5, 9):
        curves = default_informative_curves(levels, False, 0.7, 0.5)
        assert len(curves) == 12
        assert all(cv.size == levels for cv in curves)
        # the peaked quadruple has no linear trend: numeric coding sees nothing
        lv = np.arange(1, levels + 1) - (levels + 1) / 2.0
        for cv in curves[:4]:
            assert abs(lv @ cv) < 1e-9
        fused = default_informative_curves(levels, True, 0.7, 0.5)
        for cv in fused:
            assert np.any(np.diff(cv) == 0.0)  # genuine plateaus
    with pytest.raises(ConfigError):
        default_informative_curves(7, False, 0.7, 0.5)


def _truth(p, relevant, levels=4, diffs=None):
    return GroundTruth(
        relevant_variables=set(relevant),
        true_differences=diffs or {},
        levels=levels,
        p=p,
    )


def test_roc_perfect_and_reversed():
    truth = _truth(6, [0, 1])
    perfect = roc_selection(np.array([9.0, 8.0, 4.0, 3.0, 2.0, 1.0]), truth)
    assert perfect.auc == 1.0
    reversed_ = roc_selection(np.array([1.0, 2.0, 4.0, 5.0, 6.0, 7.0]), truth)
    assert reversed_.auc == 0.0


def _pair_count_auc(scores, labels):
    pos = np.flatnonzero(labels)
    neg = np.flatnonzero(~labels)
    total = 0.0
    for i in pos:
        for j in neg:
            if scores[i] > scores[j]:
                total += 1.0
            elif scores[i] == scores[j]:
                total += 0.5
    return total / (pos.size * neg.size)


def test_roc_auc_matches_pair_count_oracle():
    rng = np.random.default_rng(8)
    for _ in range(60):
        p = int(rng.integers(2, 11))
        labels = np.zeros(p, dtype=bool)
        labels[rng.choice(p, size=int(rng.integers(1, p)), replace=False)] = True
        if labels.all():
            labels[0] = False
        scores = rng.integers(0, 5, size=p).astype(float)  # ties likely
        truth = _truth(p, np.flatnonzero(labels))
        assert roc_selection(scores, truth).auc == pytest.approx(
            _pair_count_auc(scores, labels), abs=1e-12
        )


def test_unranked_tail_is_seeded_and_behind():
    scores = np.array([np.nan, 3.0, np.nan, 1.0, np.nan, np.nan])
    filled_a = _fill_unranked(scores, seed=5)
    filled_b = _fill_unranked(scores, seed=5)
    assert np.array_equal(filled_a, filled_b)
    missing = [0, 2, 4, 5]
    assert all(filled_a[i] < 1.0 for i in missing)
    assert len({filled_a[i] for i in missing}) == len(missing)
    filled_c = _fill_unranked(scores, seed=6)
    assert not np.array_equal(filled_a, filled_c)


def test_roc_fusion_enumerated_toy():
    # 2 predictors with 3 levels: 4 contrasts, 2 truly nonzero
    truth = _truth(2, [0], levels=3, diffs={0: {0, 1}})
    entry = {(0, 0): 0.9, (0, 1): 0.7, (1, 0): 0.3}  # true ones enter first
    roc = roc_fusion(entry, truth, seed=0)
    assert roc.auc == 1.0
    entry_bad = {(1, 0): 0.9, (1, 1): 0.8, (0, 0): 0.3, (0, 1): 0.2}
    assert roc_fusion(entry_bad, truth, seed=0).auc == 0.0


class _FakeFit:
    def __init__(self, split_params):
        self.split_params = split_params


def test_fusion_rates_extremes():
    truth = _truth(2, [0], levels=3, diffs={0: {0}})
    exact = _FakeFit([np.array([0.5, 0.0]), np.zeros(2)])
    assert fusion_rates(exact, truth) == (0.0, 0.0)
    everything = _FakeFit([np.array([0.5, 0.1]), np.array([0.2, 0.3])])
    fpr, fnr = fusion_rates(everything, truth)
    assert fnr == 0.0 and fpr == 1.0


def test_lambda_zero_recovers_true_curves_on_large_sample():
    curves = [
        np.array([-0.86, 0.34, 0.94, 0.34, -0.76]),
        np.array([-1.0, -0.5, 0.0, 0.5, 1.0]),
    ]
    scen = SimulationScenario(
        p=2, levels_per_predictor=5, n=50000, thresholds=(-1.2, 0.0, 1.2),
        informative=curves, noise_count=0, seed=77,
    )
    data, _ = generate(scen)
    fit = fit_mle_newton(data)
    assert fit.converged
    for est, true in zip(fit.params.groups, curves):
        centered = true - true.mean()
        assert np.max(np.abs(est - centered)) < 0.05


def test_replication_driver_deterministic_and_null_centered():
    scen = SimulationScenario(
        p=20, levels_per_predictor=5, n=120, thresholds=(-1.5, -0.5, 0.5, 1.5),
        informative=[np.zeros(5)] * 12, noise_count=8, seed=424242,
    )
    cfg = SolverConfig(tol=1e-5)
    summary = run_replications(
        scen, methods=("ors", "orf", "numeric-lasso", "mle-stepwise"),
        r=50, config=cfg, grid_points=10, grid_floor=1e-2,
    )
    again = run_replications(
        scen, methods=("ors",), r=50, config=cfg, grid_points=10, grid_floor=1e-2,
    )
    assert np.array_equal(summary.aucs("ors"), again.aucs("ors"))
    for method in ("ors", "orf", "numeric-lasso", "mle-stepwise"):
        mean = summary.mean_auc(method)
        assert abs(mean - 0.5) <= 0.1, (method, mean)


def test_forward_stepwise_finds_strong_signal_first():
    curves = [np.array([-1.2, -0.4, 0.4, 1.2])]
    scen = SimulationScenario(
        p=3, levels_per_predictor=4, n=500, thresholds=(-1.0, 0.0, 1.0),
        informative=curves, noise_count=2, seed=909,
    )
    data, _ = generate(scen)
    order = forward_stepwise_aic(data)
    assert order[0] == 0
