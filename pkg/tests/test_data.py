import numpy as np
import pytest

from ordfit import OrdinalDataset, build_design, DataError
from ordfit.penalty import to_split_params

from conftest import make_instance


def test_level_and_category_inference():
    data = OrdinalDataset(x=[[1, 2], [3, 1]], y=[1, 2])
    assert data.n == 2 and data.p == 2 and data.c == 2
    assert data.levels.tolist() == [3, 2]


def test_declared_levels_can_exceed_observed():
    data = OrdinalDataset(x=[[1], [2]], y=[1, 2], levels=[5], c=3)
    assert data.levels.tolist() == [5] and data.c == 3


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(x=[[0, 1]], y=[1]),                      # level below 1
        dict(x=[[1, 1]], y=[3], c=2),                 # response above c
        dict(x=[[1, 1]], y=[1], levels=[1, 2]),       # k_j < 2
        dict(x=[[1.5]], y=[1]),                       # non-integer level
        dict(x=[[1], [2]], y=[1]),                    # length mismatch
    ],
)
def test_invalid_datasets_rejected(kwargs):
    with pytest.raises(DataError):
        OrdinalDataset(**kwargs)


def test_dummy_blocks_are_indicators(small_data):
    design = build_design(small_data)
    for j in range(small_data.p):
        block = design.dummy_block(j)
        assert np.all(block.sum(axis=1) == 1.0)
        assert set(np.unique(block)) <= {0.0, 1.0}
        rows = np.arange(small_data.n)
        assert np.all(block[rows, small_data.x[:, j] - 1] == 1.0)


def test_split_rows_follow_cumulative_coding(small_data):
    design = build_design(small_data)
    for j in range(small_data.p):
        block = design.split_block(j)
        for i in range(small_data.n):
            level = small_data.x[i, j]
            expected = np.zeros(small_data.levels[j] - 1)
            expected[: level - 1] = 1.0
            assert np.array_equal(block[i], expected)


def test_dummy_and_split_predictions_differ_by_constant():
    data, params = make_instance(seed=11)
    design = build_design(data)
    rng = np.random.default_rng(5)
    for j in range(data.p):
        beta = rng.normal(size=data.levels[j])
        dummy_part = design.dummy_block(j) @ beta
        split_part = design.split_block(j) @ to_split_params(beta)
        gap = dummy_part - split_part
        # the anchoring constant is the level-1 coefficient, same for every row
        assert np.allclose(gap, beta[0], atol=1e-12)


def test_subset_keeps_structure(small_data):
    sub = small_data.subset(np.arange(0, small_data.n, 2))
    assert sub.c == small_data.c
    assert np.array_equal(sub.levels, small_data.levels)
    assert sub.n == (small_data.n + 1) // 2
