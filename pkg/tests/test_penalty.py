import numpy as np
import pytest
from hypothesis import given, strategies as st

from ordfit import (
    ConfigError,
    PenaltySpec,
    difference_matrix,
    smooth_group_penalty,
    fused_penalty,
    split_code,
    to_split_params,
    from_split_params,
)

coeff_vectors = st.lists(
    st.floats(-50, 50, allow_nan=False), min_size=2, max_size=9
).map(np.asarray)


def test_difference_matrix_smallest():
    assert np.array_equal(difference_matrix(2), [[-1.0, 1.0]])


def test_difference_matrix_pattern():
    assert np.array_equal(
        difference_matrix(3), [[-1.0, 1.0, 0.0], [0.0, -1.0, 1.0]]
    )


def test_difference_matrix_annihilates_constants():
    d = difference_matrix(4)
    assert np.array_equal(d @ np.full(4, 5.0), np.zeros(3))
    with pytest.raises(ConfigError):
        difference_matrix(1)


def test_smooth_group_penalty_values():
    assert smooth_group_penalty(np.zeros(3), 2.0) == 0.0
    assert smooth_group_penalty(np.full(4, 3.3), 3.0) == 0.0
    # sqrt(2 * (1 + 1)) = 2
    assert smooth_group_penalty(np.array([1.0, 2.0, 3.0]), 2.0) == pytest.approx(2.0)


def test_fused_penalty_values():
    assert fused_penalty(np.full(5, -1.7)) == 0.0
    assert fused_penalty(np.array([1.0, 2.0, 4.0])) == pytest.approx(3.0)


@given(coeff_vectors, st.floats(-20, 20, allow_nan=False))
def test_penalties_shift_invariant(beta, delta):
    df = beta.size - 1.0
    assert smooth_group_penalty(beta + delta, df) == pytest.approx(
        smooth_group_penalty(beta, df), rel=1e-9, abs=1e-9
    )
    assert fused_penalty(beta + delta) == pytest.approx(
        fused_penalty(beta), rel=1e-9, abs=1e-9
    )


def test_split_code_table():
    assert np.array_equal(split_code(1, 5), np.zeros(4))
    assert np.array_equal(split_code(3, 5), [1.0, 1.0, 0.0, 0.0])
    for k in (2, 4, 7):
        assert np.array_equal(split_code(k, k), np.ones(k - 1))
    with pytest.raises(ConfigError):
        split_code(0, 4)
    with pytest.raises(ConfigError):
        split_code(5, 4)


def test_split_param_maps_worked_example():
    beta = np.array([-1.0, 0.0, 1.0])
    tilde = to_split_params(beta)
    assert np.array_equal(tilde, [1.0, 1.0])
    assert np.array_equal(from_split_params([1.0, 1.0]), beta)
    assert np.array_equal(from_split_params(np.zeros(3)), np.zeros(4))


@given(coeff_vectors)
def test_split_round_trip_on_centered_vectors(beta):
    centered = beta - beta.mean()
    back = from_split_params(to_split_params(centered))
    assert np.allclose(back, centered, atol=1e-12 * max(1.0, np.abs(beta).max()))


@given(coeff_vectors)
def test_penalty_identities_under_reparameterization(beta):
    df = beta.size - 1.0
    tilde = to_split_params(beta)
    assert smooth_group_penalty(beta, df) == pytest.approx(
        np.sqrt(df) * np.linalg.norm(tilde), rel=1e-12, abs=1e-12
    )
    assert fused_penalty(beta) == pytest.approx(
        np.abs(tilde).sum(), rel=1e-12, abs=1e-12
    )


def test_exact_zero_differences_survive_round_trip():
    beta_tilde = np.array([0.4, 0.0, -0.2, 0.0])
    back = to_split_params(from_split_params(beta_tilde))
    assert back[1] == 0.0 and back[3] == 0.0


def test_penalty_spec_validation():
    PenaltySpec.for_data("fused", [1.0, 0.5, 0.0], [3, 4])  # terminal zero ok
    with pytest.raises(ConfigError):
        PenaltySpec.for_data("fused", [0.5, 1.0], [3, 4])  # increasing
    with pytest.raises(ConfigError):
        PenaltySpec.for_data("fused", [1.0, 0.0, -0.5], [3, 4])  # negative
    with pytest.raises(ConfigError):
        PenaltySpec.for_data("nope", [1.0], [3, 4])
    spec = PenaltySpec.for_data("smooth-group", [2.0, 1.0], [3, 5, 2])
    assert spec.df.tolist() == [2.0, 4.0, 1.0]
