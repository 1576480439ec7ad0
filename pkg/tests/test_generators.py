import numpy as np
import pytest
from hypothesis import given, strategies as st

from strategies import seeds
from tubalcross.cross import acta
from tubalcross.factorizations import numerical_tubal_rank, tsvd_full
from tubalcross.generators import (FunctionTensor, GeneratorSpec, desk_image, function_tensor,
                                   synthetic_exact_rank)


def test_synthetic_rank_three():
    x = synthetic_exact_rank(20, 3, seed=0)
    assert x.shape == (20, 20, 20)
    assert numerical_tubal_rank(tsvd_full(x).S, 1e-8) == 3


def test_synthetic_full_rank():
    x = synthetic_exact_rank(8, 8, seed=1)
    assert numerical_tubal_rank(tsvd_full(x).S, 1e-8) == 8


def test_synthetic_deterministic():
    np.testing.assert_array_equal(synthetic_exact_rank(10, 2, seed=4), synthetic_exact_rank(10, 2, seed=4))
    assert not np.array_equal(synthetic_exact_rank(10, 2, seed=4), synthetic_exact_rank(10, 2, seed=5))


def test_synthetic_invalid_rank():
    with pytest.raises(ValueError):
        synthetic_exact_rank(5, 6)
    with pytest.raises(ValueError):
        GeneratorSpec("synthetic", 5)
    with pytest.raises(ValueError):
        GeneratorSpec("case4", 5)


def test_case1_corner_value():
    assert function_tensor(1, 4).materialize()[0, 0, 0] == pytest.approx(1 / np.sqrt(3))


def test_case_formulas_by_loop():
    n = 5
    for case, fn in ((1, lambda s: 1 / np.sqrt(s[0] ** 2 + s[1] ** 2 + s[2] ** 2)),
                     (2, lambda s: np.sin(sum(s)) + np.tanh(sum(s))),
                     (3, lambda s: 1 / (s[0] ** 5 + s[1] ** 5 + s[2] ** 5) ** 0.2)):
        x = function_tensor(case, n).materialize()
        for i, j, k in np.ndindex(n, n, n):
            assert x[i, j, k] == pytest.approx(fn((i + 1, j + 1, k + 1)), rel=1e-14)


@given(st.sampled_from([1, 2, 3]), st.integers(1, 9), st.data())
def test_lazy_slices_match_materialized(case, n, data):
    ft = FunctionTensor(case, n)
    x = ft.materialize()
    j = data.draw(st.integers(0, n - 1))
    np.testing.assert_array_equal(ft.lateral_slice(j), x[:, j, :])
    np.testing.assert_array_equal(ft.horizontal_slice(j), x[j, :, :])


@given(seeds)
def test_spec_round_trip(seed):
    spec = GeneratorSpec("synthetic", 6, 2, seed)
    np.testing.assert_array_equal(spec.materialize(), spec.materialize())
    o = spec.oracle()
    np.testing.assert_array_equal(o.lateral_slice(1), spec.materialize()[:, 1, :])


def test_case2_acta_rank_five():
    # stated value for the function tensor of the sin + tanh case
    assert acta(function_tensor(2, 100), eps=1e-8, seed=0).rank == 5


def test_case3_full_tsvd_rank():
    # stated value, counted with the tube-norm rule at tol 1e-8
    s = tsvd_full(function_tensor(3, 100).materialize()).S
    assert numerical_tubal_rank(s, 1e-8) == 43


def test_desk_image():
    img = desk_image()
    assert img.shape == (128, 128, 3) and img.min() >= 0 and img.max() <= 255
    np.testing.assert_array_equal(img, desk_image())
