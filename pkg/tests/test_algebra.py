import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import circulant_tprod, fourier_slices, loop_tube_conv
from strategies import seeds, tensors, tprod_pairs
from tubalcross.algebra import (bcirc, fold, has_orthonormal_lateral_slices, identity_tensor,
                                identity_tube, is_f_diagonal, is_orthogonal, tinv, tpinv,
                                tprod, tprod_chain, tprod_circulant, ttranspose,
                                tube_inverse, tube_product, unfold)
from tubalcross.errors import DimensionMismatch, NearSingularTube, SingularSlice


def rel(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


def test_identity_laws(rng):
    x = rng.standard_normal((3, 4, 5))
    assert rel(tprod(identity_tensor(3, 5), x), x) <= 1e-12
    assert rel(tprod(x, identity_tensor(4, 5)), x) <= 1e-12


def test_tube_convolution_by_hand():
    a = np.array([1.0, 2.0]).reshape(1, 1, 2)
    b = np.array([3.0, 4.0]).reshape(1, 1, 2)
    np.testing.assert_allclose(tprod(a, b).ravel(), [11.0, 10.0], atol=1e-14)
    np.testing.assert_allclose(tube_product([1, 2], [3, 4]), [11.0, 10.0], atol=1e-14)


def test_matches_circulant_oracle(rng):
    x, y = rng.standard_normal((3, 4, 5)), rng.standard_normal((4, 2, 5))
    assert rel(tprod(x, y), circulant_tprod(x, y)) <= 1e-10
    assert rel(tprod_circulant(x, y), circulant_tprod(x, y)) <= 1e-12


@given(tprod_pairs())
def test_tprod_equivalence_property(pair):
    x, y = pair
    ref = circulant_tprod(x, y)
    assert np.linalg.norm(tprod(x, y) - ref) <= 1e-10 * max(np.linalg.norm(ref), 1e-300)


@given(seeds, st.integers(1, 4), st.integers(1, 4), st.integers(1, 4), st.integers(1, 4), st.integers(1, 5))
def test_associativity(seed, a, b, c, d, n3):
    rng = np.random.default_rng(seed)
    x, y, z = (rng.standard_normal(s) for s in ((a, b, n3), (b, c, n3), (c, d, n3)))
    lhs = tprod(tprod(x, y), z)
    assert rel(lhs, tprod(x, tprod(y, z))) <= 1e-10
    assert rel(tprod_chain(x, y, z), lhs) <= 1e-12


def test_tprod_dimension_mismatch(rng):
    with pytest.raises(DimensionMismatch):
        tprod(rng.standard_normal((2, 3, 4)), rng.standard_normal((2, 3, 4)))
    with pytest.raises(DimensionMismatch):
        tprod(rng.standard_normal((2, 3, 4)), rng.standard_normal((3, 3, 5)))


def test_unfold_fold_bcirc(rng):
    x = rng.standard_normal((2, 3, 4))
    np.testing.assert_array_equal(fold(unfold(x), x.shape), x)
    c = bcirc(x)
    assert c.shape == (8, 12)
    np.testing.assert_array_equal(c[2:4, 0:3], x[:, :, 1])
    np.testing.assert_array_equal(c[0:2, 3:6], x[:, :, 3])


def test_transpose():
    m = np.arange(6.0).reshape(2, 3, 1)
    np.testing.assert_array_equal(ttranspose(m)[:, :, 0], m[:, :, 0].T)
    x = np.arange(24.0).reshape(2, 3, 4)
    xt = ttranspose(x)
    np.testing.assert_array_equal(xt[:, :, 0], x[:, :, 0].T)
    np.testing.assert_array_equal(xt[:, :, 1], x[:, :, 3].T)
    np.testing.assert_array_equal(xt[:, :, 3], x[:, :, 1].T)


@given(tprod_pairs())
def test_transpose_anti_homomorphism(pair):
    x, y = pair
    np.testing.assert_array_equal(ttranspose(ttranspose(x)), x)
    lhs = ttranspose(tprod(x, y))
    assert np.linalg.norm(lhs - tprod(ttranspose(y), ttranspose(x))) <= 1e-10 * max(np.linalg.norm(lhs), 1e-300)


def test_tube_inverse_examples(rng):
    e = identity_tube(5)
    np.testing.assert_allclose(tube_inverse(e), e, atol=1e-15)
    np.testing.assert_allclose(tube_inverse([2.0, 0, 0, 0]), [0.5, 0, 0, 0], atol=1e-15)
    t = rng.standard_normal(6)
    t[0] += 10.0  # dominant DC keeps every DFT coefficient away from zero
    np.testing.assert_allclose(loop_tube_conv(t, tube_inverse(t)), e.tolist() + [0.0], atol=1e-10)


@given(seeds, st.integers(1, 9))
def test_tube_inverse_involution(seed, n):
    t = np.random.default_rng(seed).standard_normal(n)
    mod = np.abs(np.fft.fft(t))
    if mod.min() <= 1e-6 * mod.max():
        with pytest.raises(NearSingularTube):
            tube_inverse(t, tol=1e-6)
        return
    np.testing.assert_allclose(tube_inverse(tube_inverse(t)), t, atol=1e-10 * max(1.0, np.abs(t).max()))


def test_tube_inverse_singular():
    with pytest.raises(NearSingularTube) as exc:
        tube_inverse([1.0, 1.0])  # DFT (2, 0)
    assert exc.value.min_modulus == 0.0
    with pytest.raises(NearSingularTube):
        tube_inverse([0.0, 0.0, 0.0])


def test_tinv_examples(rng):
    e = identity_tensor(4, 3)
    np.testing.assert_allclose(tinv(e), e, atol=1e-14)
    np.testing.assert_allclose(tinv(2 * e), 0.5 * e, atol=1e-14)
    x = rng.standard_normal((4, 4, 3)) + 4 * e
    assert np.abs(tprod(x, tinv(x)) - e).max() <= 1e-8
    with pytest.raises(SingularSlice):
        tinv(np.ones((3, 3, 2)))
    with pytest.raises(DimensionMismatch):
        tinv(np.ones((3, 2, 2)))


def test_tpinv_identity():
    e = identity_tensor(3, 4)
    np.testing.assert_allclose(tpinv(e), e, atol=1e-14)


def test_tpinv_of_orthogonal_real_tensor(rng):
    from tubalcross.factorizations import tsvd_full
    u = tsvd_full(rng.standard_normal((4, 4, 5))).U
    assert is_orthogonal(u)
    assert rel(tpinv(u), ttranspose(u)) <= 1e-10


@given(seeds, st.integers(2, 6), st.integers(2, 6), st.integers(1, 5), st.integers(1, 3))
def test_penrose_conditions(seed, i1, i2, n3, r):
    rng = np.random.default_rng(seed)
    r = min(r, i1, i2)
    x = circulant_tprod(rng.standard_normal((i1, r, n3)), rng.standard_normal((r, i2, n3)))
    xp = tpinv(x)
    assert xp.shape == (i2, i1, n3)
    nx = np.linalg.norm(x)
    assert np.linalg.norm(tprod(tprod(x, xp), x) - x) <= 1e-8 * nx
    assert np.linalg.norm(tprod(tprod(xp, x), xp) - xp) <= 1e-8 * max(np.linalg.norm(xp), 1e-300)
    # the two projections are symmetric under the tensor transpose
    p = tprod(x, xp)
    assert np.linalg.norm(p - ttranspose(p)) <= 1e-8 * max(np.linalg.norm(p), 1)


def test_predicates(rng):
    e = identity_tensor(3, 4)
    assert is_orthogonal(e) and is_f_diagonal(e)
    ones = np.ones((2, 2, 2))
    assert not is_orthogonal(ones) and not is_f_diagonal(ones)
    assert has_orthonormal_lateral_slices(e)


def test_real_output_residue(rng):
    x, y = rng.standard_normal((3, 3, 6)), rng.standard_normal((3, 2, 6))
    prod_hat = np.einsum("fij,fjk->fik", fourier_slices(x), fourier_slices(y))
    full = np.fft.ifft(np.moveaxis(prod_hat, 0, -1), axis=-1)
    assert np.abs(full.imag).max() <= 1e-10 * np.linalg.norm(full.real)
    assert rel(tprod(x, y), full.real) <= 1e-12
