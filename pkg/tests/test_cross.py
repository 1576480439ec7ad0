import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import circulant_tprod, random_exact_rank, slice_ranks
from strategies import seeds
from tubalcross.cross import (ArrayOracle, RecordingOracle, aca_matrix, acta, cur_approximation,
                              cur_from_indices, deflate_tubal)
from tubalcross.completion import relative_error
from tubalcross.errors import Breakdown, NearSingularTube
from tubalcross.generators import function_tensor, synthetic_exact_rank
from tubalcross.tensor import open_t3d, write_t3d


# --- matrix ACA ---

def test_aca_rank_one(rng):
    a, b = rng.standard_normal(7) + 3, rng.standard_normal(5) + 3
    x = np.outer(a, b)
    f = aca_matrix(x, 1e-10)
    assert f.rank == 1 and len(f.history) <= 2
    assert np.abs(f.reconstruct() - x).max() <= 1e-12 * np.abs(x).max()


def test_aca_zero_matrix():
    assert aca_matrix(np.zeros((4, 3)), 1e-8).rank == 0


def test_aca_random_rank_five(rng):
    x = rng.standard_normal((50, 5)) @ rng.standard_normal((5, 40))
    f = aca_matrix(x, 1e-10)
    assert f.rank == 5
    assert np.linalg.norm(f.reconstruct() - x) <= 1e-9 * np.linalg.norm(x)
    s = np.linalg.svd(x, compute_uv=False)
    assert np.sum(s > 1e-10 * s[0]) == 5


# --- deflation ---

def test_deflate_rank_one(rng):
    x = circulant_tprod(rng.standard_normal((5, 1, 4)), rng.standard_normal((1, 6, 4)))
    y, u, v = deflate_tubal(x, 2, 3)
    assert np.abs(y).max() <= 1e-10 * np.linalg.norm(x)
    assert u.shape == (5, 1, 4) and v.shape == (1, 6, 4)


def test_deflate_degenerate_tube_is_matrix_deflation(rng):
    m = rng.standard_normal((5, 4))
    y, _, _ = deflate_tubal(m[:, :, None], 1, 2)
    np.testing.assert_allclose(y[:, :, 0], m - np.outer(m[:, 2], m[1, :]) / m[1, 2], atol=1e-12)


def test_deflate_drops_every_slice_rank(rng):
    x = rng.standard_normal((6, 6, 4))
    y, _, _ = deflate_tubal(x, 0, 0)
    nx = np.linalg.norm(x)
    assert np.linalg.norm(y[:, 0, :]) <= 1e-10 * nx and np.linalg.norm(y[0, :, :]) <= 1e-10 * nx
    assert slice_ranks(y) == [r - 1 for r in slice_ranks(x)]


def test_deflate_singular_pivot():
    x = np.ones((2, 2, 2))  # every tube is (1, 1), DFT (2, 0)
    with pytest.raises(NearSingularTube):
        deflate_tubal(x, 0, 0)


# --- ACTA ---

def test_acta_exact_rank_desk_scale():
    x = synthetic_exact_rank(50, 5, seed=0)
    f = acta(x, eps=1e-8, seed=0)
    assert f.rank == 5
    assert relative_error(x, f.reconstruct()) <= 1e-8


def test_acta_rank_one(rng):
    x = circulant_tprod(rng.standard_normal((6, 1, 5)), rng.standard_normal((1, 7, 5)))
    f = acta(x, eps=1e-8)
    assert f.rank == 1
    assert relative_error(x, f.reconstruct()) <= 1e-12


def test_acta_case2_rank():
    f = acta(function_tensor(2, 100), eps=1e-8, seed=0)
    assert f.rank == 5


def test_acta_zero_tensor():
    f = acta(np.zeros((4, 4, 3)), eps=1e-8)
    assert f.rank == 0 and f.stop_reason == "zero_residual"
    assert not np.any(f.reconstruct())


@given(seeds, st.integers(2, 9), st.integers(2, 9), st.integers(1, 6), st.integers(1, 4))
def test_acta_invariants(seed, i1, i2, n3, r):
    rng = np.random.default_rng(seed)
    r = min(r, i1, i2)
    x = random_exact_rank(rng, i1, i2, n3, r)
    f = acta(x, eps=1e-10, seed=seed)
    assert len(set(f.row_indices)) == f.rank == len(set(f.col_indices))
    assert f.rank <= min(i1, i2)
    approx = f.reconstruct()
    nx = np.linalg.norm(x)
    # interpolation on the selected slices
    assert np.linalg.norm((approx - x)[:, f.col_indices, :]) <= 1e-8 * nx
    assert np.linalg.norm((approx - x)[f.row_indices, :, :]) <= 1e-8 * nx
    for h in f.history:
        assert np.isfinite(h.rho) and np.isfinite(h.mu) and h.rho >= 0 and h.mu >= 0
    assert len(f.history) <= min(i1, i2) + 1


@given(seeds, st.integers(2, 8), st.integers(1, 5))
def test_acta_deflation_chain(seed, n, n3):
    x = np.random.default_rng(seed).standard_normal((n, n + 1, n3))
    f = acta(x, eps=0.0, max_rank=n, seed=seed)
    assert np.linalg.norm(x - f.reconstruct()) <= 1e-8 * np.linalg.norm(x)


def test_acta_mu_tracks_approximation_norm(rng):
    x = rng.standard_normal((10, 9, 5))
    f = acta(x, eps=0.0, max_rank=6, seed=1)
    accepted = [h for h in f.history if h.accepted]
    assert accepted[-1].mu == pytest.approx(np.linalg.norm(f.reconstruct()), rel=1e-10)


def test_slice_access_audit():
    x = synthetic_exact_rank(30, 4, seed=2)
    rec = RecordingOracle(ArrayOracle(x))
    f = acta(rec, eps=1e-8, seed=0)
    kinds = {k for k, _ in rec.requests}
    assert kinds <= {"lateral", "horizontal"}
    # one extra lateral and horizontal fetch is the step that detects convergence
    assert rec.count("lateral") <= f.rank + 1
    assert rec.count("horizontal") <= f.rank + 1


def test_matrix_consistency(rng):
    m = rng.standard_normal((12, 9))
    for eps in (1e-1, 1e-3, 0.0):
        fm = aca_matrix(m, eps, seed=5)
        ft = acta(m[:, :, None], eps=eps, seed=5)
        assert fm.row_indices == ft.row_indices and fm.col_indices == ft.col_indices
        np.testing.assert_allclose(ft.U[:, :, 0], fm.U, atol=1e-12)
        np.testing.assert_allclose(ft.V[:, :, 0], fm.V, atol=1e-12)


def test_breakdown_reports_partial():
    # both rows of the only lateral slice vanish at one active frequency
    x = np.array([[[1.0, 1.0]], [[1.0, -1.0]]])
    with pytest.raises(Breakdown) as exc:
        acta(x, eps=1e-8, j_start=0)
    assert exc.value.partial.rank == 0


def test_acta_reads_memmapped_file(tmp_path):
    x = synthetic_exact_rank(12, 3, seed=0)
    p = tmp_path / "x.t3d"
    write_t3d(x, p)
    f = acta(ArrayOracle(open_t3d(p)), eps=1e-10, seed=0)
    assert f.rank == 3 and relative_error(x, f.reconstruct()) <= 1e-10


def test_acta_deterministic():
    x = synthetic_exact_rank(20, 4, seed=1)
    a, b = acta(x, seed=3), acta(x, seed=3)
    assert a.row_indices == b.row_indices and a.col_indices == b.col_indices


# --- CUR ---

def test_cur_full_index_sets(rng):
    x = rng.standard_normal((5, 5, 3))
    approx = cur_approximation(x, range(5), range(5))
    assert relative_error(x, approx) <= 1e-8
    c, core, r = cur_from_indices(x, range(5), range(5))
    assert c.shape == (5, 5, 3) and core.shape == (5, 5, 3) and r.shape == (5, 5, 3)


def test_cur_acta_indices_exact_rank():
    x = synthetic_exact_rank(30, 4, seed=6)
    f = acta(x, eps=1e-8, seed=0)
    assert relative_error(x, cur_approximation(x, f.row_indices, f.col_indices)) <= 1e-8


def test_cur_single_pair_rank_one(rng):
    x = circulant_tprod(rng.standard_normal((4, 1, 3)) + 1, rng.standard_normal((1, 5, 3)) + 1)
    assert relative_error(x, cur_approximation(x, [1], [2])) <= 1e-10


def test_cur_rejects_duplicates(rng):
    with pytest.raises(ValueError):
        cur_from_indices(rng.standard_normal((3, 3, 2)), [0, 0], [1, 2])
