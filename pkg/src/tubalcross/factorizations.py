"""Truncated and randomized t-SVD.

Both work on the half spectrum: each independent Fourier frontal slice is
factorized on its own, the DC (and, for even ``I3``, Nyquist) slices in real
arithmetic so the inverse transform stays exact.
"""
from dataclasses import dataclass

import numpy as np

from .algebra import tprod, ttranspose
from .errors import DimensionMismatch
from .fourier import from_slices, irfft_mode3, rfft_mode3, self_conjugate_bins, to_slices


@dataclass
class TsvdFactors:
    U: np.ndarray  # I1 x R x I3
    S: np.ndarray  # R x R x I3, f-diagonal
    V: np.ndarray  # I2 x R x I3
    R: int

    def reconstruct(self):
        return tprod(tprod(self.U, self.S), ttranspose(self.V))

    def diagonal_tube_norms(self):
        return diagonal_tube_norms(self.S)


def _check_rank(x, rank, extra=0):
    if x.ndim != 3:
        raise DimensionMismatch(f"expected a third-order tensor, got {x.shape}")
    limit = min(x.shape[0], x.shape[1])
    if not 1 <= rank or rank + extra > limit:
        raise ValueError(f"rank {rank} (+{extra} oversampling) must lie in [1, {limit}]")


def _assemble(us, ss, vhs, n3, rank):
    """Build time-domain factors from half-spectrum slice SVDs."""
    f = us.shape[0]
    s_hat = np.zeros((f, rank, rank), dtype=np.complex128)
    idx = np.arange(rank)
    s_hat[:, idx, idx] = ss
    v_hat = np.conj(np.swapaxes(vhs, 1, 2))
    U = irfft_mode3(from_slices(us), n3)
    S = irfft_mode3(from_slices(s_hat), n3)
    V = irfft_mode3(from_slices(v_hat), n3)
    return TsvdFactors(U, S, V, rank)


def _slice_svd(stack, n3):
    """Thin SVD of every slice; self-conjugate bins done in real arithmetic."""
    u, s, vh = np.linalg.svd(stack, full_matrices=False)
    for b in self_conjugate_bins(n3):
        ub, sb, vhb = np.linalg.svd(stack[b].real, full_matrices=False)
        u[b], s[b], vh[b] = ub, sb, vhb
    return u, s, vh


def tsvd_truncated(x, rank):
    """Rank-``rank`` truncated t-SVD ``X ~ U * S * V^T``."""
    x = np.asarray(x, dtype=np.float64)
    _check_rank(x, rank)
    n3 = x.shape[2]
    u, s, vh = _slice_svd(to_slices(rfft_mode3(x)), n3)
    return _assemble(u[:, :, :rank], s[:, :rank], vh[:, :rank, :], n3, rank)


def tsvd_full(x):
    x = np.asarray(x, dtype=np.float64)
    return tsvd_truncated(x, min(x.shape[0], x.shape[1]))


def _orthonormal_basis(y, real):
    q, _ = np.linalg.qr(y.real if real else y)
    return q


def tsvd_randomized(x, rank, oversample=10, power_iters=1, seed=0):
    """Randomized t-SVD with a per-slice Gaussian range finder.

    For each independent Fourier slice ``A``: sketch ``Y = A G`` with a
    Gaussian ``I2 x (rank + oversample)`` test matrix, refine with
    ``power_iters`` rounds of re-orthonormalized power iteration, then take the
    SVD of the small projected matrix ``Q^H A``.
    """
    x = np.asarray(x, dtype=np.float64)
    _check_rank(x, rank, oversample)
    n3 = x.shape[2]
    stack = to_slices(rfft_mode3(x))
    f, _, i2 = stack.shape
    ell = rank + oversample
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((f, i2, ell))

    real_bins = self_conjugate_bins(n3)
    q = np.linalg.qr(stack @ g)[0]
    for b in real_bins:
        q[b] = _orthonormal_basis(stack[b] @ g[b], True)
    stack_h = np.conj(np.swapaxes(stack, 1, 2))
    for _ in range(power_iters):
        z = np.linalg.qr(stack_h @ q)[0]
        for b in real_bins:
            z[b] = _orthonormal_basis(stack_h[b] @ q[b], True)
        q = np.linalg.qr(stack @ z)[0]
        for b in real_bins:
            q[b] = _orthonormal_basis(stack[b] @ z[b], True)

    small = np.conj(np.swapaxes(q, 1, 2)) @ stack
    ub, s, vh = _slice_svd(small, n3)
    u = q @ ub
    for b in real_bins:
        u[b] = u[b].real
    return _assemble(u[:, :, :rank], s[:, :rank], vh[:, :rank, :], n3, rank)


def diagonal_tube_norms(s):
    s = np.asarray(s)
    r = min(s.shape[0], s.shape[1])
    idx = np.arange(r)
    return np.linalg.norm(s[idx, idx, :], axis=1)


def numerical_tubal_rank(s, tol=1e-8):
    """Count diagonal tubes of ``S`` whose norm exceeds ``tol`` times the largest."""
    norms = diagonal_tube_norms(s)
    if norms.size == 0 or norms.max() == 0.0:
        return 0
    return int(np.count_nonzero(norms > tol * norms.max()))
