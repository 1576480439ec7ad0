"""Adaptive cross approximation for matrices and, via the t-product, for tensors.

``acta`` builds ``X ~ U * V`` one tubal rank-1 term at a time.  Each step
fetches one lateral and one horizontal slice from a *slice oracle* and
removes the current approximation from them; the pivot tube's inverse
provides the scaling.  All factor arithmetic happens on
the half spectrum of the mode-3 FFT, so an iteration costs
``O((I1 + I2) * k * I3)`` plus two slice FFTs.
"""
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .algebra import tprod, tpinv, tube_inverse
from .errors import Breakdown, DimensionMismatch
from .fourier import (from_slices, half_length, irfft_mode3, rfft_mode3,
                      spectrum_weights, to_slices)
from .tensor import as_tensor3

PIVOT_TOL = 1e-12
EXHAUSTED_TOL = 1e-12


def _active_frequencies(residual, fetched):
    """Frequencies where a residual slice still carries signal.

    A frequency whose largest residual coefficient is at or below
    ``EXHAUSTED_TOL`` times the largest coefficient of the fetched slice is
    round-off: that Fourier frontal slice has no rank left to remove.
    """
    ref = np.abs(fetched).max()
    if ref == 0.0:
        return np.zeros(residual.shape[-1], dtype=bool)
    return np.abs(residual).max(axis=0) > EXHAUSTED_TOL * ref


# --- slice oracles ----------------------------------------------------------

class ArrayOracle:
    """Serve slices of an in-memory (or memory-mapped) tensor."""

    def __init__(self, x):
        if np.ndim(x) != 3:
            raise DimensionMismatch(f"expected a third-order tensor, got shape {np.shape(x)}")
        self._x = x
        self.shape = tuple(int(d) for d in x.shape)

    def lateral_slice(self, j):
        return np.array(self._x[:, j, :], dtype=np.float64)

    def horizontal_slice(self, i):
        return np.array(self._x[i, :, :], dtype=np.float64)


class RecordingOracle:
    """Wrap another oracle and log every slice request."""

    def __init__(self, inner):
        self.inner = inner
        self.shape = tuple(inner.shape)
        self.requests = []

    def lateral_slice(self, j):
        self.requests.append(("lateral", int(j)))
        return self.inner.lateral_slice(j)

    def horizontal_slice(self, i):
        self.requests.append(("horizontal", int(i)))
        return self.inner.horizontal_slice(i)

    def count(self, kind):
        return sum(1 for k, _ in self.requests if k == kind)


def as_oracle(x):
    if hasattr(x, "lateral_slice") and hasattr(x, "horizontal_slice"):
        return x
    return ArrayOracle(as_tensor3(x))


# --- result types -----------------------------------------------------------

@dataclass
class CrossStep:
    rho: float
    mu: float
    row: int
    col: int
    accepted: bool


@dataclass
class CrossFactors:
    U: np.ndarray  # I1 x r x I3, normalized lateral slices
    V: np.ndarray  # r x I2 x I3, residual horizontal slices
    row_indices: List[int]
    col_indices: List[int]
    history: List[CrossStep] = field(default_factory=list)
    stop_reason: str = ""

    @property
    def rank(self):
        return len(self.row_indices)

    def reconstruct(self):
        if self.rank == 0:
            return np.zeros((self.U.shape[0], self.V.shape[1], self.U.shape[2]))
        return tprod(self.U, self.V)


@dataclass
class AcaFactors:
    U: np.ndarray  # I1 x r
    V: np.ndarray  # r x I2
    row_indices: List[int]
    col_indices: List[int]
    history: List[CrossStep] = field(default_factory=list)
    stop_reason: str = ""

    @property
    def rank(self):
        return len(self.row_indices)

    def reconstruct(self):
        return self.U @ self.V


# --- matrix ACA -------------------------------------------------------------

def _ranked_candidates(scores, used):
    """Unused indices by decreasing score; ties resolved toward the lower index."""
    scores = np.where(used, -np.inf, scores)
    order = np.argsort(-scores, kind="stable")
    return [int(i) for i in order if not used[i]]


def _pick_pivot(candidates, admissible, rng):
    """Best candidate, then the runner-up, then the rest in random order."""
    head, tail = candidates[:2], candidates[2:]
    if tail:
        tail = [tail[t] for t in rng.permutation(len(tail))]
    for i in head + tail:
        if admissible(i):
            return i
    return None


def aca_matrix(x, eps, max_rank=None, seed=0, j_start=None):
    """Adaptive cross approximation ``X ~ U V`` of a matrix.

    Stops when the newest rank-1 term satisfies ``rho < eps * mu``; that term is
    then discarded, so ``rank`` counts only the terms that were kept.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionMismatch("aca_matrix expects a matrix")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    i1, i2 = x.shape
    max_rank = min(i1, i2) if max_rank is None else min(max_rank, i1, i2)
    rng = np.random.default_rng(seed)
    j = int(rng.integers(i2)) if j_start is None else int(j_start)

    us, vs, rows, cols, history = [], [], [], [], []
    used_r = np.zeros(i1, dtype=bool)
    used_c = np.zeros(i2, dtype=bool)
    mu2 = 0.0
    reason = "max_rank"

    def partial():
        return AcaFactors(np.array(us).T.reshape(i1, len(us)), np.array(vs).reshape(len(vs), i2),
                          list(rows), list(cols), history, reason)

    while len(us) < max_rank:
        u = x[:, j] - sum((uu * vv[j] for uu, vv in zip(us, vs)), np.zeros(i1))
        if not _active_frequencies(u[:, None], x[:, j:j + 1])[0]:
            reason = "zero_residual"
            break
        cands = _ranked_candidates(u * u, used_r)
        i = _pick_pivot(cands, lambda c: u[c] != 0.0, rng)
        if i is None:
            reason = "breakdown"
            raise Breakdown("no admissible pivot among unused rows", partial())
        u = u / u[i]
        v = x[i, :] - sum((uu[i] * vv for uu, vv in zip(us, vs)), np.zeros(i2))
        rho2 = float(u @ u) * float(v @ v)
        cross = sum(float(vv @ v) * float(u @ uu) for uu, vv in zip(us, vs))
        mu2 = max(mu2 + rho2 + 2.0 * cross, 0.0)
        rho, mu = np.sqrt(rho2), np.sqrt(mu2)
        if rho == 0.0 or rho < eps * mu:
            history.append(CrossStep(rho, mu, i, j, False))
            reason = "converged"
            break
        history.append(CrossStep(rho, mu, i, j, True))
        us.append(u)
        vs.append(v)
        rows.append(i)
        cols.append(j)
        used_r[i] = used_c[j] = True
        if len(us) >= max_rank:
            break
        free = _ranked_candidates(v * v, used_c)
        if not free:
            reason = "exhausted"
            break
        j = free[0]
    return partial()


# --- tubal deflation --------------------------------------------------------

def deflate_tubal(x, i, j, tol=PIVOT_TOL):
    """Remove the tubal rank-1 cross term through pivot tube ``X(i, j, :)``.

    Returns ``(Y, u, v)`` where ``u = X(:, j, :) * X(i, j, :)^-1`` (``I1 x 1 x I3``),
    ``v = X(i, :, :)`` (``1 x I2 x I3``) and ``Y = X - u * v``.
    """
    x = as_tensor3(x)
    inv = tube_inverse(x[i, j, :], tol)
    u = tprod(x[:, j:j + 1, :], inv.reshape(1, 1, -1))
    v = x[i:i + 1, :, :].copy()
    return x - tprod(u, v), u, v


# --- ACTA -------------------------------------------------------------------

class _Buffer:
    """Growable complex array along one axis."""

    def __init__(self, shape, axis):
        self.axis = axis
        self.n = 0
        self.data = np.zeros(shape, dtype=np.complex128)

    def append(self, item):
        cap = self.data.shape[self.axis]
        if self.n == cap:
            extra = list(self.data.shape)
            extra[self.axis] = max(cap, 4)
            self.data = np.concatenate([self.data, np.zeros(extra, dtype=np.complex128)], axis=self.axis)
        idx = [slice(None)] * self.data.ndim
        idx[self.axis] = self.n
        self.data[tuple(idx)] = item
        self.n += 1

    def view(self):
        idx = [slice(None)] * self.data.ndim
        idx[self.axis] = slice(0, self.n)
        return self.data[tuple(idx)]


def acta(x_access, eps=1e-8, max_rank=None, seed=0, j_start=None, tol=PIVOT_TOL):
    """Adaptive cross tubal approximation ``X ~ U * V``.

    Parameters
    ----------
    x_access : slice oracle or array
        Anything with ``shape``, ``lateral_slice(j)`` (``I1 x I3``) and
        ``horizontal_slice(i)`` (``I2 x I3``).  Arrays are wrapped in
        :class:`ArrayOracle`.  Only those two requests are ever made.
    eps : float
        Relative accuracy; iteration stops once ``rho < eps * mu`` where
        ``rho = ||u_k * v_k||_F`` and ``mu = ||U * V||_F``.  The term that
        triggers the stop is dropped.  ``eps = 0`` runs to ``max_rank``.
    max_rank : int, optional
        Iteration budget, default ``min(I1, I2)``.
    seed : int
        Seeds the choice of the first lateral slice and random pivot fallbacks.
    tol : float
        A pivot tube is admissible when its smallest DFT modulus exceeds
        ``tol`` times its largest.

    Returns
    -------
    CrossFactors
        ``rank`` is the tubal-rank estimate.

    Raises
    ------
    Breakdown
        No unused row yields an admissible pivot tube; ``exc.partial`` holds
        the factors built so far.
    """
    oracle = as_oracle(x_access)
    i1, i2, n3 = (int(d) for d in oracle.shape)
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    max_rank = min(i1, i2) if max_rank is None else min(int(max_rank), i1, i2)
    rng = np.random.default_rng(seed)
    j = int(rng.integers(i2)) if j_start is None else int(j_start)

    f = half_length(n3)
    w = spectrum_weights(n3)
    # frequency-major buffers so the residual updates are batched BLAS calls
    U = _Buffer((f, i1, min(max_rank, 64)), axis=2)
    V = _Buffer((f, min(max_rank, 64), i2), axis=1)
    rows, cols, history = [], [], []
    used_r = np.zeros(i1, dtype=bool)
    used_c = np.zeros(i2, dtype=bool)
    mu2 = 0.0
    reason = "max_rank"

    def result():
        n = len(rows)
        Ut = irfft_mode3(np.ascontiguousarray(np.moveaxis(U.view(), 0, -1)), n3) if n else np.zeros((i1, 0, n3))
        Vt = irfft_mode3(np.ascontiguousarray(np.moveaxis(V.view(), 0, -1)), n3) if n else np.zeros((0, i2, n3))
        return CrossFactors(Ut, Vt, list(rows), list(cols), history, reason)

    while len(rows) < max_rank:
        Uh, Vh = U.view(), V.view()
        k = Uh.shape[2]
        c = np.fft.rfft(np.asarray(oracle.lateral_slice(j), dtype=np.float64), axis=-1)
        u = c - (Uh @ Vh[:, :, j:j + 1])[:, :, 0].T if k else c
        active = _active_frequencies(u, c)
        if not active.any():
            reason = "zero_residual"
            break
        tube_norm2 = (np.abs(u) ** 2) @ w

        def admissible(r):
            mod = np.abs(u[r, active])
            return mod.max() > 0.0 and mod.min() > tol * mod.max()

        i = _pick_pivot(_ranked_candidates(tube_norm2, used_r), admissible, rng)
        if i is None:
            reason = "breakdown"
            raise Breakdown(f"no admissible pivot tube in lateral slice {j}", result())
        # pseudoinverse of the pivot tube: exhausted frequencies are left alone
        scale = np.zeros(f, dtype=np.complex128)
        scale[active] = 1.0 / u[i, active]
        u = u * scale

        v = np.fft.rfft(np.asarray(oracle.horizontal_slice(i), dtype=np.float64), axis=-1)
        if k:
            v -= (Uh[:, i:i + 1, :] @ Vh)[:, 0, :].T

        un2 = (np.abs(u) ** 2).sum(axis=0)
        vn2 = (np.abs(v) ** 2).sum(axis=0)
        rho2 = float((un2 * vn2) @ w) / n3
        cross = 0.0
        if k:
            # Re<U*V, u*v> summed over frequencies; conjugating the small side avoids copying U, V
            gu = (np.conj(u.T)[:, None, :] @ Uh)[:, 0, :]
            gv = (Vh @ np.conj(v.T)[:, :, None])[:, :, 0]
            cross = float((gu * gv).real.sum(axis=1) @ w) / n3
        mu2 = max(mu2 + rho2 + 2.0 * cross, 0.0)
        rho, mu = np.sqrt(rho2), np.sqrt(mu2)
        if rho == 0.0 or rho < eps * mu:
            history.append(CrossStep(rho, mu, i, j, False))
            reason = "converged"
            break
        history.append(CrossStep(rho, mu, i, j, True))
        U.append(u.T)
        V.append(v.T)
        rows.append(i)
        cols.append(j)
        used_r[i] = used_c[j] = True
        if len(rows) >= max_rank:
            break
        free = _ranked_candidates((np.abs(v) ** 2) @ w, used_c)
        if not free or used_r.all():
            reason = "exhausted"
            break
        j = free[0]
    return result()


# --- CUR --------------------------------------------------------------------

def cur_from_indices(x, row_indices, col_indices):
    """Tubal CUR: ``C = X(:, cols, :)``, ``R = X(rows, :, :)``, ``Ucore = C^+ * X * R^+``."""
    x = as_tensor3(x, check_finite=False)
    rows, cols = list(row_indices), list(col_indices)
    if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
        raise ValueError("index lists must be free of duplicates")
    C = np.ascontiguousarray(x[:, cols, :])
    R = np.ascontiguousarray(x[rows, :, :])
    core = tprod(tprod(tpinv(C), x), tpinv(R))
    return C, core, R


def cur_approximation(x, row_indices, col_indices):
    """``C * (C^+ * X * R^+) * R``, computed slice-wise in the Fourier domain."""
    x = as_tensor3(x, check_finite=False)
    rows, cols = list(row_indices), list(col_indices)
    n3 = x.shape[2]
    xs = to_slices(rfft_mode3(x))
    cs = xs[:, :, cols]
    rs = xs[:, rows, :]
    # C C^+ X R^+ R: project onto the column space of C and row space of R
    pc = cs @ np.linalg.pinv(cs, rcond=max(cs.shape[1:]) * np.finfo(float).eps)
    pr = np.linalg.pinv(rs, rcond=max(rs.shape[1:]) * np.finfo(float).eps) @ rs
    return irfft_mode3(from_slices(pc @ xs @ pr), n3)
