"""Low-tubal-rank tensor completion by alternating a low-rank step and data consistency.

Each iteration computes ``Y = L(X)`` with one of the low-rank engines, then
puts the observed entries back: ``X <- mask * M + (1 - mask) * Y``.  Missing
entries start at zero and the working rank grows by ``rank_step`` per
iteration until it reaches the target (rank continuation); a fixed-rank run
is ``rank_step=None``.
"""
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .cross import acta, cur_approximation
from .errors import DimensionMismatch, MaskError
from .factorizations import tsvd_randomized, tsvd_truncated

ENGINES = ("acta_cur", "tsvd", "randomized")


@dataclass
class CompletionReport:
    final: np.ndarray
    iterations: int = 0
    psnr: List[Optional[float]] = field(default_factory=list)
    observed_residual: List[float] = field(default_factory=list)
    consistency: List[float] = field(default_factory=list)
    change: List[float] = field(default_factory=list)
    ranks: List[int] = field(default_factory=list)


def validate_mask(mask, shape):
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != tuple(shape):
        raise DimensionMismatch(f"mask shape {mask.shape} does not match tensor {tuple(shape)}")
    if not mask.any():
        raise MaskError("mask has no observed entries")
    return mask


def random_mask(shape, missing_fraction, seed=0):
    """Boolean mask with each entry missing independently with probability ``missing_fraction``."""
    if not 0.0 <= missing_fraction < 1.0:
        raise ValueError("missing_fraction must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    return rng.random(shape) >= missing_fraction


def pixel_mask(shape, missing_fraction, seed=0):
    """Mask that removes whole pixels: one draw per ``(i1, i2)``, shared by every channel."""
    if len(shape) != 3:
        raise DimensionMismatch(f"expected an image tensor shape (H, W, C), got {shape}")
    keep = random_mask(tuple(shape[:2]), missing_fraction, seed)
    return np.ascontiguousarray(np.broadcast_to(keep[:, :, None], tuple(shape)))


def project(x, mask):
    """Keep observed entries, zero the rest."""
    x = np.asarray(x, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != x.shape:
        raise DimensionMismatch(f"mask shape {mask.shape} does not match tensor {x.shape}")
    return np.where(mask, x, 0.0)


def psnr(x, xref):
    """Peak signal-to-noise ratio in dB on the 0..255 scale; ``inf`` for identical inputs."""
    x = np.asarray(x, dtype=np.float64)
    xref = np.asarray(xref, dtype=np.float64)
    if x.shape != xref.shape:
        raise DimensionMismatch(f"shape mismatch {x.shape} vs {xref.shape}")
    mse = np.sum((x - xref) ** 2) / x.size
    if mse == 0.0:
        return float("inf")
    return float(10.0 * np.log10(255.0 ** 2 / mse))


def relative_error(x, xhat):
    x = np.asarray(x, dtype=np.float64)
    xhat = np.asarray(xhat, dtype=np.float64)
    if x.shape != xhat.shape:
        raise DimensionMismatch(f"shape mismatch {x.shape} vs {xhat.shape}")
    ref = np.linalg.norm(x)
    if ref == 0.0:
        raise ValueError("reference tensor has zero norm")
    return float(np.linalg.norm(x - xhat) / ref)


def low_rank_step(x, engine, rank, seed=0, eps=0.0, oversample=10, power_iters=1):
    """Apply one of the low-rank engines to ``x``."""
    if engine == "tsvd":
        return tsvd_truncated(x, rank).reconstruct()
    if engine == "randomized":
        extra = min(oversample, min(x.shape[:2]) - rank)
        return tsvd_randomized(x, rank, extra, power_iters, seed).reconstruct()
    if engine == "acta_cur":
        cf = acta(x, eps=eps, max_rank=rank, seed=seed)
        if cf.rank == 0:
            return np.zeros_like(x)
        return cur_approximation(x, cf.row_indices, cf.col_indices)
    raise ValueError(f"unknown engine {engine!r}; choose from {ENGINES}")


def rank_schedule(n, rank, rank_step):
    """Working rank at (0-based) iteration ``n``."""
    if rank_step is None:
        return rank
    return min(rank, rank_step * (n + 1))


def complete(observed, mask, engine="tsvd", rank=None, iters=100, tol=1e-4, rank_step=1,
             seed=0, eps=0.0, reference=None, oversample=10, power_iters=1, callback=None):
    """Fill the unobserved entries of ``observed`` with a low-tubal-rank estimate.

    Parameters
    ----------
    observed : array (I1, I2, I3)
        Data tensor; only entries where ``mask`` is true are used.
    mask : bool array
        ``True`` marks observed entries; at least one is required.
    engine : {"acta_cur", "tsvd", "randomized"}
        Low-rank operator.  ``acta_cur`` selects slices with a fixed-budget
        ACTA run (``rank`` iterations, ``eps`` 0 by default) on the current
        iterate and forms the tubal CUR approximation from them.
    rank : int
        Target tubal rank.
    iters : int
        Maximum number of iterations.
    tol : float
        Early exit once ``||X_new - X|| / ||X|| < tol`` and the working rank
        has reached ``rank``.
    rank_step : int or None
        Rank increment per iteration; ``None`` uses ``rank`` from the start.
    reference : array, optional
        Ground truth for the per-iteration PSNR history.
    """
    observed = np.asarray(observed, dtype=np.float64)
    mask = validate_mask(mask, observed.shape)
    if iters < 1:
        raise ValueError("iters must be at least 1")
    if rank is None:
        rank = min(observed.shape[:2])
    known = np.where(mask, observed, 0.0)
    known_norm = np.linalg.norm(known) or 1.0
    x = known.copy()
    report = CompletionReport(final=x)
    for n in range(iters):
        r = rank_schedule(n, rank, rank_step)
        report.ranks.append(r)
        y = low_rank_step(x, engine, r, seed=seed + n, eps=eps,
                          oversample=oversample, power_iters=power_iters)
        x_new = np.where(mask, observed, y)
        report.observed_residual.append(float(np.linalg.norm(np.where(mask, y - observed, 0.0)) / known_norm))
        report.consistency.append(float(np.abs(x_new[mask] - observed[mask]).max()))
        denom = np.linalg.norm(x) or 1.0
        report.change.append(float(np.linalg.norm(x_new - x) / denom))
        report.psnr.append(psnr(x_new, reference) if reference is not None else None)
        x = x_new
        report.iterations = n + 1
        if callback is not None:
            callback(n, x, report)
        if report.change[-1] < tol and (r == rank or report.change[-1] == 0.0):
            break
    report.final = x
    return report
