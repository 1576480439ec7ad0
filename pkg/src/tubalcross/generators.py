"""Test tensors: seeded exact-tubal-rank tensors and closed-form function tensors."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .fourier import irfft_mode3, self_conjugate_bins, half_length


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str  # "synthetic" | "case1" | "case2" | "case3"
    n: int
    rank: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("synthetic", "case1", "case2", "case3"):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.kind == "synthetic" and not (self.rank and 1 <= self.rank <= self.n):
            raise ValueError(f"synthetic generator needs 1 <= rank <= n, got {self.rank}")

    def materialize(self):
        if self.kind == "synthetic":
            return synthetic_exact_rank(self.n, self.rank, self.seed)
        return function_tensor(int(self.kind[-1]), self.n).materialize()

    def oracle(self):
        from .cross import ArrayOracle
        if self.kind == "synthetic":
            return ArrayOracle(self.materialize())
        return function_tensor(int(self.kind[-1]), self.n)


def _orthonormal_factor_hat(rng, n, rank, n3):
    """Half spectrum of a tensor with orthonormal lateral slices (per-slice QR)."""
    g = rng.standard_normal((n, rank, n3))
    gh = np.moveaxis(np.fft.rfft(g, axis=-1), -1, 0)
    q = np.linalg.qr(gh)[0]
    for b in self_conjugate_bins(n3):
        q[b] = np.linalg.qr(gh[b].real)[0]
    return q  # (F, n, rank)


def synthetic_exact_rank(n, rank, seed=0, n3=None):
    """``X = U * S * V^T`` with orthogonal ``U, V`` and ``rank`` Gaussian diagonal tubes.

    Deterministic for a given ``seed`` (numpy PCG64 stream).
    """
    if not 1 <= rank <= n:
        raise ValueError(f"need 1 <= rank <= n, got rank={rank}, n={n}")
    n3 = n if n3 is None else n3
    rng = np.random.default_rng(seed)
    uh = _orthonormal_factor_hat(rng, n, rank, n3)
    vh = _orthonormal_factor_hat(rng, n, rank, n3)
    sh = np.fft.rfft(rng.standard_normal((rank, n3)), axis=-1).T  # (F, rank)
    xh = (uh * sh[:, None, :]) @ np.conj(np.swapaxes(vh, 1, 2))
    assert xh.shape[0] == half_length(n3)
    return irfft_mode3(np.moveaxis(xh, 0, -1), n3)


class FunctionTensor:
    """Lazy ``n x n x n`` tensor defined entrywise by a closed-form function.

    Entries use 1-based indices ``1 <= i, j, k <= n``.  Any lateral or
    horizontal slice is evaluated on demand without building the cube.
    """

    def __init__(self, case, n):
        if case not in (1, 2, 3):
            raise ValueError(f"unknown function case {case}")
        if n < 1:
            raise ValueError("n must be positive")
        self.case = case
        self.n = n
        self.shape = (n, n, n)

    def entries(self, i, j, k):
        i, j, k = (np.asarray(a, dtype=np.float64) for a in (i, j, k))
        if self.case == 1:
            return 1.0 / np.sqrt(i ** 2 + j ** 2 + k ** 2)
        if self.case == 2:
            s = i + j + k
            return np.sin(s) + np.tanh(s)
        return 1.0 / (i ** 5 + j ** 5 + k ** 5) ** 0.2

    def _axis(self):
        return np.arange(1, self.n + 1, dtype=np.float64)

    def lateral_slice(self, j):
        a = self._axis()
        return self.entries(a[:, None], float(j + 1), a[None, :])

    def horizontal_slice(self, i):
        a = self._axis()
        return self.entries(float(i + 1), a[:, None], a[None, :])

    def materialize(self):
        a = self._axis()
        return np.ascontiguousarray(self.entries(a[:, None, None], a[None, :, None], a[None, None, :]))


def function_tensor(case, n):
    return FunctionTensor(case, n)


def desk_image(height=128, width=128, seed=0):
    """Deterministic synthetic RGB test image on the 0..255 scale.

    Smooth shading with a few filled blobs on top.  Much smoother than a
    photograph, so completion PSNRs on it run high.
    """
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:height, 0:width] / np.array([height, width]).reshape(2, 1, 1)
    img = np.empty((height, width, 3))
    img[..., 0] = 150 + 70 * np.sin(2.1 * np.pi * x) * np.cos(1.3 * np.pi * y)
    img[..., 1] = 110 + 80 * x * y + 30 * np.cos(3.0 * np.pi * (x + 0.3 * y))
    img[..., 2] = 90 + 90 * (1 - y) ** 2 + 20 * np.sin(5.0 * np.pi * x * y)
    for _ in range(6):
        cy, cx = rng.uniform(0.15, 0.85, size=2)
        rad = rng.uniform(0.06, 0.18)
        colour = rng.uniform(20, 235, size=3)
        blob = np.exp(-(((x - cx) ** 2 + (y - cy) ** 2) / rad ** 2) ** 3)
        img = img * (1 - blob[..., None]) + colour * blob[..., None]
    img += rng.normal(0.0, 2.0, size=img.shape)
    return np.clip(np.round(img), 0, 255)
