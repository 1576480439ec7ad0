"""Mode-3 (tube-wise) discrete Fourier transforms.

Convention: unnormalized forward transform, ``1/I3`` on the inverse, so that
``||fft_mode3(x)||_F**2 == I3 * ||x||_F**2``.

For real input only the first ``ceil((I3+1)/2) == I3//2 + 1`` frontal slices of
the transform carry information; the rest are complex conjugates.  Most of the
package therefore works on that half spectrum (``rfft_mode3``) and uses
:func:`spectrum_weights` to turn half-spectrum sums into full-spectrum ones.
"""
from dataclasses import dataclass

import numpy as np

from .errors import SymmetryViolation

SYMMETRY_TOL = 1e-12
RESIDUE_TRIPWIRE = 1e-6


@dataclass(frozen=True)
class FourierTensor3:
    """Complex mode-3 transform of a tensor, shape ``(I1, I2, I3)``."""

    data: np.ndarray
    origin_real: bool = True

    @property
    def shape(self):
        return self.data.shape

    def frontal(self, k):
        return self.data[:, :, k]


def half_length(n3):
    """Number of independent frontal slices of the transform of a real tensor."""
    return n3 // 2 + 1


def self_conjugate_bins(n3):
    """Indices of frequency bins that are real for real input (DC, Nyquist)."""
    return (0, n3 // 2) if n3 % 2 == 0 and n3 > 1 else (0,)


def spectrum_weights(n3):
    """Multiplicity of each half-spectrum bin in the full spectrum."""
    w = np.full(half_length(n3), 2.0)
    w[list(self_conjugate_bins(n3))] = 1.0
    return w


def fft_mode3(x):
    x = np.asarray(x)
    return FourierTensor3(np.fft.fft(x, axis=2), origin_real=not np.iscomplexobj(x))


def ifft_mode3(xhat, return_residue=False):
    """Inverse transform along tubes.

    If ``xhat`` came from real data the imaginary part is dropped; a residue
    above ``1e-6 * ||x||`` means the conjugate symmetry was broken upstream and
    raises :class:`SymmetryViolation`.
    """
    if isinstance(xhat, FourierTensor3):
        data, origin_real = xhat.data, xhat.origin_real
    else:
        data, origin_real = np.asarray(xhat), True
    x = np.fft.ifft(data, axis=2)
    if not origin_real:
        return (x, 0.0) if return_residue else x
    residue = float(np.linalg.norm(x.imag))
    scale = float(np.linalg.norm(x))
    if residue > RESIDUE_TRIPWIRE * scale:
        raise SymmetryViolation(
            f"imaginary residue {residue:.3e} exceeds {RESIDUE_TRIPWIRE:g} * ||x|| = {scale:.3e}")
    out = np.ascontiguousarray(x.real)
    return (out, residue) if return_residue else out


def fill_conjugate_symmetric(xhat, computed_up_to=None):
    """Fill slices ``computed_up_to .. I3-1`` from the conjugates of earlier ones.

    ``xhat`` may be a :class:`FourierTensor3` or a complex array whose first
    ``computed_up_to`` frontal slices (default ``I3//2 + 1``) are populated.
    """
    data = xhat.data if isinstance(xhat, FourierTensor3) else np.asarray(xhat)
    n3 = data.shape[2]
    if computed_up_to is None:
        computed_up_to = half_length(n3)
    out = np.array(data, dtype=np.complex128)
    for k in range(computed_up_to, n3):
        out[:, :, k] = np.conj(out[:, :, n3 - k])
    return FourierTensor3(out, origin_real=True)


def check_conjugate_symmetry(xhat, tol=SYMMETRY_TOL):
    """True when the transform satisfies the real-input symmetry within ``tol * ||xhat||``."""
    data = xhat.data if isinstance(xhat, FourierTensor3) else np.asarray(xhat)
    n3 = data.shape[2]
    bound = tol * max(np.linalg.norm(data), np.finfo(float).tiny)
    if np.linalg.norm(data[:, :, 0].imag) > bound:
        return False
    mirrored = np.conj(data[:, :, (-np.arange(n3)) % n3])
    return bool(np.linalg.norm(data - mirrored) <= bound)


def rfft_mode3(x):
    """Half-spectrum transform, shape ``(I1, I2, I3//2 + 1)``."""
    return np.fft.rfft(np.asarray(x, dtype=np.float64), axis=-1)


def irfft_mode3(xhat, n3):
    """Inverse of :func:`rfft_mode3`; conjugate fill is implicit."""
    return np.ascontiguousarray(np.fft.irfft(xhat, n=n3, axis=-1))


def to_slices(xhat):
    """``(I1, I2, F)`` -> contiguous ``(F, I1, I2)`` stack for batched matrix ops.

    A copy rather than a view: strided stacks miss the BLAS fast path in matmul.
    """
    return np.ascontiguousarray(np.moveaxis(xhat, -1, 0))


def from_slices(stack):
    return np.ascontiguousarray(np.moveaxis(stack, 0, -1))


def realify_bins(stack, n3):
    """Drop round-off imaginary parts of the self-conjugate bins of a slice stack."""
    for b in self_conjugate_bins(n3):
        stack[b] = stack[b].real
    return stack
