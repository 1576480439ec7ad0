"""The t-product algebra.

Products and (pseudo)inverses are computed slice by slice in the
Fourier domain over the half spectrum; conjugate symmetry supplies the rest.
:func:`tprod_circulant` is the slow block-circulant definition and serves as
the reference the fast path is checked against.
"""
import numpy as np

from .errors import DimensionMismatch, NearSingularTube, SingularSlice
from .fourier import from_slices, irfft_mode3, rfft_mode3, self_conjugate_bins, to_slices

TUBE_INVERSE_TOL = 1e-12
SINGULAR_COND = 1e14


def identity_tensor(n, n3):
    e = np.zeros((n, n, n3))
    e[:, :, 0] = np.eye(n)
    return e


def identity_tube(n3):
    e = np.zeros(n3)
    e[0] = 1.0
    return e


def tprod(x, y):
    """t-product ``X * Y`` of ``I1 x I2 x I3`` and ``I2 x I4 x I3`` tensors."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 3 or y.ndim != 3:
        raise DimensionMismatch("tprod expects third-order tensors")
    if x.shape[1] != y.shape[0] or x.shape[2] != y.shape[2]:
        raise DimensionMismatch(f"cannot t-multiply {x.shape} by {y.shape}")
    n3 = x.shape[2]
    ch = to_slices(rfft_mode3(x)) @ to_slices(rfft_mode3(y))
    return irfft_mode3(from_slices(ch), n3)


def tprod_chain(*tensors):
    out = tensors[0]
    for t in tensors[1:]:
        out = tprod(out, t)
    return out


def unfold(x):
    """Stack frontal slices vertically: ``(I1*I3) x I2``."""
    x = np.asarray(x)
    return np.concatenate([x[:, :, k] for k in range(x.shape[2])], axis=0)


def fold(m, shape):
    i1, i2, i3 = shape
    return np.stack([m[k * i1:(k + 1) * i1] for k in range(i3)], axis=2)


def bcirc(x):
    """Block-circulant matrix ``(I1*I3) x (I2*I3)`` of a tensor."""
    x = np.asarray(x)
    i1, i2, i3 = x.shape
    out = np.empty((i1 * i3, i2 * i3), dtype=x.dtype)
    for r in range(i3):
        for c in range(i3):
            out[r * i1:(r + 1) * i1, c * i2:(c + 1) * i2] = x[:, :, (r - c) % i3]
    return out


def tprod_circulant(x, y):
    """Reference t-product ``fold(bcirc(X) @ unfold(Y))``; O((I1 I3)(I2 I3) I4)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape[1] != y.shape[0] or x.shape[2] != y.shape[2]:
        raise DimensionMismatch(f"cannot t-multiply {x.shape} by {y.shape}")
    return fold(bcirc(x) @ unfold(y), (x.shape[0], y.shape[1], x.shape[2]))


def ttranspose(x):
    """Transpose each frontal slice, then reverse the order of slices 2..I3."""
    x = np.asarray(x)
    xt = x.transpose(1, 0, 2)
    n3 = x.shape[2]
    return np.ascontiguousarray(xt[:, :, (-np.arange(n3)) % n3])


def tube_inverse(t, tol=TUBE_INVERSE_TOL):
    """Inverse of a tube under circular convolution.

    Raises :class:`NearSingularTube` if some DFT coefficient has modulus at or
    below ``tol`` times the largest one.
    """
    t = np.asarray(t, dtype=np.float64).ravel()
    th = np.fft.rfft(t)
    mod = np.abs(th)
    top = mod.max()
    if top == 0.0 or mod.min() <= tol * top:
        raise NearSingularTube(
            f"tube DFT modulus range [{mod.min():.3e}, {top:.3e}] fails tol {tol:g}",
            min_modulus=float(mod.min()), max_modulus=float(top))
    return np.fft.irfft(1.0 / th, n=t.size)


def tube_product(a, b):
    """Circular convolution of two tubes (the 1x1xI3 t-product)."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    return np.fft.irfft(np.fft.rfft(a) * np.fft.rfft(b), n=a.size)


def tinv(x):
    """Tensor inverse via per-slice LU solves in the Fourier domain."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3 or x.shape[0] != x.shape[1]:
        raise DimensionMismatch(f"tinv needs square frontal slices, got {x.shape}")
    n, n3 = x.shape[0], x.shape[2]
    stack = to_slices(rfft_mode3(x))
    eye = np.eye(n)
    out = np.empty_like(stack)
    for k, m in enumerate(stack):
        if k in self_conjugate_bins(n3):
            m = m.real
        sv = np.linalg.svd(m, compute_uv=False)
        cond = np.inf if sv[-1] == 0 else sv[0] / sv[-1]
        if not cond < SINGULAR_COND:
            raise SingularSlice(k, cond)
        out[k] = np.linalg.solve(m, eye)
    return irfft_mode3(from_slices(out), n3)


def tpinv(x):
    """Moore-Penrose pseudoinverse, ``I2 x I1 x I3``.

    Singular values at or below ``max(I1, I2) * eps * sigma_max`` of each slice
    are treated as zero.
    """
    x = np.asarray(x, dtype=np.float64)
    i1, i2, n3 = x.shape
    stack = to_slices(rfft_mode3(x))
    rcond = max(i1, i2) * np.finfo(float).eps
    out = np.linalg.pinv(stack, rcond=rcond)
    for b in self_conjugate_bins(n3):
        out[b] = np.linalg.pinv(stack[b].real, rcond=rcond)
    return irfft_mode3(from_slices(out), n3)


def is_orthogonal(x, tol=1e-8):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3 or x.shape[0] != x.shape[1]:
        return False
    e = identity_tensor(x.shape[0], x.shape[2])
    xt = ttranspose(x)
    return bool(np.allclose(tprod(xt, x), e, atol=tol, rtol=0)
                and np.allclose(tprod(x, xt), e, atol=tol, rtol=0))


def is_f_diagonal(x, tol=1e-8):
    x = np.asarray(x, dtype=np.float64)
    i1, i2, _ = x.shape
    off = np.ones((i1, i2), dtype=bool)
    np.fill_diagonal(off, False)
    return bool(np.all(np.abs(x[off]) <= tol))


def has_orthonormal_lateral_slices(x, tol=1e-8):
    """True when ``X^T * X = I`` (the partial orthogonality of t-SVD factors)."""
    x = np.asarray(x, dtype=np.float64)
    gram = tprod(ttranspose(x), x)
    return bool(np.allclose(gram, identity_tensor(x.shape[1], x.shape[2]), atol=tol, rtol=0))
