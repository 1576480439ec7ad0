"""Dense third-order tensors stored as numpy arrays.

A ``Tensor3`` is simply a C-contiguous ``float64`` array of shape
``(I1, I2, I3)``; C order makes the tube index ``i3`` vary fastest, which is
the layout the mode-3 FFTs want.  All indices in the Python API are 0-based.

The module also holds the binary ``T3D1`` container format::

    b"T3D1" | I1, I2, I3 as <u8 | I1*I2*I3 <f8 values, tube-fastest
"""
import os
import struct
import tempfile
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, FormatError

T3D1_MAGIC = b"T3D1"
T3D1_HEADER = struct.Struct("<4sQQQ")


class SliceView(NamedTuple):
    kind: str  # "frontal" | "lateral" | "horizontal"
    index: int
    payload: np.ndarray


def as_tensor3(x, check_finite=True):
    """Validate and convert ``x`` to a contiguous float64 third-order tensor."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 3:
        raise DimensionMismatch(f"expected a third-order tensor, got ndim={x.ndim}")
    if min(x.shape) < 1:
        raise DimensionMismatch(f"all dimensions must be positive, got {x.shape}")
    if check_finite and not np.all(np.isfinite(x)):
        raise ValueError("tensor contains NaN or Inf entries")
    return x


def _check_index(idx, size, name):
    if not 0 <= idx < size:
        raise IndexError(f"{name} index {idx} out of range [0, {size})")


def frontal_slice(x, k):
    """Return a copy of ``X(:, :, k)`` (shape ``I1 x I2``)."""
    _check_index(k, x.shape[2], "frontal")
    return x[:, :, k].copy()


def lateral_slice(x, j):
    """Return a copy of ``X(:, j, :)`` as an ``I1 x I3`` matrix."""
    _check_index(j, x.shape[1], "lateral")
    return x[:, j, :].copy()


def horizontal_slice(x, i):
    """Return a copy of ``X(i, :, :)`` as an ``I2 x I3`` matrix."""
    _check_index(i, x.shape[0], "horizontal")
    return x[i, :, :].copy()


def tube_at(x, i, j):
    _check_index(i, x.shape[0], "row")
    _check_index(j, x.shape[1], "column")
    return x[i, j, :].copy()


def get_slice(x, kind, index):
    getter = {"frontal": frontal_slice, "lateral": lateral_slice,
              "horizontal": horizontal_slice}.get(kind)
    if getter is None:
        raise ValueError(f"unknown slice kind {kind!r}")
    return SliceView(kind, index, getter(x, index))


def frobenius_norm(x):
    return float(np.linalg.norm(np.ravel(x)))


def hadamard(x, y):
    if np.shape(x) != np.shape(y):
        raise DimensionMismatch(f"shape mismatch {np.shape(x)} vs {np.shape(y)}")
    return np.multiply(x, y)


def _as_slice_matrix(s, axis):
    s = np.asarray(s)
    if s.ndim == 3:
        if s.shape[axis] != 1:
            raise DimensionMismatch(f"slice must have unit size along axis {axis}, got {s.shape}")
        s = np.squeeze(s, axis=axis)
    if s.ndim != 2:
        raise DimensionMismatch(f"expected a matrix or a singleton-slice tensor, got {s.shape}")
    return s


def concat_lateral(slices):
    """Stack lateral slices (``I1 x I3`` or ``I1 x 1 x I3``) into ``I1 x k x I3``."""
    mats = [_as_slice_matrix(s, 1) for s in slices]
    if not mats:
        raise ValueError("need at least one slice")
    if any(m.shape != mats[0].shape for m in mats):
        raise DimensionMismatch("lateral slices have inconsistent shapes")
    return np.ascontiguousarray(np.stack(mats, axis=1))


def concat_horizontal(slices):
    """Stack horizontal slices (``I2 x I3`` or ``1 x I2 x I3``) into ``k x I2 x I3``."""
    mats = [_as_slice_matrix(s, 0) for s in slices]
    if not mats:
        raise ValueError("need at least one slice")
    if any(m.shape != mats[0].shape for m in mats):
        raise DimensionMismatch("horizontal slices have inconsistent shapes")
    return np.ascontiguousarray(np.stack(mats, axis=0))


# --- T3D1 files -------------------------------------------------------------

def atomic_write_bytes(path, writer):
    """Write a file through a temporary sibling and rename it into place.

    ``writer`` receives an open binary file object.
    """
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            writer(fh)
        # mkstemp creates 0600; give the final file the usual umask-derived mode
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def encode_t3d(x):
    x = as_tensor3(x)
    return T3D1_HEADER.pack(T3D1_MAGIC, *x.shape) + x.astype("<f8").tobytes()


def write_t3d(x, path):
    payload = encode_t3d(x)
    atomic_write_bytes(path, lambda fh: fh.write(payload))


def _read_header(fh, path):
    raw = fh.read(T3D1_HEADER.size)
    if len(raw) != T3D1_HEADER.size:
        raise FormatError(f"{path}: truncated T3D1 header")
    magic, i1, i2, i3 = T3D1_HEADER.unpack(raw)
    if magic != T3D1_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if min(i1, i2, i3) < 1:
        raise FormatError(f"{path}: non-positive dimension ({i1}, {i2}, {i3})")
    return int(i1), int(i2), int(i3)


def read_t3d(path):
    with open(path, "rb") as fh:
        dims = _read_header(fh, path)
        body = fh.read()
    count = dims[0] * dims[1] * dims[2]
    if len(body) != 8 * count:
        raise FormatError(f"{path}: expected {8 * count} data bytes, found {len(body)}")
    x = np.frombuffer(body, dtype="<f8").astype(np.float64).reshape(dims)
    try:
        return as_tensor3(x)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def open_t3d(path):
    """Memory-map a T3D1 file read-only, without loading it."""
    with open(path, "rb") as fh:
        dims = _read_header(fh, path)
    expected = T3D1_HEADER.size + 8 * dims[0] * dims[1] * dims[2]
    if os.path.getsize(path) != expected:
        raise FormatError(f"{path}: file size does not match header dims {dims}")
    return np.memmap(path, dtype="<f8", mode="r", offset=T3D1_HEADER.size, shape=dims)
