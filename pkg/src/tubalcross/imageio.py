"""Minimal binary PGM (P5) / PPM (P6) reader and writer.

Images become ``H x W x C`` float tensors on the 0..255 scale (``C`` is 1 for
PGM and 3 for PPM).  Only 8-bit files (``maxval <= 255``) are supported.
"""
import numpy as np

from .errors import FormatError
from .tensor import atomic_write_bytes

_CHANNELS = {b"P5": 1, b"P6": 3}


def _tokens(data, count):
    """Read ``count`` whitespace-separated header tokens, skipping ``#`` comments."""
    tokens, pos, n = [], 0, len(data)
    while len(tokens) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise FormatError("truncated PNM header")
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates the header from the raster
    if pos >= n or not data[pos:pos + 1].isspace():
        raise FormatError("missing whitespace after PNM header")
    return tokens, pos + 1


def decode_pnm(data):
    tokens, offset = _tokens(data, 4)
    magic = tokens[0]
    if magic not in _CHANNELS:
        raise FormatError(f"unsupported PNM magic {magic!r} (need P5 or P6)")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise FormatError(f"non-numeric PNM header field: {exc}") from exc
    if width < 1 or height < 1:
        raise FormatError(f"bad image size {width}x{height}")
    if not 1 <= maxval <= 255:
        raise FormatError(f"unsupported maxval {maxval} (only 8-bit images)")
    channels = _CHANNELS[magic]
    need = width * height * channels
    raster = data[offset:offset + need]
    if len(raster) != need:
        raise FormatError(f"expected {need} raster bytes, found {len(raster)}")
    img = np.frombuffer(raster, dtype=np.uint8).reshape(height, width, channels).astype(np.float64)
    if maxval != 255:
        img *= 255.0 / maxval
    return img


def read_image(path):
    with open(path, "rb") as fh:
        return decode_pnm(fh.read())


def quantize(x):
    """Clamp to [0, 255] and round half away from zero."""
    x = np.clip(np.asarray(x, dtype=np.float64), 0.0, 255.0)
    return np.floor(x + 0.5).astype(np.uint8)


def encode_pnm(x):
    x = np.asarray(x)
    if x.ndim == 2:
        x = x[:, :, None]
    if x.ndim != 3 or x.shape[2] not in (1, 3):
        raise FormatError(f"image tensor must be H x W x 1 or H x W x 3, got {x.shape}")
    magic = b"P5" if x.shape[2] == 1 else b"P6"
    header = b"%s\n%d %d\n255\n" % (magic, x.shape[1], x.shape[0])
    return header + quantize(x).tobytes()


def write_image(x, path):
    payload = encode_pnm(x)
    atomic_write_bytes(path, lambda fh: fh.write(payload))
