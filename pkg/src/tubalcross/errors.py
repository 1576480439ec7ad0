"""Exception types shared across the package."""


class TubalError(Exception):
    """Base class for all errors raised by tubalcross."""


class DimensionMismatch(TubalError, ValueError):
    pass


class NearSingularTube(TubalError):
    """A tube has a DFT coefficient too small to invert."""

    def __init__(self, message, min_modulus=None, max_modulus=None):
        super().__init__(message)
        self.min_modulus = min_modulus
        self.max_modulus = max_modulus


class SingularSlice(TubalError):
    """A Fourier frontal slice is numerically singular."""

    def __init__(self, k, cond=None):
        super().__init__(f"Fourier frontal slice {k} is numerically singular (cond={cond})")
        self.k = k
        self.cond = cond


class SymmetryViolation(TubalError):
    """Inverse transform of supposedly real data left a large imaginary part."""


class Breakdown(TubalError):
    """Cross approximation found no admissible pivot among unused indices.

    The factors computed before the failure are attached as ``partial``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class MaskError(TubalError, ValueError):
    pass


class FormatError(TubalError, ValueError):
    """Malformed or unsupported file contents."""
