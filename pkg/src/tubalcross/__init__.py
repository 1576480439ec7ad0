"""Tubal-product tensor algebra with adaptive cross tubal approximation (ACTA)."""
from .errors import (Breakdown, DimensionMismatch, FormatError, MaskError, NearSingularTube,
                     SingularSlice, SymmetryViolation, TubalError)
from .tensor import as_tensor3, read_t3d, write_t3d, open_t3d
from .fourier import fft_mode3, ifft_mode3, FourierTensor3
from .algebra import (identity_tensor, tprod, tprod_circulant, ttranspose, tinv, tpinv,
                      tube_inverse, bcirc, fold, unfold)
from .factorizations import (TsvdFactors, tsvd_full, tsvd_truncated, tsvd_randomized,
                             numerical_tubal_rank)
from .cross import acta, aca_matrix, deflate_tubal, cur_from_indices, cur_approximation, CrossFactors
from .generators import GeneratorSpec, synthetic_exact_rank, function_tensor, desk_image
from .completion import complete, psnr, relative_error, random_mask, pixel_mask, CompletionReport
from .imageio import read_image, write_image

__version__ = "0.1.0"
