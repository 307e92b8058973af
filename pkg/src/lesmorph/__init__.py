"""Matrix-valued colour morphology with the log-exp supremum.

Colours are mapped to symmetric 2x2 matrices through the HCL bi-cone and
combined with the log-exp supremum (LES) or its relaxed variant (RLES).
"""

from .colorspace import OutOfGamutError, matrix_to_rgb, rgb_to_matrix
from .spectral import DomainError
from .supremum import SupTolerances, lei, les, les_numeric, rlei, rles

__all__ = [
    "DomainError",
    "OutOfGamutError",
    "SupTolerances",
    "lei",
    "les",
    "les_numeric",
    "matrix_to_rgb",
    "rgb_to_matrix",
    "rlei",
    "rles",
]

__version__ = "0.1.0"
