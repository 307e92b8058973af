"""Loewner order predicates and the lexicographic eigenvalue ordering.

``A >=_L B`` iff ``A - B`` is positive semi-definite.  The order is only a
semi-order: two rotated rank-one matrices are typically incomparable, so
nothing here assumes totality.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .spectral import DomainError, eig_sym, entries, matrix_apply

__all__ = [
    "OrderTolerance",
    "LexPair",
    "min_eigenvalue",
    "is_psd",
    "loewner_geq",
    "is_upper_bound",
    "lex_phi",
    "lex_compare",
    "shift_to_unit",
    "matrix_power",
    "in_p_power_upper_bound",
]

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class OrderTolerance:
    """PSD slack; the effective threshold is ``eig_tol * max(1, max|a_ij|)``."""

    eig_tol: float = 1e-12

    def __post_init__(self):
        if not self.eig_tol >= 0.0:
            raise ValueError("eig_tol must be non-negative")


DEFAULT_ORDER_TOL = OrderTolerance()


class LexPair(NamedTuple):
    major: float
    minor: float


def min_eigenvalue(A):
    _, mu, _ = eig_sym(*entries(A))
    return mu


def is_psd(A, tol: OrderTolerance = DEFAULT_ORDER_TOL) -> bool:
    A = np.asarray(A, dtype=float)
    scale = max(1.0, float(np.max(np.abs(A))))
    return bool(min_eigenvalue(A) >= -tol.eig_tol * scale)


def loewner_geq(A, B, tol: OrderTolerance = DEFAULT_ORDER_TOL) -> bool:
    return is_psd(np.asarray(A, dtype=float) - np.asarray(B, dtype=float), tol)


def is_upper_bound(Y, X: Sequence, tol: OrderTolerance = DEFAULT_ORDER_TOL) -> bool:
    X = list(X)
    if not X:
        raise ValueError("upper bound of an empty multiset is undefined")
    return all(loewner_geq(Y, Xi, tol) for Xi in X)


def lex_phi(Y) -> LexPair:
    """The ordered eigenvalue pair ``(lam, mu)`` of ``Y``."""
    lam, mu, _ = eig_sym(*entries(Y))
    return LexPair(float(lam), float(mu))


def lex_compare(a: LexPair, b: LexPair, tol: float = 0.0) -> int:
    """Three-way lexicographic comparison: -1, 0 or 1.

    With ``tol = 0`` this is the plain lexicographic order (major component
    first, minor component as tiebreak).  A positive ``tol`` treats
    components closer than ``tol`` as equal.
    """
    for x, y in ((a[0], b[0]), (a[1], b[1])):
        if x < y - tol:
            return -1
        if x > y + tol:
            return 1
    return 0


def shift_to_unit(X: Sequence, lam1: float | None = None) -> list[np.ndarray]:
    """Affine normalisation ``X/sqrt2 + (1 - lam1/sqrt2) I``.

    For bi-cone data with largest eigenvalue ``lam1`` the images have
    eigenvalues in [0, 1] with maximum exactly 1; eigenvectors are unchanged.
    """
    X = [np.asarray(Xi, dtype=float) for Xi in X]
    if lam1 is None:
        lam1 = max(float(eig_sym(*entries(Xi))[0]) for Xi in X)
    shift = (1.0 - lam1 / SQRT2) * np.eye(2)
    return [Xi / SQRT2 + shift for Xi in X]


def matrix_power(A, p: float) -> np.ndarray:
    """``A^p`` for a PSD matrix; tiny negative eigenvalues from roundoff are zeroed."""
    A = np.asarray(A, dtype=float)
    if min_eigenvalue(A) < -1e-12 * max(1.0, float(np.max(np.abs(A)))):
        raise DomainError("p-th power requires non-negative eigenvalues; lift the data first")
    return matrix_apply(A, lambda t: np.maximum(t, 0.0) ** p)


def in_p_power_upper_bound(Y, X: Sequence, p: float, tol: OrderTolerance = DEFAULT_ORDER_TOL) -> bool:
    """Whether ``Y^p`` is a Loewner upper bound of ``{X_i^p}``.

    All matrices must already have non-negative eigenvalues (see
    :func:`shift_to_unit`); otherwise DomainError is raised.
    """
    if not p > 0.0:
        raise ValueError("p must be positive")
    Yp = matrix_power(Y, p)
    return is_upper_bound(Yp, [matrix_power(Xi, p) for Xi in X], tol)
