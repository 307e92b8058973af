"""Closed-form eigendecomposition of symmetric 2x2 matrices.

A symmetric matrix ``A = [[a11, a12], [a12, a22]]`` is written as
``lam * u u^T + mu * v v^T`` with ``lam >= mu``, ``u = (cos phi, sin phi)``
and ``v = (-sin phi, cos phi)``.  The sign of ``u`` is never fixed; every
consumer in this package only uses the rank-one products ``u u^T`` or
``|sin|`` of angle differences, both of which are sign invariant.

All array functions broadcast over leading dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "DomainError",
    "SpectralDecomposition",
    "eig_sym",
    "from_eig",
    "entries",
    "assemble",
    "decompose",
    "recompose",
    "matrix_apply",
    "rotation",
    "rotate",
    "wrap_angle",
]

HALF_PI = 0.5 * np.pi
# relative eigenvalue gap below which the eigenvector angle is reported as 0
ISOTROPIC_RTOL = 1e-12


class DomainError(ValueError):
    """A scalar function is undefined at an eigenvalue."""


@dataclass(frozen=True)
class SpectralDecomposition:
    lam: float
    mu: float
    phi: float

    @property
    def u(self) -> np.ndarray:
        return np.array([np.cos(self.phi), np.sin(self.phi)])

    @property
    def v(self) -> np.ndarray:
        return np.array([-np.sin(self.phi), np.cos(self.phi)])

    @property
    def isotropic(self) -> bool:
        scale = max(1.0, abs(self.lam), abs(self.mu))
        return self.lam - self.mu <= ISOTROPIC_RTOL * scale


def wrap_angle(theta):
    """Map an angle (mod pi) into [-pi/2, pi/2)."""
    return np.mod(np.asarray(theta, dtype=float) + HALF_PI, np.pi) - HALF_PI


def entries(A):
    """Return ``(a11, a12, a22)`` of a stack of symmetric matrices."""
    A = np.asarray(A, dtype=float)
    return A[..., 0, 0], 0.5 * (A[..., 0, 1] + A[..., 1, 0]), A[..., 1, 1]


def assemble(a11, a12, a22) -> np.ndarray:
    a11, a12, a22 = np.broadcast_arrays(
        np.asarray(a11, float), np.asarray(a12, float), np.asarray(a22, float)
    )
    out = np.empty(a11.shape + (2, 2))
    out[..., 0, 0] = a11
    out[..., 0, 1] = a12
    out[..., 1, 0] = a12
    out[..., 1, 1] = a22
    return out


def eig_sym(a11, a12, a22):
    """Vectorised eigenpairs ``(lam, mu, phi)`` from the matrix entries.

    ``phi = atan2(2 a12, a11 - a22) / 2`` is the angle of the major
    eigenvector and lies in [-pi/2, pi/2].  Isotropic inputs get ``phi = 0``.
    """
    a11 = np.asarray(a11, dtype=float)
    a12 = np.asarray(a12, dtype=float)
    a22 = np.asarray(a22, dtype=float)
    mean = 0.5 * (a11 + a22)
    half_diff = 0.5 * (a11 - a22)
    radius = np.hypot(half_diff, a12)
    lam = mean + radius
    mu = mean - radius
    phi = 0.5 * np.arctan2(2.0 * a12, a11 - a22)
    scale = np.maximum(1.0, np.maximum(np.abs(lam), np.abs(mu)))
    phi = np.where(2.0 * radius <= ISOTROPIC_RTOL * scale, 0.0, phi)
    return lam, mu, phi


def from_eig(lam, mu, phi):
    """Entries ``(a11, a12, a22)`` of ``lam u u^T + mu v v^T``."""
    c = np.cos(phi)
    s = np.sin(phi)
    a11 = lam * c * c + mu * s * s
    a22 = lam * s * s + mu * c * c
    a12 = (lam - mu) * c * s
    return a11, a12, a22


def decompose(A) -> SpectralDecomposition:
    lam, mu, phi = eig_sym(*entries(A))
    return SpectralDecomposition(float(lam), float(mu), float(phi))


def recompose(d: SpectralDecomposition) -> np.ndarray:
    return assemble(*from_eig(d.lam, d.mu, d.phi))


def matrix_apply(A, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply ``f`` to the eigenvalues: ``f(lam) u u^T + f(mu) v v^T``.

    Raises DomainError when ``f`` yields a non-finite value at a finite
    eigenvalue (e.g. ``np.log`` of a non-positive eigenvalue).
    """
    lam, mu, phi = eig_sym(*entries(A))
    with np.errstate(all="ignore"):
        flam = np.asarray(f(lam), dtype=float)
        fmu = np.asarray(f(mu), dtype=float)
    if not (np.all(np.isfinite(flam)) and np.all(np.isfinite(fmu))):
        raise DomainError("function undefined at an eigenvalue of the matrix")
    return assemble(*from_eig(flam, fmu, phi))


def rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def rotate(A, theta: float) -> np.ndarray:
    """``R A R^T``: same eigenvalues, eigenvector angle shifted by ``theta``."""
    R = rotation(theta)
    out = R @ np.asarray(A, dtype=float) @ R.T
    return 0.5 * (out + np.swapaxes(out, -1, -2))
