"""RGB <-> HCL bi-cone <-> symmetric 2x2 matrix.

Colours are arrays whose last axis holds ``(r, g, b)`` in [0, 1]; matrices are
arrays whose last two axes are 2x2.  Every function broadcasts.

The forward map goes through hue/chroma/modified luminance ``(H, C, Lt)``
with ``Lt = 2L - 1``, the Cartesian bi-cone point
``(x, y, z) = (C cos 2piH, C sin 2piH, Lt)`` and finally

    A = sqrt(2)/2 * [[z - y, x], [x, z + y]],

whose eigenvalues are ``(z +- C) / sqrt(2)``.  The bi-cone is therefore the
set of symmetric matrices with both eigenvalues in [-1/sqrt2, 1/sqrt2].
"""

from __future__ import annotations

import numpy as np

from .spectral import assemble, entries

__all__ = [
    "EPS_GEOM",
    "OutOfGamutError",
    "rgb_to_hcl",
    "hcl_to_rgb",
    "hcl_to_bicone",
    "bicone_to_hcl",
    "bicone_to_matrix",
    "matrix_to_bicone",
    "rgb_to_matrix",
    "matrix_to_rgb",
    "in_bicone",
    "clamp_to_bicone",
]

SQRT2 = np.sqrt(2.0)
EPS_GEOM = 1e-9


class OutOfGamutError(ValueError):
    """A point or matrix lies outside the bi-cone by more than EPS_GEOM."""


def _check_rgb(rgb: np.ndarray) -> None:
    if rgb.shape[-1:] != (3,):
        raise ValueError(f"expected trailing axis of length 3, got shape {rgb.shape}")
    if not np.all(np.isfinite(rgb)) or rgb.min(initial=0.0) < 0.0 or rgb.max(initial=0.0) > 1.0:
        raise ValueError("RGB channels must lie in [0, 1]")


def rgb_to_hcl(rgb):
    """Hue (fraction of a turn), chroma and modified luminance ``2L - 1``.

    Hue is set to 0 on the grey axis, where it is undefined.
    """
    rgb = np.asarray(rgb, dtype=float)
    _check_rgb(rgb)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    M = np.maximum(np.maximum(r, g), b)
    m = np.minimum(np.minimum(r, g), b)
    C = M - m
    safe = np.where(C > 0.0, 6.0 * C, 1.0)
    H = np.select(
        [M == r, M == g],
        [(g - b) / safe, (b - r) / safe + 1.0 / 3.0],
        (r - g) / safe + 2.0 / 3.0,
    )
    H = np.where(C > 0.0, np.mod(H, 1.0), 0.0)
    # mod can return 1.0 for tiny negative inputs
    H = np.where(H >= 1.0, 0.0, H)
    return H, C, M + m - 1.0


def hcl_to_rgb(H, C, Lt):
    """Inverse of :func:`rgb_to_hcl` by the usual six-sector construction."""
    H = np.asarray(H, dtype=float)
    C = np.asarray(C, dtype=float)
    L = 0.5 * (np.asarray(Lt, dtype=float) + 1.0)
    h6 = np.mod(H, 1.0) * 6.0
    sector = np.minimum(np.floor(h6), 5.0).astype(int)
    X = C * (1.0 - np.abs(np.mod(h6, 2.0) - 1.0))
    Z = np.zeros_like(X)
    r = np.choose(sector, [C, X, Z, Z, X, C])
    g = np.choose(sector, [X, C, C, X, Z, Z])
    b = np.choose(sector, [Z, Z, X, C, C, X])
    base = L - 0.5 * C
    return np.stack([r + base, g + base, b + base], axis=-1)


def hcl_to_bicone(H, C, Lt) -> np.ndarray:
    H = np.asarray(H, dtype=float)
    C = np.asarray(C, dtype=float)
    Lt = np.asarray(Lt, dtype=float)
    if np.any(C < 0.0) or np.any(np.abs(Lt) > 1.0) or np.any(C > 1.0 - np.abs(Lt) + EPS_GEOM):
        raise OutOfGamutError("HCL coordinates outside the bi-cone")
    angle = 2.0 * np.pi * H
    return np.stack(np.broadcast_arrays(C * np.cos(angle), C * np.sin(angle), Lt), axis=-1)


def bicone_to_hcl(p):
    p = np.asarray(p, dtype=float)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    C = np.hypot(x, y)
    H = np.where(C > 0.0, np.mod(np.arctan2(y, x) / (2.0 * np.pi), 1.0), 0.0)
    H = np.where(H >= 1.0, 0.0, H)
    return H, C, z


def bicone_to_matrix(p) -> np.ndarray:
    """Linear map from bi-cone coordinates to a symmetric matrix."""
    p = np.asarray(p, dtype=float)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    k = SQRT2 / 2.0
    return assemble(k * (z - y), k * x, k * (z + y))


def matrix_to_bicone(A) -> np.ndarray:
    a11, a12, a22 = entries(A)
    return np.stack([SQRT2 * a12, (a22 - a11) / SQRT2, (a11 + a22) / SQRT2], axis=-1)


def in_bicone(A, eps: float = EPS_GEOM):
    """True where both eigenvalues lie in [-1/sqrt2 - eps, 1/sqrt2 + eps]."""
    p = matrix_to_bicone(A)
    excess = (np.hypot(p[..., 0], p[..., 1]) + np.abs(p[..., 2]) - 1.0) / SQRT2
    return excess <= eps


def clamp_to_bicone(p, eps: float = EPS_GEOM) -> np.ndarray:
    """Pull bi-cone points that overshoot by at most ``eps`` back onto the surface.

    The overshoot is measured on the matrix eigenvalue scale, i.e.
    ``(C + |z| - 1) / sqrt2``.  Chroma is shrunk radially to ``1 - |z|``;
    points beyond the tolerance raise OutOfGamutError.
    """
    p = np.array(p, dtype=float)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    C = np.hypot(x, y)
    excess = (C + np.abs(z) - 1.0) / SQRT2
    if not np.all(np.isfinite(p)) or np.any(excess > eps):
        worst = float(np.max(excess)) if np.all(np.isfinite(p)) else float("nan")
        raise OutOfGamutError(f"matrix leaves the bi-cone (eigenvalue overshoot {worst:.3g})")
    z = np.clip(z, -1.0, 1.0)
    C_max = 1.0 - np.abs(z)
    shrink = np.where(C > C_max, C_max / np.where(C > 0.0, C, 1.0), 1.0)
    return np.stack([x * shrink, y * shrink, z], axis=-1)


def rgb_to_matrix(rgb) -> np.ndarray:
    """The colour-to-matrix bijection (RGB -> HCL -> bi-cone -> Sym(2))."""
    return bicone_to_matrix(hcl_to_bicone(*rgb_to_hcl(rgb)))


def matrix_to_rgb(A, eps: float = EPS_GEOM) -> np.ndarray:
    """Inverse of :func:`rgb_to_matrix` with the EPS_GEOM gamut clamp."""
    p = clamp_to_bicone(matrix_to_bicone(A), eps)
    rgb = hcl_to_rgb(*bicone_to_hcl(p))
    return np.clip(rgb, 0.0, 1.0)
