"""Structuring elements and morphological operators on grey and colour images.

Images are numpy arrays indexed ``[row, col]`` (colour images carry a
trailing RGB axis with values in [0, 1]).  An offset ``(dx, dy)`` shifts by
``dx`` columns and ``dy`` rows.  Dilation samples ``f(x - u)`` and erosion
``f(x + u)``; samples falling outside the image are dropped from the window.

Colour dilation maps every pixel to its matrix, adds the SE height and takes
the LES (or RLES) of the window.  Colour erosion is the complement of the
dilation of the complement, following the usual grey-value duality.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .colorspace import EPS_GEOM, bicone_to_matrix, matrix_to_rgb, rgb_to_matrix
from .supremum import DEFAULT_TOL, SupTolerances, sup_batch

__all__ = [
    "StructuringElement",
    "se_make",
    "se_from_offsets",
    "parse_se",
    "parse_se_file",
    "reflect",
    "compose",
    "complement",
    "grey_dilate",
    "grey_erode",
    "grey_open",
    "grey_close",
    "matrix_dilate",
    "matrix_erode",
    "dilate",
    "erode",
    "opening",
    "closing",
    "les_dilate",
    "les_erode",
    "les_open",
    "les_close",
    "rles_dilate",
    "rles_erode",
    "rles_open",
    "rles_close",
    "SHAPES",
]

SHAPES = ("square", "disc", "diamond", "cross")
_ROWS_PER_CHUNK = 32


@dataclass(frozen=True, eq=False)
class StructuringElement:
    """Offsets ``(dx, dy)`` with optional additive heights.

    ``heights`` is ``None`` (flat), an array of ``K`` scalars (grey values)
    or an array of ``K`` symmetric 2x2 matrices (colour).
    """

    offsets: np.ndarray
    heights: np.ndarray | None = None

    def __post_init__(self):
        off = np.asarray(self.offsets)
        if off.ndim != 2 or off.shape[1] != 2 or len(off) == 0:
            raise ValueError("a structuring element needs a non-empty (K, 2) offset array")
        if not np.all(off == np.round(off)):
            raise ValueError("offsets must be integers")
        off = off.astype(np.int64)
        if len(np.unique(off, axis=0)) != len(off):
            raise ValueError("duplicate offsets in structuring element")
        object.__setattr__(self, "offsets", off)
        if self.heights is not None:
            h = np.asarray(self.heights, dtype=float)
            if h.shape not in ((len(off),), (len(off), 2, 2)):
                raise ValueError(f"heights of shape {h.shape} do not match {len(off)} offsets")
            if not np.all(np.isfinite(h)):
                raise ValueError("heights must be finite")
            object.__setattr__(self, "heights", h)

    def __len__(self) -> int:
        return len(self.offsets)

    @property
    def flat(self) -> bool:
        return self.heights is None or not np.any(self.heights)

    @property
    def radius(self) -> int:
        return int(np.abs(self.offsets).max())

    def scalar_heights(self) -> np.ndarray:
        if self.heights is None:
            return np.zeros(len(self))
        if self.heights.ndim != 1:
            raise ValueError("grey-value operators need scalar heights")
        return self.heights

    def matrix_heights(self) -> np.ndarray:
        if self.heights is None:
            return np.zeros((len(self), 2, 2))
        if self.heights.ndim != 3:
            raise ValueError("colour operators need matrix heights")
        return self.heights


def se_from_offsets(offsets: Iterable, heights=None) -> StructuringElement:
    return StructuringElement(np.asarray(list(offsets)).reshape(-1, 2), heights)


def se_make(shape: str, radius: int) -> StructuringElement:
    """Flat square, disc, diamond or cross of the given radius."""
    if shape not in SHAPES:
        raise ValueError(f"unknown shape {shape!r}; choose from {', '.join(SHAPES)}")
    if int(radius) != radius or radius < 1:
        raise ValueError("radius must be a positive integer")
    r = int(radius)
    dy, dx = np.mgrid[-r:r + 1, -r:r + 1]
    if shape == "square":
        keep = np.ones_like(dx, dtype=bool)
    elif shape == "diamond":
        keep = np.abs(dx) + np.abs(dy) <= r
    elif shape == "disc":
        keep = dx * dx + dy * dy <= (r + 0.5) ** 2
    else:
        keep = (dx == 0) | (dy == 0)
    return StructuringElement(np.stack([dx[keep], dy[keep]], axis=1))


def parse_se(text: str) -> StructuringElement:
    """Parse ``shape:radius``, e.g. ``square:2``."""
    shape, sep, radius = text.partition(":")
    if not sep:
        raise ValueError(f"expected shape:radius, got {text!r}")
    try:
        r = int(radius)
    except ValueError:
        raise ValueError(f"radius must be an integer, got {radius!r}") from None
    return se_make(shape.strip().lower(), r)


def parse_se_file(source) -> StructuringElement:
    """Read an SE from text lines ``dx dy [x y z]``; ``#`` starts a comment.

    The optional triple is a bi-cone offset that is mapped linearly to a
    matrix height.  Either every line carries a triple or none does.
    """
    if hasattr(source, "read"):
        lines = source.read().splitlines()
    elif isinstance(source, str) and "\n" not in source and os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    else:
        lines = str(source).splitlines()
    offsets, triples = [], []
    for no, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) not in (2, 5):
            raise ValueError(f"line {no}: expected 'dx dy' or 'dx dy x y z'")
        try:
            offsets.append((int(fields[0]), int(fields[1])))
            if len(fields) == 5:
                triples.append([float(v) for v in fields[2:]])
        except ValueError:
            raise ValueError(f"line {no}: could not parse numbers") from None
    if not offsets:
        raise ValueError("structuring element file has no offsets")
    if triples and len(triples) != len(offsets):
        raise ValueError("either every offset has a height or none does")
    heights = bicone_to_matrix(np.array(triples)) if triples else None
    return se_from_offsets(offsets, heights)


def reflect(b: StructuringElement) -> StructuringElement:
    """``b(-x)``: offsets negated, heights carried along."""
    return StructuringElement(-b.offsets, b.heights)


def compose(b1: StructuringElement, b2: StructuringElement, sup: str = "les",
            tol: SupTolerances = DEFAULT_TOL) -> StructuringElement:
    """SE dilation ``b1 + b2`` over the Minkowski sum of the offset sets.

    The height at ``y`` is the supremum over ``z`` in ``b2`` of
    ``h1(y - z) + h2(z)``: the LES (or RLES) for matrix heights and the
    maximum for scalar heights.  Two flat SEs give a flat SE.
    """
    sums = (b1.offsets[:, None, :] + b2.offsets[None, :, :]).reshape(-1, 2)
    offsets, inverse = np.unique(sums, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    if b1.heights is None and b2.heights is None:
        return StructuringElement(offsets)
    matrix = any(b.heights is not None and b.heights.ndim == 3 for b in (b1, b2))
    if matrix:
        h = (b1.matrix_heights()[:, None] + b2.matrix_heights()[None, :]).reshape(-1, 2, 2)
    else:
        h = (b1.scalar_heights()[:, None] + b2.scalar_heights()[None, :]).reshape(-1)
    groups = [np.flatnonzero(inverse == k) for k in range(len(offsets))]
    if not matrix:
        return StructuringElement(offsets, np.array([h[g].max() for g in groups]))
    K = max(len(g) for g in groups)
    stack = np.zeros((len(offsets), K, 2, 2))
    valid = np.zeros((len(offsets), K), dtype=bool)
    for k, g in enumerate(groups):
        stack[k, :len(g)] = h[g]
        valid[k, :len(g)] = True
    return StructuringElement(offsets, sup_batch(stack, valid, sup, tol))


def _gather(arr: np.ndarray, offsets: np.ndarray, sign: int):
    """Window samples ``arr[x + sign * u]`` -> (H, W, K, ...) plus validity mask."""
    H, W = arr.shape[:2]
    r = int(np.abs(offsets).max())
    pad = [(r, r), (r, r)] + [(0, 0)] * (arr.ndim - 2)
    padded = np.pad(arr, pad)
    inside = np.pad(np.ones((H, W), dtype=bool), r)
    vals = np.empty((H, W, len(offsets)) + arr.shape[2:], dtype=arr.dtype)
    valid = np.empty((H, W, len(offsets)), dtype=bool)
    for k, (dx, dy) in enumerate(offsets):
        r0, c0 = r + sign * dy, r + sign * dx
        vals[:, :, k] = padded[r0:r0 + H, c0:c0 + W]
        valid[:, :, k] = inside[r0:r0 + H, c0:c0 + W]
    if not valid.any(axis=2).all():
        raise ValueError("structuring element leaves some pixel with an empty window")
    return vals, valid


def _as_grey(f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.ndim != 2 or f.size == 0:
        raise ValueError("grey-value image must be a non-empty 2-D array")
    return f


def grey_dilate(f, b: StructuringElement) -> np.ndarray:
    """``max_u f(x - u) + b(u)`` over in-image samples."""
    f = _as_grey(f)
    vals, valid = _gather(f, b.offsets, -1)
    return np.where(valid, vals + b.scalar_heights(), -np.inf).max(axis=2)


def grey_erode(f, b: StructuringElement) -> np.ndarray:
    """``min_u f(x + u) - b(u)`` over in-image samples."""
    f = _as_grey(f)
    vals, valid = _gather(f, b.offsets, 1)
    return np.where(valid, vals - b.scalar_heights(), np.inf).min(axis=2)


def grey_open(f, b: StructuringElement) -> np.ndarray:
    return grey_dilate(grey_erode(f, b), b)


def grey_close(f, b: StructuringElement) -> np.ndarray:
    return grey_erode(grey_dilate(f, b), b)


def complement(f, lo, hi) -> np.ndarray:
    """``hi - f + lo``, per channel when ``lo``/``hi`` are arrays.

    Raises ValueError if ``f`` has values outside ``[lo, hi]``.
    """
    f = np.asarray(f, dtype=float)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if np.any(lo > hi) or np.any(f < lo) or np.any(f > hi):
        raise ValueError("complement range must contain every pixel value")
    return hi - f + lo


def matrix_dilate(X, b: StructuringElement, sup: str = "les", tol: SupTolerances = DEFAULT_TOL,
                  workers: int | None = None) -> np.ndarray:
    """Supremum of ``X(x - u) + W(u)`` over each window of a matrix field.

    ``X`` has shape (H, W, 2, 2).  ``sup`` names the supremum (``les``,
    ``rles``, ``lei`` or ``rlei``).  ``workers > 1`` splits the rows across
    threads; the result does not depend on the split.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 4 or X.shape[2:] != (2, 2) or X.shape[0] * X.shape[1] == 0:
        raise ValueError("expected a non-empty (H, W, 2, 2) matrix field")
    heights = b.matrix_heights()
    vals, valid = _gather(X, b.offsets, -1)
    vals += heights

    def run(rows: slice) -> np.ndarray:
        return sup_batch(vals[rows], valid[rows], sup, tol)

    chunks = [slice(i, i + _ROWS_PER_CHUNK) for i in range(0, X.shape[0], _ROWS_PER_CHUNK)]
    if workers and workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(c) for c in chunks]
    return np.concatenate(parts, axis=0)


def matrix_erode(X, b: StructuringElement, sup: str = "les", tol: SupTolerances = DEFAULT_TOL,
                 workers: int | None = None) -> np.ndarray:
    """Negation dual of :func:`matrix_dilate`: ``-dilate(-X)``.

    On matrices, complementing a colour image over (0, 1) is negation, so
    this is the colour erosion before mapping back to RGB.
    """
    return -matrix_dilate(-np.asarray(X, dtype=float), b, sup, tol, workers)


def _as_colour(f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.ndim != 3 or f.shape[2] != 3 or f.shape[0] * f.shape[1] == 0:
        raise ValueError("colour image must be a non-empty (H, W, 3) array")
    return f


def dilate(f, b: StructuringElement, sup: str = "les", tol: SupTolerances = DEFAULT_TOL,
           workers: int | None = None, eps: float = EPS_GEOM) -> np.ndarray:
    """Colour dilation: the supremum of ``tau(f(x - u)) + W(u)`` mapped back to RGB."""
    f = _as_colour(f)
    return matrix_to_rgb(matrix_dilate(rgb_to_matrix(f), b, sup, tol, workers), eps)


def _complement_range(f: np.ndarray, mode: str):
    if mode == "fixed":
        return 0.0, 1.0
    if mode == "image":
        return f.min(axis=(0, 1)), f.max(axis=(0, 1))
    raise ValueError(f"unknown complement range {mode!r}; use 'fixed' or 'image'")


def erode(f, b: StructuringElement, sup: str = "les", tol: SupTolerances = DEFAULT_TOL,
          workers: int | None = None, range_mode: str = "fixed", eps: float = EPS_GEOM) -> np.ndarray:
    """Colour erosion ``(f^c + b)^c`` with channel-wise complements.

    ``range_mode='fixed'`` complements over (0, 1); ``'image'`` uses the
    per-channel minimum and maximum of ``f`` for both complements, clipping
    the final result to [0, 1].
    """
    f = _as_colour(f)
    lo, hi = _complement_range(f, range_mode)
    g = dilate(complement(f, lo, hi), b, sup, tol, workers, eps)
    return np.clip(hi - g + lo, 0.0, 1.0)


def opening(f, b: StructuringElement, sup: str = "les", **kw) -> np.ndarray:
    """Erosion followed by dilation."""
    dkw = {k: v for k, v in kw.items() if k != "range_mode"}
    return dilate(erode(f, b, sup, **kw), b, sup, **dkw)


def closing(f, b: StructuringElement, sup: str = "les", **kw) -> np.ndarray:
    """Dilation followed by erosion."""
    dkw = {k: v for k, v in kw.items() if k != "range_mode"}
    return erode(dilate(f, b, sup, **dkw), b, sup, **kw)


def _bind(op: Callable, sup: str) -> Callable:
    def bound(f, b, tol: SupTolerances = DEFAULT_TOL, **kw):
        return op(f, b, sup, tol=tol, **kw)

    bound.__name__ = f"{sup}_{op.__name__}"
    bound.__doc__ = f"{op.__name__} with the {sup.upper()} supremum."
    return bound


les_dilate = _bind(dilate, "les")
les_erode = _bind(erode, "les")
les_open = _bind(opening, "les")
les_close = _bind(closing, "les")
rles_dilate = _bind(dilate, "rles")
rles_erode = _bind(erode, "rles")
rles_open = _bind(opening, "rles")
rles_close = _bind(closing, "rles")
