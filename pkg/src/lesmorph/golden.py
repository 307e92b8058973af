"""Reference multisets with known closed-form suprema, used by ``lesmorph verify``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .colorspace import matrix_to_rgb, rgb_to_matrix
from .supremum import DEFAULT_TOL, SupTolerances, les, rles

SQRT2 = np.sqrt(2.0)
SQRT3 = np.sqrt(3.0)
GOLDEN_TOL = 1e-12

# blue, a brown and a pale blue whose matrices have closed-form eigenpairs
THREE_COLOURS = np.array([[0.0, 0.0, 1.0], [3 / 5, 2 / 5, 1 / 5], [1 / 3, 1 / 3, 5 / 6]])
BLUE_GREEN = np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0]])

THREE_MATRICES = np.array([
    [[SQRT3, -1.0], [-1.0, -SQRT3]],
    [[-2.0, SQRT3], [SQRT3, 0.0]],
    [[2.0 + 3.0 * SQRT3, -3.0], [-3.0, 2.0 - 3.0 * SQRT3]],
]) / (SQRT2 * np.array([2.0, 5.0, 12.0]))[:, None, None]

LES_THREE = np.array([[3.0 + SQRT3, -1.0], [-1.0, 3.0 - SQRT3]]) / (5.0 * SQRT2)
RLES_THREE = np.array([[10.0 + SQRT3, -1.0], [-1.0, 10.0 - SQRT3]]) / (12.0 * SQRT2)
WHITE = np.eye(2) / SQRT2


@dataclass
class GoldenResult:
    name: str
    deviation: float
    passed: bool


def _case(name: str, got: np.ndarray, want: np.ndarray) -> GoldenResult:
    dev = float(np.max(np.abs(np.asarray(got) - want)))
    return GoldenResult(name, dev, bool(dev <= GOLDEN_TOL))


def run_golden(tol: SupTolerances = DEFAULT_TOL) -> list[GoldenResult]:
    X = rgb_to_matrix(THREE_COLOURS)
    Y = rgb_to_matrix(BLUE_GREEN)
    S = les(X, tol)
    R = rles(X, tol)
    W = les(Y, tol)
    return [
        _case("three colours: matrices", X, THREE_MATRICES),
        _case("three colours: les", S, LES_THREE),
        _case("three colours: les rgb", matrix_to_rgb(S), [0.6, 0.6, 1.0]),
        _case("blue/green: les", W, WHITE),
        _case("blue/green: les rgb", matrix_to_rgb(W), [1.0, 1.0, 1.0]),
        _case("blue/green: rles", rles(Y, tol), WHITE),
        _case("three colours: rles", R, RLES_THREE),
        _case("three colours: rles rgb", matrix_to_rgb(R), [5 / 6, 5 / 6, 1.0]),
    ]
