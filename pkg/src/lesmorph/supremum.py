"""Log-exp supremum (LES) of symmetric 2x2 matrices and its relaxation (RLES).

For a multiset ``X = {X_1, ..., X_n}`` the LES is the limit

    S = lim_{m -> inf} (1/m) log sum_i exp(m X_i).

It has a closed form in terms of the 2n eigenpairs of the inputs.  Let
``lam1`` be the largest eigenvalue and ``u1`` its eigenvector.

* LES: if ``lam1`` is attained more than once and some maximal eigenvector is
  not parallel to ``u1`` (an isotropic maximiser counts as such), the result
  is ``lam1 I``.  Otherwise it is ``lam1 u1 u1^T + mu* v1 v1^T`` where ``mu*``
  is the largest eigenvalue whose eigenvector is not parallel to ``u1``.
* RLES: if ``lam1`` is unique the result is ``lam1 u1 u1^T + lam2 v1 v1^T``
  with ``lam2`` the second largest eigenvalue regardless of direction;
  otherwise ``lam1 I``.

Equalities are decided with :class:`SupTolerances`.  Besides the scalar
functions there is a vectorised kernel, :func:`sup_batch`, that evaluates
many windows at once for the morphology operators.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .spectral import HALF_PI, assemble, eig_sym, entries, from_eig, wrap_angle

__all__ = [
    "SupTolerances",
    "EigenCandidate",
    "collect_candidates",
    "les",
    "lei",
    "rles",
    "rlei",
    "les_numeric",
    "sup_batch",
    "SUPREMA",
]


@dataclass(frozen=True)
class SupTolerances:
    """Thresholds turning exact equalities into decisions.

    ``tie_tol`` is an absolute eigenvalue gap; ``align_tol`` bounds
    ``|sin(angle difference)|`` for two eigenvectors to count as parallel.
    """

    tie_tol: float = 1e-9
    align_tol: float = 1e-9

    def __post_init__(self):
        if not (self.tie_tol >= 0.0 and self.align_tol >= 0.0):
            raise ValueError("tolerances must be non-negative")


DEFAULT_TOL = SupTolerances()


@dataclass(frozen=True)
class EigenCandidate:
    value: float
    angle: float
    isotropic: bool
    index: int


def _as_stack(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 2:
        X = X[None]
    if X.ndim != 3 or X.shape[1:] != (2, 2):
        raise ValueError(f"expected a multiset of 2x2 matrices, got shape {X.shape}")
    if len(X) == 0:
        raise ValueError("supremum of an empty multiset is undefined")
    return X


def collect_candidates(X: Sequence, tol: SupTolerances = DEFAULT_TOL) -> list[EigenCandidate]:
    """All 2n eigenpairs, sorted by value (descending), then angle, then index."""
    X = _as_stack(X)
    lam, mu, phi = eig_sym(*entries(X))
    iso = (lam - mu) <= tol.tie_tol
    cands = []
    for i in range(len(X)):
        cands.append(EigenCandidate(float(lam[i]), float(wrap_angle(phi[i])), bool(iso[i]), i))
        cands.append(EigenCandidate(float(mu[i]), float(wrap_angle(phi[i] + HALF_PI)), bool(iso[i]), i))
    cands.sort(key=lambda c: (-c.value, c.angle, c.index))
    return cands


def _aligned(a: EigenCandidate, b: EigenCandidate, tol: SupTolerances) -> bool:
    if a.isotropic or b.isotropic:
        return False
    return abs(np.sin(a.angle - b.angle)) <= tol.align_tol


def _compose(lam1: float, second: float, angle: float) -> np.ndarray:
    return assemble(*from_eig(lam1, second, angle))


def les(X: Sequence, tol: SupTolerances = DEFAULT_TOL) -> np.ndarray:
    """Closed-form log-exp supremum of a multiset of symmetric 2x2 matrices."""
    cands = collect_candidates(X, tol)
    top = cands[0]
    lam1 = top.value
    tied = [c for c in cands[1:] if lam1 - c.value <= tol.tie_tol]
    if top.isotropic or any(not _aligned(c, top, tol) for c in tied):
        return lam1 * np.eye(2)
    # never empty: the maximiser's own minor eigenvector is perpendicular to u1
    mu_star = next(c.value for c in cands[1:] if not _aligned(c, top, tol))
    return _compose(lam1, mu_star, top.angle)


def rles(X: Sequence, tol: SupTolerances = DEFAULT_TOL) -> np.ndarray:
    """Closed-form relaxed log-exp supremum.

    Copies of the maximising matrix (entrywise within ``tie_tol``) are
    merged before testing uniqueness, so that a window of identical colours
    returns that colour.
    """
    X = _as_stack(X)
    cands = collect_candidates(X, tol)
    top = cands[0]
    lam1 = top.value
    dup = np.all(np.abs(X - X[top.index]) <= tol.tie_tol, axis=(1, 2))
    rest = [c for c in cands[1:] if c.index == top.index or not dup[c.index]]
    if top.isotropic or lam1 - rest[0].value <= tol.tie_tol:
        return lam1 * np.eye(2)
    return _compose(lam1, rest[0].value, top.angle)


def lei(X: Sequence, tol: SupTolerances = DEFAULT_TOL) -> np.ndarray:
    """Log-exp infimum, ``-les(-X)``."""
    return -les(-_as_stack(X), tol)


def rlei(X: Sequence, tol: SupTolerances = DEFAULT_TOL) -> np.ndarray:
    """Relaxed log-exp infimum, ``-rles(-X)`` (same negation duality as lei)."""
    return -rles(-_as_stack(X), tol)


SUPREMA = {"les": les, "rles": rles, "lei": lei, "rlei": rlei}


def _logsumexp(a: np.ndarray) -> float:
    top = np.max(a)
    return float(top + np.log(np.sum(np.exp(a - top))))


def les_numeric(X: Sequence, m: float) -> np.ndarray:
    """Pre-limit expression ``(1/m) log sum_i exp(m X_i)`` at finite ``m``.

    Evaluated in the log domain.  With ``w_k = exp(m (nu_k - lam1))`` over
    all eigenpairs ``(nu_k, a_k)`` the sum is ``lam1``-shifted to
    ``E = sum_k w_k a_k a_k^T``; its determinant is taken from the
    Cauchy-Binet expansion ``sum_{k<l} w_k w_l sin^2(theta_k - theta_l)``
    so the small eigenvalue of ``E`` keeps full relative precision even
    when it is far below machine epsilon times the large one.
    """
    if not (np.isfinite(m) and m > 0.0):
        raise ValueError("m must be a positive finite number")
    X = _as_stack(X)
    lam, mu, phi = eig_sym(*entries(X))
    nu = np.concatenate([lam, mu])
    theta = np.concatenate([phi, phi + HALF_PI])
    lam1 = float(nu.max())
    logw = m * (nu - lam1)
    log_trace = _logsumexp(logw)

    i, j = np.triu_indices(len(nu), k=1)
    sin2 = np.sin(theta[i] - theta[j]) ** 2
    keep = sin2 > 0.0
    log_det = _logsumexp(logw[i][keep] + logw[j][keep] + np.log(sin2[keep]))

    ratio = np.exp(log_det - 2.0 * log_trace)  # det / trace^2 <= 1/4
    log_big = log_trace + np.log(0.5 * (1.0 + np.sqrt(max(0.0, 1.0 - 4.0 * ratio))))
    log_small = log_det - log_big

    w = np.exp(logw)
    c, s = np.cos(theta), np.sin(theta)
    e11, e12, e22 = np.sum(w * c * c), np.sum(w * c * s), np.sum(w * s * s)
    angle = 0.5 * np.arctan2(2.0 * e12, e11 - e22)
    return lam1 * np.eye(2) + assemble(*from_eig(log_big / m, log_small / m, angle))


def sup_batch(A: np.ndarray, valid: np.ndarray | None = None, kind: str = "les",
              tol: SupTolerances = DEFAULT_TOL) -> np.ndarray:
    """Vectorised supremum over the second-to-last axis of ``A``.

    ``A`` has shape ``(..., K, 2, 2)``; ``valid`` (shape ``(..., K)``) masks
    out entries that are not part of the multiset.  ``kind`` is one of
    ``les``, ``rles``, ``lei``, ``rlei``.  Returns shape ``(..., 2, 2)``.
    The decisions are identical to the scalar functions.
    """
    duals = {"lei": "les", "rlei": "rles"}
    if kind in duals:
        return -sup_batch(-np.asarray(A, dtype=float), valid, duals[kind], tol)
    if kind not in ("les", "rles"):
        raise ValueError(f"unknown supremum {kind!r}")
    A = np.asarray(A, dtype=float)
    lead = A.shape[:-3]
    K = A.shape[-3]
    A = A.reshape((-1, K, 2, 2))
    P = A.shape[0]
    if valid is None:
        valid = np.ones((P, K), dtype=bool)
    else:
        valid = np.asarray(valid, dtype=bool).reshape((P, K))
    if not np.all(valid.any(axis=1)):
        raise ValueError("supremum of an empty multiset is undefined")

    lam, mu, phi = eig_sym(*entries(A))
    iso = (lam - mu) <= tol.tie_tol
    vals = np.concatenate([lam, mu], axis=1)
    ang = wrap_angle(np.concatenate([phi, phi + HALF_PI], axis=1))
    iso2 = np.concatenate([iso, iso], axis=1)
    ok = np.concatenate([valid, valid], axis=1)
    src = np.concatenate([np.arange(K), np.arange(K)])
    rows = np.arange(P)

    vals = np.where(ok, vals, -np.inf)
    lam1 = vals.max(axis=1)
    # among exact maxima take the smallest angle, then the lowest matrix index
    is_max = vals == lam1[:, None]
    min_ang = np.where(is_max, ang, np.inf).min(axis=1)
    is_max &= ang == min_ang[:, None]
    top = np.argmin(np.where(is_max, src, K), axis=1)
    ang1 = ang[rows, top]
    top_iso = iso2[rows, top]
    others = ok.copy()
    others[rows, top] = False

    if kind == "les":
        aligned = (np.abs(np.sin(ang - ang1[:, None])) <= tol.align_tol) & ~iso2 & ~top_iso[:, None]
        tied = others & (lam1[:, None] - vals <= tol.tie_tol)
        to_identity = top_iso | np.any(tied & ~aligned, axis=1)
        second = np.where(others & ~aligned, vals, -np.inf).max(axis=1)
    else:
        top_src = src[top]
        ref = A[rows, top_src]
        dup = np.all(np.abs(A - ref[:, None]) <= tol.tie_tol, axis=(2, 3))
        dup[rows, top_src] = False
        pool = others & ~np.concatenate([dup, dup], axis=1)
        second = np.where(pool, vals, -np.inf).max(axis=1)
        to_identity = top_iso | (lam1 - second <= tol.tie_tol)

    second = np.where(to_identity, lam1, second)
    angle = np.where(to_identity, 0.0, ang1)
    out = assemble(*from_eig(lam1, second, angle))
    return out.reshape(lead + (2, 2))
