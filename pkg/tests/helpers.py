import numpy as np

from lesmorph.colorspace import rgb_to_matrix
from lesmorph.spectral import assemble, eig_sym, entries, from_eig
from lesmorph.supremum import collect_candidates


def colour_matrices(rng, n):
    return rgb_to_matrix(rng.random((n, 3)))


def eig_matrix(lam, mu, angle):
    return assemble(*from_eig(lam, mu, angle))


def generic_multiset(rng, n, gap=0.05, sep=0.05, max_tries=10_000):
    """Random colour matrices whose 2n eigenvalues are pairwise ``gap`` apart
    and whose 2n eigenvectors are pairwise ``sep`` apart in |sin| (a matrix's
    own perpendicular pair excepted)."""
    own = np.abs(np.arange(2 * n)[:, None] - np.arange(2 * n)[None, :]) == n
    iu = np.triu_indices(2 * n, 1)
    for _ in range(max_tries):
        X = colour_matrices(rng, n)
        vals = np.sort([c.value for c in collect_candidates(X)])
        if np.diff(vals).min() < gap:
            continue
        _, _, phi = eig_sym(*entries(X))
        th = np.concatenate([phi, phi + np.pi / 2])
        d = np.abs(np.sin(th[:, None] - th[None, :]))[iu][~own[iu]]
        if d.size and d.min() < sep:
            continue
        return X
    raise RuntimeError("could not draw a generic multiset")
