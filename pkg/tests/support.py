"""Random generators shared across the test modules.

Everything takes an explicit ``numpy.random.Generator`` so the test seeds
stay in one place (the ``rng`` fixture in conftest).
"""

import numpy as np

from majorize import Experiment

# supported entries are kept far above the support floor so that support
# patterns survive normalization, products and small stochastic mixing
LOW_ENTRY = 0.05

REGIMES = ("equal", "dichotomy", "dominating", "minimal")


def unit_columns(rng, masks, low=LOW_ENTRY):
    """Random unit-norm columns with the prescribed boolean supports."""
    n_rows, n_cols = masks.shape
    m = np.zeros((n_rows, n_cols))
    for k in range(n_cols):
        idx = np.flatnonzero(masks[:, k])
        if idx.size == 0:
            raise ValueError("every column needs a nonempty support")
        vals = rng.uniform(low, 1.0, idx.size)
        m[idx, k] = vals / vals.sum()
    return m


def regime_masks(rng, n_rows, n_cols, regime):
    """Support masks guaranteed to classify into the requested regime.

    "equal": all columns share one support.
    "dichotomy": two columns, the first support properly inside the second.
    "dominating": the last support contains the others, which are pairwise
    incomparable (needs n_cols >= 3 to stay out of the dichotomy case).
    "minimal": pairwise incomparable supports sharing row 0.
    "generic": random supports sharing row 0; regime left to chance.
    """
    if regime == "equal":
        col = rng.random(n_rows) < 0.7
        col[0] = True
        return np.tile(col[:, None], (1, n_cols))
    if regime == "dichotomy":
        if n_cols != 2:
            raise ValueError("a dichotomy has exactly two columns")
        masks = np.ones((n_rows, 2), dtype=bool)
        masks[:, 0] = rng.random(n_rows) < 0.6
        masks[0, 0] = True
        masks[1, 0] = False  # proper containment
        return masks
    if regime == "dominating":
        if n_cols < 3 or n_rows < n_cols:
            raise ValueError("need n_cols >= 3 and at least as many rows")
        masks = rng.random((n_rows, n_cols)) < 0.6
        masks[:, -1] = True
        masks[0, :] = True
        for k in range(n_cols - 1):
            # row k + 1 is a private tag of column k among the non-dominating
            masks[1 + k, : n_cols - 1] = False
            masks[1 + k, k] = True
        return masks
    if regime == "minimal":
        if n_rows < n_cols + 1:
            raise ValueError("need a private row per column plus a shared one")
        masks = rng.random((n_rows, n_cols)) < 0.5
        masks[0, :] = True
        for k in range(n_cols):
            masks[1 + k, :] = False
            masks[1 + k, k] = True
        return masks
    if regime == "generic":
        masks = rng.random((n_rows, n_cols)) < 0.6
        masks[0, :] = True
        return masks
    raise ValueError(f"unknown regime {regime!r}")


def random_experiment(rng, n_rows, n_cols, regime, low=LOW_ENTRY):
    masks = regime_masks(rng, n_rows, n_cols, regime)
    return Experiment.from_matrix(unit_columns(rng, masks, low))


def dyadic_experiment(rng, n_rows, n_cols, denom=64, masks=None):
    """Unit-norm columns whose entries are exact multiples of 1/denom."""
    if masks is None:
        masks = np.ones((n_rows, n_cols), dtype=bool)
    m = np.zeros((n_rows, n_cols))
    for k in range(n_cols):
        idx = np.flatnonzero(masks[:, k])
        counts = np.ones(idx.size, dtype=int)
        extra = rng.multinomial(denom - idx.size, np.full(idx.size, 1.0 / idx.size))
        m[idx, k] = (counts + extra) / denom
    return Experiment.from_matrix(m)


def random_stochastic(rng, n_out, n_in, density=1.0):
    """Column-stochastic (n_out, n_in) matrix; density < 1 zeroes entries."""
    t = rng.gamma(1.0, 1.0, (n_out, n_in))
    if density < 1.0:
        keep = rng.random((n_out, n_in)) < density
        for j in range(n_in):
            if not keep[:, j].any():
                keep[rng.integers(n_out), j] = True
        t = np.where(keep, t, 0.0)
    return t / t.sum(axis=0)


def interior_stochastic(rng, n_out, n_in, low=0.1):
    """Column-stochastic matrix with every entry at least ``low / n_out``."""
    t = rng.uniform(low, 1.0, (n_out, n_in))
    return t / t.sum(axis=0)


def doubly_stochastic(rng, n, terms=6):
    """Random convex combination of permutation matrices."""
    weights = rng.dirichlet(np.ones(terms))
    d = np.zeros((n, n))
    for w in weights:
        d += w * np.eye(n)[rng.permutation(n)]
    return d


def gibbs_stochastic(rng, gamma, steps=12):
    """Column-stochastic matrix fixing ``gamma``, composed from two-state
    partial swaps that each preserve it (detailed balance)."""
    n = gamma.size
    t = np.eye(n)
    for _ in range(steps):
        i, j = rng.choice(n, size=2, replace=False)
        a = rng.uniform(0.0, min(1.0, gamma[j] / gamma[i]))
        b = a * gamma[i] / gamma[j]
        e = np.eye(n)
        e[i, i] = 1.0 - a
        e[j, i] = a
        e[j, j] = 1.0 - b
        e[i, j] = b
        t = e @ t
    return t
