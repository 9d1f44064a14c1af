"""Deterministic random-number streams.

Every stochastic component draws from a PCG64 generator derived from the run
seed plus an explicit integer path, e.g. ``stream(seed, TRAJECTORY, trial,
step)``. Streams are independent of execution order and thread count, which
is what makes trajectories bit-reproducible: the same (seed, path) always
yields the same generator state.
"""

import numpy as np

# top-level stream purposes
TRAJECTORY = 0
VQE = 1
THETA_INIT = 2
BENCH = 3


def stream(seed: int, *path: int) -> np.random.Generator:
    """Return the generator addressed by ``(seed, *path)``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, path)]))
