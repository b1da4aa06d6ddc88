"""Brute-force stochastic checks of the closed-form noise results.

Every simulation draws from its own numpy ``SeedSequence`` stream, keyed by
the user seed and a fixed purpose code, so runs are reproducible and
parallel oracles never share random numbers.
"""

import numpy as np

PURPOSES = {
    "scatter": 1,
    "absorb": 2,
    "directions": 3,
    "ladder": 4,
    "modulated": 5,
    "calibration": 6,
}


def seed_sequence(seed, purpose, *index):
    """Child seed sequence for ``purpose`` (and an optional sub-index)."""
    return np.random.SeedSequence(int(seed), spawn_key=(PURPOSES[purpose], *index))


def rng_for(seed, purpose, *index):
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, purpose, *index)))
