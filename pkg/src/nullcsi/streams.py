"""Seeded, splittable random streams.

Every stochastic routine takes an explicit ``numpy.random.Generator``. The
generators built here sit on the counter-based Philox bit generator, and
splitting goes through ``SeedSequence.spawn`` so that children are
statistically independent and reproducible from the master seed alone.
"""

import numpy as np


def make_stream(seed, spawn_key=()):
    """Generator for `seed`, optionally addressed by a spawn key."""
    return stream_from(np.random.SeedSequence(seed, spawn_key=tuple(spawn_key)))


def stream_from(seed_seq):
    return np.random.Generator(np.random.Philox(seed_seq))


def split(rng, n):
    """`n` independent child seed sequences of `rng`.

    Children are returned as seed sequences rather than generators so a
    caller can rebuild an identical child stream more than once.
    """
    return rng.bit_generator.seed_seq.spawn(n)


def trial_stream(master_seed, index):
    """Stream of trial `index` under `master_seed`.

    Trial streams depend only on ``(master_seed, index)``, so the same trial
    sees the same channel draws at every point of a sweep.
    """
    return make_stream(master_seed, (index,))


def seed_label(rng):
    ss = rng.bit_generator.seed_seq
    return f"{ss.entropy}:{'.'.join(str(k) for k in ss.spawn_key)}"
