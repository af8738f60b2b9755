"""
Counter-based random streams

Every random draw in a simulation comes from a Philox generator keyed by
``(seed, trial index, purpose, attempt)``, so a trial produces the same
numbers whichever worker runs it and in whatever order.
"""
import enum

import numpy as np


class Purpose(enum.IntEnum):
    BASE_STATIONS = 0
    USERS = 1
    AREA_PROBES = 2
    LOAD = 3
    FADING = 4


def stream(seed, index=0, purpose=Purpose.BASE_STATIONS, attempt=0):
    sequence = np.random.SeedSequence(
        entropy=int(seed), spawn_key=(int(index), int(purpose), int(attempt))
    )
    return np.random.Generator(np.random.Philox(sequence))


def as_generator(seed):
    """
    Accept a generator, an integer seed or a full stream key tuple
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, tuple):
        return stream(*seed)
    return stream(seed)
