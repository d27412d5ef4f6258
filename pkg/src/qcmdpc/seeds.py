"""Per-instance random streams derived from one master seed.

Every key and every error pattern gets its own stream keyed by
(master seed, code index[, trial index]), so any split of the work across
workers replays exactly the same instances.
"""

import numpy as np

_KEY, _ERROR, _MESSAGE = 0, 1, 2


def key_rng(master: int, code: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master, spawn_key=(_KEY, code)))


def error_rng(master: int, code: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master, spawn_key=(_ERROR, code, trial)))


def message_rng(master: int, code: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master, spawn_key=(_MESSAGE, code, trial)))
