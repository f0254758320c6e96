"""Counter-based random streams keyed by (master seed, indices).

A stream depends only on its key, never on how many other streams were drawn
before it, so trials can run in any order or on any worker.
"""

import numpy as np

MAX_SEED = 2**64 - 1


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be in [0, 2**64), got {seed}")
    return seed


def stream(master_seed: int, *key: int) -> np.random.Generator:
    """Philox generator for ``(master_seed, *key)``."""
    ss = np.random.SeedSequence(check_seed(master_seed), spawn_key=tuple(int(x) for x in key))
    return np.random.Generator(np.random.Philox(ss))


def fresh_seed() -> int:
    return int(np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0])
