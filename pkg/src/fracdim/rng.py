"""Counter-based splittable random streams.

Every stochastic operation draws from ``stream(seed, stream_id)``, so results
are reproducible per seed and independent of evaluation order.  There is no
global RNG state anywhere in the package.
"""

import numpy as np


def stream(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Return the Philox generator for ``(seed, stream_id)``.

    Distinct stream ids give statistically independent streams; the same pair
    always reproduces the same draws.  Seeds are folded into 64 bits.
    """
    ss = np.random.SeedSequence(int(seed) % (1 << 64), spawn_key=(int(stream_id),))
    return np.random.Generator(np.random.Philox(ss))
