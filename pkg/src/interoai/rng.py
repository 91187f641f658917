"""Deterministic random streams.

Every source of randomness in the package is a Philox (counter-based)
generator keyed by (master seed, run id, purpose tag).  Runs therefore draw
from disjoint, order-independent streams: a sweep produces the same bytes
whether its runs execute serially or in parallel.
"""

from __future__ import annotations

import zlib

import numpy as np


def stream(master_seed: int, run_id: int = 0, purpose: str = "") -> np.random.Generator:
    """Return the generator for one (seed, run, purpose) triple."""
    tag = zlib.crc32(purpose.encode("utf-8"))
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(run_id), tag))
    return np.random.Generator(np.random.Philox(seq))
