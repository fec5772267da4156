"""Named deterministic sub-streams derived from one root seed.

Every random choice in the package draws from a stream named after the
component making it, so a component can be re-run in isolation and still
reproduce what a full pipeline run would have done.
"""

from __future__ import annotations

import numpy as np

_STREAMS = {
    "sampling": 1,
    "init": 2,
    "clustering": 3,
    "shuffle": 4,
    "bench": 5,
    "retrain": 6,
}


def substream_seed(seed: int, stream: str) -> int:
    """Derive the integer seed of a named sub-stream of ``seed``."""
    return int(np.random.SeedSequence((int(seed), _STREAMS[stream])).generate_state(1)[0])


def substream_rng(seed: int, stream: str) -> np.random.Generator:
    """Generator for a named sub-stream of ``seed``."""
    return np.random.default_rng(np.random.SeedSequence((int(seed), _STREAMS[stream])))
