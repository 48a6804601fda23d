"""Per-image random streams independent of scheduling order."""

from __future__ import annotations

import numpy as np


def derive_seed(global_seed: int, index: int) -> int:
    """Deterministic 63-bit seed for image ``index`` of a run seeded with ``global_seed``."""
    state = np.random.SeedSequence([global_seed, index]).generate_state(2, dtype=np.uint32)
    return (int(state[0]) << 31) ^ int(state[1])
