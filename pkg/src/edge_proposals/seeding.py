"""
Seed handling. One run seed expands into independent per-stage streams keyed
by stage name, so adding a stage never shifts the draws of another.

All randomness in the package goes through `make_rng`, which returns a numpy
PCG64 generator (stable output across platforms and numpy releases).
"""

from __future__ import annotations

import zlib
from typing import Optional

import numpy as np


def _stage_key(stage: str) -> int:
    return zlib.crc32(stage.encode("utf-8"))


def derive_seed(seed: int, stage: str) -> int:
    """Deterministic 64-bit sub-seed for `stage` under the run `seed`."""
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=(_stage_key(stage),))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int, stage: Optional[str] = None) -> np.random.Generator:
    if stage is None:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))
    return np.random.Generator(np.random.PCG64(derive_seed(seed, stage)))
