"""Order-independent random streams.

Every stochastic quantity in robq is drawn from a stream addressed by
``(master_seed, id_1, id_2, ...)``, e.g. ``("mc", sample_index)``.  Streams
are Philox counter-based generators seeded through ``SeedSequence`` spawn
keys, so a draw depends only on its address, never on which thread produced
it or in which order the streams were created.
"""
from __future__ import annotations

import hashlib
import os

import numpy as np

DEFAULT_SEED = 20240117


def _id_to_int(x) -> int:
    if isinstance(x, (bool, np.bool_)):
        return int(x)
    if isinstance(x, (int, np.integer)) and x >= 0:
        return int(x)
    digest = hashlib.blake2b(repr(x).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


class SeededRng:
    def __init__(self, master_seed: int | None = None):
        if master_seed is None:
            master_seed = default_seed()
        self.master_seed = int(master_seed)

    def stream(self, *ids) -> np.random.Generator:
        key = tuple(_id_to_int(i) for i in ids)
        ss = np.random.SeedSequence(entropy=self.master_seed, spawn_key=key)
        return np.random.Generator(np.random.Philox(ss))

    def child(self, *ids) -> "SeededRng":
        """A new master seed derived from this one, for nested experiments."""
        seed = int(self.stream("child", *ids).integers(0, 2**63 - 1))
        return SeededRng(seed)

    def __repr__(self):
        return f"SeededRng({self.master_seed})"


def default_seed() -> int:
    """Seed from ``ROBQ_SEED`` if set, else a fixed default."""
    value = os.environ.get("ROBQ_SEED")
    return int(value) if value else DEFAULT_SEED


def as_rng(rng) -> SeededRng:
    if isinstance(rng, SeededRng):
        return rng
    return SeededRng(rng)
