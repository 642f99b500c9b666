"""Deterministic, named random-number streams.

Every random decision in the harness draws from an ``RngStream``, a value
object identified by a 64-bit master seed plus a string stream id (typically
an image id and a step index). Identical ``(master_seed, stream_id)`` pairs
always yield the identical sample sequence; distinct stream ids yield
statistically independent sequences. Streams are derived from their names,
never from shared mutable state, so results do not depend on scheduling.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """A named, reproducible source of randomness.

    ``generator()`` returns a fresh generator seeded from the stream identity,
    so consuming one generator never perturbs another. Callers that need
    several independent draws for one logical item should derive one child
    stream per decision rather than reusing a single generator across steps.
    """

    master_seed: int
    stream_id: str = ""

    def __post_init__(self) -> None:
        if not 0 <= self.master_seed <= _SEED_MASK:
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")

    def seed_sequence(self) -> np.random.SeedSequence:
        # sha256 gives a stable, platform-independent mapping from the stream
        # name to entropy words; SeedSequence decorrelates nearby seeds.
        digest = hashlib.sha256(self.stream_id.encode("utf-8")).digest()
        words = [int.from_bytes(digest[i : i + 8], "little") for i in range(0, 32, 8)]
        return np.random.SeedSequence([self.master_seed, *words])

    def generator(self) -> np.random.Generator:
        """Fresh PCG64 generator for this stream; same stream, same sequence."""
        return np.random.default_rng(self.seed_sequence())

    def child(self, name: str | int) -> "RngStream":
        """Derive a sub-stream, e.g. ``stream.child('fake').child(3)``."""
        suffix = str(name)
        if self.stream_id:
            return RngStream(self.master_seed, f"{self.stream_id}/{suffix}")
        return RngStream(self.master_seed, suffix)
