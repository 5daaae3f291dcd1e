"""Seeded randomness with one independent substream per actor.

Each stream is keyed by (scenario seed, actor name), so inserting or
reordering commands that touch other actors never shifts the draws an
actor sees. Streams are created lazily and cached.
"""

from __future__ import annotations

import hashlib
import random


class ScenarioRng:
    def __init__(self, seed: int):
        self.seed = seed & (2 ** 64 - 1)
        self._streams: dict[str, random.Random] = {}

    def stream(self, name: str) -> random.Random:
        rng = self._streams.get(name)
        if rng is None:
            digest = hashlib.sha256(f"{self.seed}:{name}".encode("utf-8")).digest()
            rng = random.Random(int.from_bytes(digest[:16], "big"))
            self._streams[name] = rng
        return rng
