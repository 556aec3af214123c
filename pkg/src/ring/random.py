import logging
from typing import Literal

import numpy as np
from Crypto.Random import get_random_bytes

from src.exceptions import EntropyUnavailable
from src.ring.arithmetic import RING_DTYPE, RingArray

logger = logging.getLogger(__name__)

EntropyMode = Literal["os", "seeded", "zero"]


class RandomSource:
    """Stream of uniform ring elements.

    ``os`` draws from the operating system, ``seeded`` from a PCG64 stream for
    reproducible runs, and ``zero`` returns only zeros (audit hook for
    checking that the privacy tests notice a broken mask source).
    One source belongs to one party for one session.
    """

    def __init__(self, mode: EntropyMode = "os", seed: int | list[int] | None = None):
        if mode == "seeded" and seed is None:
            raise ValueError("seeded mode needs a seed")
        self.mode = mode
        self._generator = np.random.Generator(np.random.PCG64(seed)) if mode == "seeded" else None

    def __repr__(self) -> str:
        return f"RandomSource(mode={self.mode!r})"

    def _bytes(self, count: int) -> bytes:
        if self.mode == "zero":
            return bytes(count)
        if self.mode == "seeded":
            return self._generator.bytes(count)
        try:
            return get_random_bytes(count)
        except (OSError, NotImplementedError) as exc:
            raise EntropyUnavailable(f"operating-system entropy unavailable: {exc}") from exc

    def sample(self, count: int) -> RingArray:
        if count < 0:
            raise ValueError("count must be non-negative")
        return np.frombuffer(self._bytes(8 * count), dtype=RING_DTYPE).astype(np.uint64)

    def sample_uniform(self) -> int:
        return int(self.sample(1)[0])
