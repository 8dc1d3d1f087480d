"""
Seed management for reproducible runs.

One master seed expands into named, independent random streams (source
emission, measurement, party bases, Eve, Byzantine robots, ...). A stream's
sequence depends only on the master seed and its own name, so enabling an
adversary does not perturb the honest parties' randomness.
"""

import hashlib
from typing import Dict

import numpy as np

from .logger import get_logger

logger = get_logger(__name__)

MAX_SEED = 2**64 - 1


def stable_stream_id(name: str) -> int:
    """
    Derive a stable 32-bit identifier for a stream name.

    Python's built-in hash() is salted per process, so an MD5 prefix is used.

    Args:
        name: Stream name

    Returns:
        Non-negative integer identifier
    """
    return int(hashlib.md5(name.encode("utf-8")).hexdigest()[:8], 16)


class SeedStreams:
    """
    Named random generators derived from a single master seed.
    """

    def __init__(self, master_seed: int):
        """
        Initialize the stream registry.

        Args:
            master_seed: Master seed in [0, 2**64)

        Raises:
            ValueError: If the seed is out of range
        """
        if not 0 <= master_seed <= MAX_SEED:
            raise ValueError(f"Seed must be in [0, 2**64), got {master_seed}")
        self.master_seed = master_seed
        self._streams: Dict[str, np.random.Generator] = {}

    def stream(self, name: str) -> np.random.Generator:
        """
        Get the generator for a named stream, creating it on first use.

        Args:
            name: Stream name (e.g. 'source', 'bases', 'eve', 'walk:r1')

        Returns:
            numpy Generator dedicated to that stream
        """
        if name not in self._streams:
            sequence = np.random.SeedSequence(
                entropy=self.master_seed, spawn_key=(stable_stream_id(name),)
            )
            self._streams[name] = np.random.default_rng(sequence)
            logger.debug(f"Created random stream '{name}' from master seed {self.master_seed}")
        return self._streams[name]
