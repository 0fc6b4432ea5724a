"""Deterministic named random streams.

Every random draw in the toolkit comes from a stream identified by a
(seed, name) pair. The pair is hashed into a 128-bit Philox key, so
streams are independent of each other and of draw order elsewhere in
the program. Same pair, same platform, same numpy: identical values.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np


def stream(seed: int, name: str) -> np.random.Generator:
    """Return the generator for one named stream.

    seed is taken mod 2**64; name is any UTF-8 string.
    """
    raw = struct.pack("<Q", seed & 0xFFFFFFFFFFFFFFFF) + name.encode("utf-8")
    digest = hashlib.sha256(raw).digest()
    key = int.from_bytes(digest[:16], "little")
    return np.random.Generator(np.random.Philox(key=key))


def normal(seed: int, name: str, shape: tuple[int, ...]) -> np.ndarray:
    """Standard normals, float32, drawn from stream(seed, name)."""
    return stream(seed, name).standard_normal(size=shape, dtype=np.float32)
