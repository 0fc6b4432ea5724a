"""Deterministic sample grids.

Cell i draws its latent from the stream (seed, "sample.{i}"), so a grid
is uncurated by construction and any cell can be reproduced alone. The
grid seed doubles as the noise seed for every cell.

Layout: each cell is the model resolution R plus a 2 px black border on
every side, so a count x columns grid is rows*(R+4) tall and
columns*(R+4) wide, rows = ceil(count/columns). Unused trailing cells
stay black.
"""

from __future__ import annotations

import numpy as np

from . import rng
from .checkpoint import Checkpoint
from .errors import ConfigError
from .generator import NoiseSpec, forward

BORDER = 2


def sample_z(ckpt: Checkpoint, seed: int, index: int) -> np.ndarray:
    return rng.normal(seed, f"sample.{index}", (ckpt.meta.latent_dim,))


def render_cell(ckpt: Checkpoint, seed: int, index: int) -> np.ndarray:
    return forward(ckpt, sample_z(ckpt, seed, index), NoiseSpec(seed))


def render_grid(ckpt: Checkpoint, seed: int, count: int, columns: int) -> np.ndarray:
    """[3, rows*(R+4), columns*(R+4)] image, values in [-1, 1]."""
    if count < 1:
        raise ConfigError(f"count must be >= 1, got {count}")
    if columns < 1:
        raise ConfigError(f"columns must be >= 1, got {columns}")
    res = ckpt.meta.max_resolution
    cell = res + 2 * BORDER
    rows = (count + columns - 1) // columns
    canvas = np.full((3, rows * cell, columns * cell), -1.0, dtype=np.float32)
    for i in range(count):
        r, c = divmod(i, columns)
        img = np.clip(render_cell(ckpt, seed, i), -1.0, 1.0)
        y = r * cell + BORDER
        x = c * cell + BORDER
        canvas[:, y : y + res, x : x + res] = img
    return canvas
