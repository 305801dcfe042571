"""Counter-based randomness with a fixed block layout.

Reproducibility contract (fixed across releases): path indices are
partitioned into blocks of ``BLOCK_PATHS``; block ``b`` of master seed
``s`` draws from an independent Philox stream keyed by the pair
``(s mod 2^64, b)``. Uniforms for a block are laid out as a C-ordered
``(rows, slots)`` array, one row per path, so a path consumes a fixed
slice of its block's stream regardless of how many paths are requested,
which worker evaluates the block, or the order blocks are scheduled.
All variates are inverse-CDF or Box-Muller transforms of these uniforms;
nothing uses rejection sampling, so stream positions never drift.
"""

from __future__ import annotations

import math
from typing import Iterator

import numpy as np

BLOCK_PATHS = 4096

_MASK64 = (1 << 64) - 1


def block_key(seed: int, block: int) -> np.ndarray:
    """128-bit Philox key for (master seed, block index)."""
    return np.array([seed & _MASK64, block & _MASK64], dtype=np.uint64)


def uniform_block(seed: int, block: int, rows: int, slots: int) -> np.ndarray:
    """Uniforms in [0, 1) for one block, shape (rows, slots), C-order fill."""
    gen = np.random.Generator(np.random.Philox(key=block_key(seed, block)))
    return gen.random((rows, slots))


def block_ranges(paths: int) -> Iterator[tuple[int, int]]:
    """Yield (block_index, rows) covering ``paths`` paths in fixed blocks."""
    full, rem = divmod(paths, BLOCK_PATHS)
    for b in range(full):
        yield b, BLOCK_PATHS
    if rem:
        yield full, rem


# --------------------------------------------------------------------------
# Inverse-CDF / Box-Muller transforms (u in [0, 1); 1-u keeps logs finite)
# --------------------------------------------------------------------------

def rademacher(u: np.ndarray) -> np.ndarray:
    """Map uniforms to +-1 with equal probability."""
    return np.where(u < 0.5, -1.0, 1.0)


def pareto(u: np.ndarray, p: float, scale: float = 1.0) -> np.ndarray:
    """Pareto radius with survival (scale/t)^p for t >= scale."""
    return scale * (1.0 - u) ** (-1.0 / p)


def weibull_like(u: np.ndarray, alpha: float) -> np.ndarray:
    """Radius with survival exp(-t^c), c = 2*alpha/(1-alpha)."""
    inv_c = (1.0 - alpha) / (2.0 * alpha)
    return (-np.log1p(-u)) ** inv_c


def standard_normals(u: np.ndarray) -> np.ndarray:
    """Box-Muller on an even last axis: consumes pairs, returns same shape."""
    if u.shape[-1] % 2:
        raise ValueError("Box-Muller needs an even number of uniform slots")
    half = u.shape[-1] // 2
    r = np.sqrt(-2.0 * np.log1p(-u[..., :half]))
    theta = (2.0 * math.pi) * u[..., half:]
    out = np.empty_like(u)
    out[..., :half] = r * np.cos(theta)
    out[..., half:] = r * np.sin(theta)
    return out
