"""Nearest-neighbor bootstrap.

Each row ``(x, y, z)`` of ``u1`` is paired with the row of ``u2`` whose Z is
closest to ``z`` and emitted as ``(x, y', z)``.  The output approximates
draws from ``f(x|z) f(y|z) f(z)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import DataError, Dataset
from .neighbors import build, nearest_many


@dataclass(frozen=True, eq=False)
class BootstrapOutput:
    u2_prime: Dataset
    # row i of u2_prime came from u1 row source_map[i, 0] and took the Y of
    # u2 row source_map[i, 1]
    source_map: np.ndarray
    nn_distance: np.ndarray

    def shared_neighbor_fraction(self) -> float:
        """Fraction of output rows whose borrowed Y is also borrowed elsewhere."""
        if len(self.source_map) == 0:
            return 0.0
        _, inv, counts = np.unique(
            self.source_map[:, 1], return_inverse=True, return_counts=True
        )
        return float(np.mean(counts[inv] > 1))


def datagen(u1: Dataset, u2: Dataset) -> BootstrapOutput:
    if u1.dims != u2.dims:
        raise DataError(f"dimension mismatch: {u1.dims} vs {u2.dims}")
    if len(u2) == 0:
        raise DataError("u2 must contain at least one row")
    rows = u1.rows.copy()
    if len(u1):
        nn, dist = nearest_many(build(u2.z), u1.z)
        rows[:, u1.dims.y_slice] = u2.y[nn]
    else:
        nn = np.empty(0, dtype=np.int64)
        dist = np.empty(0)
    source_map = np.column_stack([np.arange(len(u1), dtype=np.int64), nn])
    return BootstrapOutput(Dataset(rows, u1.dims), source_map, dist)


def empirical_fci_oracle(n: int, generator, seed) -> Dataset:
    """Exact draws from the conditionally independent factorisation.

    ``generator`` must provide ``sample_z(n, rng)``, ``sample_x_given_z(z, rng)``
    and ``sample_y_given_z(z, rng)``; x and y are drawn independently given z.
    """
    rng = np.random.default_rng(seed)
    z = generator.sample_z(n, rng)
    x = generator.sample_x_given_z(z, rng)
    y = generator.sample_y_given_z(z, rng)
    return Dataset.from_blocks(x, y, z)
