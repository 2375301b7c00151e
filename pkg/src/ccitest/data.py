"""Datasets, column layout and the splitting steps of the test pipeline.

A :class:`Dataset` always stores its columns as ``[X | Y | Z]``.  Every
function here is a pure function of its inputs and an explicit seed.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np


class DataError(ValueError):
    """Raised for malformed input data or violated data preconditions."""


@dataclass(frozen=True)
class DimSpec:
    d_x: int
    d_y: int
    d_z: int

    def __post_init__(self):
        for name in ("d_x", "d_y", "d_z"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise DataError(f"{name} must be a positive integer, got {v!r}")

    @property
    def width(self) -> int:
        return self.d_x + self.d_y + self.d_z

    @property
    def x_slice(self) -> slice:
        return slice(0, self.d_x)

    @property
    def y_slice(self) -> slice:
        return slice(self.d_x, self.d_x + self.d_y)

    @property
    def z_slice(self) -> slice:
        return slice(self.d_x + self.d_y, self.width)


@dataclass(frozen=True, eq=False)
class Dataset:
    """An ``n x (d_x + d_y + d_z)`` matrix of finite reals."""

    rows: np.ndarray
    dims: DimSpec

    def __post_init__(self):
        rows = np.array(self.rows, dtype=np.float64, copy=True)
        if rows.ndim == 1 and rows.size == 0:
            rows = rows.reshape(0, self.dims.width)
        if rows.ndim != 2 or rows.shape[1] != self.dims.width:
            raise DataError(
                f"expected {self.dims.width} columns, got shape {rows.shape}"
            )
        if not np.all(np.isfinite(rows)):
            raise DataError("dataset contains non-finite values")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    def __len__(self) -> int:
        return self.rows.shape[0]

    @property
    def x(self) -> np.ndarray:
        return self.rows[:, self.dims.x_slice]

    @property
    def y(self) -> np.ndarray:
        return self.rows[:, self.dims.y_slice]

    @property
    def z(self) -> np.ndarray:
        return self.rows[:, self.dims.z_slice]

    def take(self, idx) -> "Dataset":
        return Dataset(self.rows[np.asarray(idx, dtype=np.intp)], self.dims)

    @classmethod
    def from_blocks(cls, x, y, z) -> "Dataset":
        x, y, z = (np.asarray(a, dtype=np.float64) for a in (x, y, z))
        x, y, z = (a.reshape(-1, 1) if a.ndim == 1 else a for a in (x, y, z))
        dims = DimSpec(x.shape[1], y.shape[1], z.shape[1])
        return cls(np.hstack([x, y, z]), dims)


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        feats = np.array(self.features, dtype=np.float64, copy=True)
        labels = np.array(self.labels, copy=True).astype(np.int8)
        if feats.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {feats.shape}")
        if feats.shape[0] != labels.shape[0]:
            raise DataError(
                f"{feats.shape[0]} feature rows but {labels.shape[0]} labels"
            )
        if not np.all((labels == 0) | (labels == 1)):
            raise DataError("labels must be 0 or 1")
        if not np.all(np.isfinite(feats)):
            raise DataError("features contain non-finite values")
        feats.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class Partition3:
    u1: Dataset
    u2: Dataset
    u3: Dataset
    discarded: int
    # row indices into the input, in the order they appear in each part
    indices: tuple = field(default=(), repr=False)


# ---------------------------------------------------------------------------
# CSV ingestion

_RANGE = re.compile(r"^(\d+)\.\.(\d+)$")


def _resolve_block(spec: str | Sequence, header: list[str]) -> list[int]:
    if isinstance(spec, str):
        tokens = [t.strip() for t in spec.split(",") if t.strip()]
    else:
        tokens = list(spec)
    cols: list[int] = []
    for tok in tokens:
        if isinstance(tok, (int, np.integer)):
            cols.append(int(tok))
            continue
        m = _RANGE.match(tok)
        if m:
            lo, hi = int(m.group(1)), int(m.group(2))
            if hi < lo:
                raise DataError(f"empty column range {tok!r}")
            cols.extend(range(lo, hi + 1))
        elif tok in header:
            cols.append(header.index(tok))
        elif tok.isdigit():
            cols.append(int(tok))
        else:
            raise DataError(f"unknown column {tok!r}")
    for c in cols:
        if not 0 <= c < len(header):
            raise DataError(f"column index {c} out of range (0..{len(header) - 1})")
    return cols


def resolve_colspec(colspec: dict, header: list[str]) -> tuple[list[int], list[int], list[int]]:
    """Turn ``{"x": ..., "y": ..., "z": ...}`` into column index lists."""
    blocks = []
    for key in ("x", "y", "z"):
        if key not in colspec:
            raise DataError(f"colspec is missing the {key!r} block")
        cols = _resolve_block(colspec[key], header)
        if not cols:
            raise DataError(f"empty assignment for block {key!r}")
        if len(set(cols)) != len(cols):
            raise DataError(f"overlapping assignment within block {key!r}")
        blocks.append(cols)
    seen: dict[int, str] = {}
    for key, cols in zip("xyz", blocks):
        for c in cols:
            if c in seen:
                raise DataError(
                    f"overlapping assignment: column {header[c]!r} is in both "
                    f"{seen[c]} and {key}"
                )
            seen[c] = key
    return blocks[0], blocks[1], blocks[2]


def parse_colspec(text: str) -> dict:
    """Parse ``"x=a;y=b;z=c,e"`` style strings into a colspec dict."""
    out = {}
    for part in text.split(";"):
        if not part.strip():
            continue
        key, _, val = part.partition("=")
        out[key.strip().lower()] = val.strip()
    return out


def read_table(path: str | Path) -> tuple[list[str], np.ndarray]:
    """Read a headed CSV of finite reals into ``(header, matrix)``."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(header):
                raise DataError(
                    f"{path}:{lineno}: expected {len(header)} fields, got {len(rec)}"
                )
            rows.append(rec)
    mat = np.empty((len(rows), len(header)), dtype=np.float64)
    for i, rec in enumerate(rows):
        for j, cell in enumerate(rec):
            mat[i, j] = _parse_cell(cell, path, i + 2, header[j])
    return header, mat


def _parse_cell(cell: str, path, lineno: int, column: str) -> float:
    try:
        v = float(cell)
    except ValueError:
        raise DataError(
            f"{path}:{lineno}: column {column!r}: cannot parse {cell!r} as a number"
        ) from None
    if not math.isfinite(v):
        raise DataError(
            f"{path}:{lineno}: column {column!r}: non-finite value {cell!r}"
        )
    return v


def load_csv(path: str | Path, colspec: dict) -> Dataset:
    """Load a CSV and reorder the assigned columns into ``[X|Y|Z]`` blocks.

    ``colspec`` maps ``"x"``, ``"y"``, ``"z"`` to header names or zero-based
    index ranges, e.g. ``{"x": "a", "y": "b", "z": "2..4"}``.  Columns that
    are not assigned are dropped.  Only the assigned columns are parsed.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        xs, ys, zs = resolve_colspec(colspec, header)
        cols = xs + ys + zs
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(header):
                raise DataError(
                    f"{path}:{lineno}: expected {len(header)} fields, got {len(rec)}"
                )
            rows.append([_parse_cell(rec[c], path, lineno, header[c]) for c in cols])
    mat = np.asarray(rows, dtype=np.float64).reshape(len(rows), len(cols))
    return Dataset(mat, DimSpec(len(xs), len(ys), len(zs)))


# ---------------------------------------------------------------------------
# pipeline steps


def partition3(ds: Dataset, seed) -> Partition3:
    """Shuffle and cut into three equal parts; ``n mod 3`` rows are dropped."""
    n = len(ds)
    if n < 3:
        raise DataError(f"need at least 3 rows to partition, got {n}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    m = n // 3
    parts = (perm[:m], perm[m : 2 * m], perm[2 * m : 3 * m])
    return Partition3(
        u1=ds.take(parts[0]),
        u2=ds.take(parts[1]),
        u3=ds.take(parts[2]),
        discarded=n - 3 * m,
        indices=parts,
    )


def make_labeled(u1: Dataset, u2_prime: Dataset) -> LabeledDataset:
    """Label rows of ``u1`` with 1 and rows of ``u2_prime`` with 0."""
    if u1.dims != u2_prime.dims:
        raise DataError(f"dimension mismatch: {u1.dims} vs {u2_prime.dims}")
    if len(u1) != len(u2_prime):
        raise DataError(f"size mismatch: {len(u1)} vs {len(u2_prime)}")
    feats = np.vstack([u1.rows, u2_prime.rows])
    labels = np.concatenate(
        [np.ones(len(u1), dtype=np.int8), np.zeros(len(u2_prime), dtype=np.int8)]
    )
    return LabeledDataset(feats, labels)


def split_train_test(d: LabeledDataset, seed) -> tuple[LabeledDataset, LabeledDataset]:
    """Stratified 50/50 split: each half gets half of each class.

    Rows keep their relative input order within each half.
    """
    m = len(d)
    if m % 2:
        raise DataError(f"cannot split an odd number of rows ({m})")
    rng = np.random.default_rng(seed)
    train_idx = []
    for cls in (1, 0):
        idx = np.flatnonzero(d.labels == cls)
        if idx.size % 2:
            raise DataError(f"odd count ({idx.size}) for label {cls}")
        train_idx.append(rng.permutation(idx)[: idx.size // 2])
    mask = np.zeros(m, dtype=bool)
    mask[np.concatenate(train_idx)] = True
    train = LabeledDataset(d.features[mask], d.labels[mask])
    test = LabeledDataset(d.features[~mask], d.labels[~mask])
    return train, test


def drop_x(d: LabeledDataset, dims: DimSpec) -> LabeledDataset:
    """Project features onto the ``[Y|Z]`` blocks."""
    if d.width != dims.width:
        raise DataError(f"feature width {d.width} does not match {dims}")
    return LabeledDataset(d.features[:, dims.d_x :], d.labels)
