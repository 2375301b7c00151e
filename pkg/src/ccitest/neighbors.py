"""Exact 1-nearest-neighbor search in Euclidean norm.

Ties are broken by the smallest stored row index, so results are fully
reproducible even when floating-point distances collide.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

LEAF_SIZE = 16


@dataclass(frozen=True, eq=False)
class NNIndex:
    points: np.ndarray
    # kd-tree over ``points``; node i covers perm[start[i]:end[i]]
    perm: np.ndarray
    start: np.ndarray
    end: np.ndarray
    split_dim: np.ndarray
    split_val: np.ndarray
    left: np.ndarray
    right: np.ndarray

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]


def _as_points(points) -> np.ndarray:
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("point set must be a non-empty 2-D array")
    if not np.all(np.isfinite(pts)):
        raise ValueError("point set contains non-finite entries")
    return pts


def build(points, leaf_size: int = LEAF_SIZE) -> NNIndex:
    """Build a kd-tree index; tiny point sets become a single exhaustive leaf."""
    pts = _as_points(points).copy()
    pts.setflags(write=False)
    m = pts.shape[0]
    perm = np.arange(m, dtype=np.int64)
    start, end, sdim, sval, left, right = [], [], [], [], [], []

    def new_node(lo, hi):
        start.append(lo)
        end.append(hi)
        sdim.append(-1)
        sval.append(0.0)
        left.append(-1)
        right.append(-1)
        return len(start) - 1

    todo = [new_node(0, m)]
    while todo:
        node = todo.pop()
        lo, hi = start[node], end[node]
        if hi - lo <= leaf_size:
            continue
        sub = pts[perm[lo:hi]]
        spread = sub.max(axis=0) - sub.min(axis=0)
        dim = int(np.argmax(spread))
        if spread[dim] == 0.0:
            continue  # all points identical; keep as a leaf
        mid = (hi - lo) // 2
        order = np.argpartition(sub[:, dim], mid, kind="introselect")
        perm[lo:hi] = perm[lo:hi][order]
        sdim[node] = dim
        sval[node] = pts[perm[lo + mid], dim]
        left[node] = new_node(lo, lo + mid)
        right[node] = new_node(lo + mid, hi)
        todo.extend((left[node], right[node]))

    as_i = lambda v: np.asarray(v, dtype=np.int64)  # noqa: E731
    return NNIndex(
        points=pts,
        perm=perm,
        start=as_i(start),
        end=as_i(end),
        split_dim=as_i(sdim),
        split_val=np.asarray(sval, dtype=np.float64),
        left=as_i(left),
        right=as_i(right),
    )


@numba.njit(cache=True)
def _query(points, perm, start, end, split_dim, split_val, left, right, queries):
    nq, d = queries.shape
    out_idx = np.empty(nq, dtype=np.int64)
    out_d2 = np.empty(nq, dtype=np.float64)
    stack_node = np.empty(256, dtype=np.int64)
    stack_bound = np.empty(256, dtype=np.float64)
    for qi in range(nq):
        best = np.inf
        best_i = -1
        top = 1
        stack_node[0] = 0
        stack_bound[0] = 0.0
        while top > 0:
            top -= 1
            node = stack_node[top]
            bound = stack_bound[top]
            # strict test: a subtree that can only tie is still visited
            if bound > best:
                continue
            dim = split_dim[node]
            if dim < 0:
                for k in range(start[node], end[node]):
                    i = perm[k]
                    acc = 0.0
                    for j in range(d):
                        diff = queries[qi, j] - points[i, j]
                        acc += diff * diff
                    if acc < best or (acc == best and i < best_i):
                        best = acc
                        best_i = i
                continue
            diff = queries[qi, dim] - split_val[node]
            if diff < 0.0:
                near = left[node]
                far = right[node]
            else:
                near = right[node]
                far = left[node]
            stack_node[top] = far
            stack_bound[top] = max(bound, diff * diff)
            stack_node[top + 1] = near
            stack_bound[top + 1] = bound
            top += 2
        out_idx[qi] = best_i
        out_d2[qi] = best
    return out_idx, out_d2


def nearest_many(index: NNIndex, queries) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`nearest`: returns ``(indices, distances)``."""
    q = np.ascontiguousarray(queries, dtype=np.float64)
    if q.ndim == 1:
        q = q.reshape(-1, 1) if index.dim == 1 else q.reshape(1, -1)
    if q.ndim != 2 or q.shape[1] != index.dim:
        raise ValueError(
            f"query dimension {q.shape[-1]} does not match index dimension {index.dim}"
        )
    idx, d2 = _query(
        index.points, index.perm, index.start, index.end,
        index.split_dim, index.split_val, index.left, index.right, q,
    )
    return idx, np.sqrt(d2)


def nearest(index: NNIndex, query) -> tuple[int, float]:
    q = np.asarray(query, dtype=np.float64).reshape(-1)
    if q.shape[0] != index.dim:
        raise ValueError(
            f"query dimension {q.shape[0]} does not match index dimension {index.dim}"
        )
    idx, dist = nearest_many(index, q.reshape(1, -1))
    return int(idx[0]), float(dist[0])


def nearest_bruteforce(points, query) -> tuple[int, float]:
    """Exhaustive scan with the same tie rule; the verification oracle."""
    pts = _as_points(points)
    q = np.asarray(query, dtype=np.float64).reshape(-1)
    if q.shape[0] != pts.shape[1]:
        raise ValueError(
            f"query dimension {q.shape[0]} does not match point dimension {pts.shape[1]}"
        )
    # coordinate-by-coordinate accumulation, no pairwise summation
    acc = np.zeros(pts.shape[0])
    for j in range(pts.shape[1]):
        acc += (q[j] - pts[:, j]) ** 2
    i = int(np.argmin(acc))  # first minimum = lowest index
    return i, float(np.sqrt(acc[i]))
