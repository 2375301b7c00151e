"""ROC AUC, histogram total-variation estimates and the bootstrap TV bound."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EXACT_AUC_LIMIT = 10_000


def roc_auc(scores, labels) -> float:
    """Probability that a random positive outscores a random negative.

    Ties count one half.  Uses exact pairwise counting up to
    ``EXACT_AUC_LIMIT`` points and the average-rank (Mann-Whitney) identity
    above that.
    """
    s = np.asarray(scores, dtype=np.float64).reshape(-1)
    y = np.asarray(labels).reshape(-1)
    if s.shape != y.shape:
        raise ValueError(f"{s.size} scores but {y.size} labels")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be 0 or 1")
    pos, neg = s[y == 1], s[y == 0]
    if pos.size == 0 or neg.size == 0:
        raise ValueError("roc_auc needs both classes")
    if s.size <= EXACT_AUC_LIMIT:
        neg_sorted = np.sort(neg)
        below = np.searchsorted(neg_sorted, pos, side="left")
        upto = np.searchsorted(neg_sorted, pos, side="right")
        # twice the credit keeps everything integral until the final division
        credit2 = int(np.sum(2 * below + (upto - below)))
        return credit2 / (2 * pos.size * neg.size)
    ranks = _average_ranks(s)
    u = ranks[y == 1].sum() - pos.size * (pos.size + 1) / 2.0
    return float(u / (pos.size * neg.size))


def _average_ranks(a: np.ndarray) -> np.ndarray:
    order = np.argsort(a, kind="mergesort")
    sa = a[order]
    boundaries = np.flatnonzero(np.r_[True, sa[1:] != sa[:-1], True])
    ranks = np.empty(a.size)
    for lo, hi in zip(boundaries[:-1], boundaries[1:]):
        ranks[order[lo:hi]] = 0.5 * (lo + 1 + hi)
    return ranks


def tv_histogram_estimate(sa, sb, bins_per_dim: int = 32) -> float:
    """Plug-in TV distance between two samples on a shared uniform grid."""
    a = np.asarray(sa, dtype=np.float64)
    b = np.asarray(sb, dtype=np.float64)
    a = a.reshape(-1, 1) if a.ndim == 1 else a
    b = b.reshape(-1, 1) if b.ndim == 1 else b
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise ValueError("both samples must be non-empty")
    if a.shape[1] != b.shape[1]:
        raise ValueError("samples must have the same dimension")
    d = a.shape[1]
    if d > 2:
        raise ValueError(f"histogram TV is limited to d <= 2, got d={d}")
    both = np.vstack([a, b])
    lo, hi = both.min(axis=0), both.max(axis=0)
    hi = np.where(hi > lo, hi, lo + 1.0)
    edges = [np.linspace(lo[j], hi[j], bins_per_dim + 1) for j in range(d)]
    ha, _ = np.histogramdd(a, bins=edges)
    hb, _ = np.histogramdd(b, bins=edges)
    return float(0.5 * np.abs(ha / a.shape[0] - hb / b.shape[0]).sum())


# ---------------------------------------------------------------------------
# bound on d_TV(bootstrap sample, f^CI)


@dataclass(frozen=True)
class TVBoundParams:
    """Smoothness constants for :func:`theorem1_bound`.

    ``beta``: curvature bound on ``f(y|z)``; ``c3``: bound on
    ``int f(z)^(1-1/d) dz``; ``c_d``: Hessian norm bound of ``f(z)``;
    ``eps``: the slack radius.  ``g_breaks`` / ``g_values`` tabulate the
    low-density mass ``G(delta) = P(f(Z) <= delta)``, interpolated linearly and
    held constant outside the table.
    """

    beta: float
    c3: float
    c_d: float
    eps: float
    g_breaks: tuple = (0.0,)
    g_values: tuple = (0.0,)

    def __post_init__(self):
        if not self.beta >= 0:
            raise ValueError("beta must be nonnegative")
        for name in ("c3", "c_d", "eps"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        br = np.asarray(self.g_breaks, dtype=float)
        gv = np.asarray(self.g_values, dtype=float)
        if br.shape != gv.shape or br.ndim != 1 or br.size == 0:
            raise ValueError("G table needs matching, non-empty breakpoints and values")
        if np.any(np.diff(br) <= 0):
            raise ValueError("G breakpoints must be strictly increasing")
        if np.any(np.diff(gv) < 0) or gv.min() < 0 or gv.max() > 1:
            raise ValueError("G must be nondecreasing with values in [0, 1]")

    def G(self, delta: float) -> float:
        return float(np.interp(delta, self.g_breaks, self.g_values))


def unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def theorem1_bound(n: int, d_z: int, p: TVBoundParams, ball_constant: float = 2.0) -> float:
    """Upper bound on the TV distance between a bootstrapped sample and f^CI.

    ``ball_constant`` is the base of the ``ball_constant ** (1/d_z)`` factor
    in the nearest-neighbor radius term; 4 gives the looser variant.  The
    caller is responsible for ``eps`` being below the smoothness radius.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if d_z < 1:
        raise ValueError("d_z must be at least 1")
    gam = unit_ball_volume(d_z)
    g = p.G(2.0 * p.c_d * p.eps**2)
    radius_term = (
        p.c3 * ball_constant ** (1.0 / d_z) * math.gamma(1.0 / d_z)
        / ((n * gam) ** (1.0 / d_z) * d_z)
    )
    root = 0.5 * math.sqrt(p.beta / 4.0 * radius_term + p.beta * p.eps * g / 4.0)
    tail = math.exp(-0.5 * n * gam * p.c_d * p.eps ** (d_z + 2))
    return root + tail + g
