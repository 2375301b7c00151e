"""Gradient-boosted regression trees for binary classification.

Trees are grown level by level with an exact greedy split search: every
midpoint between consecutive distinct values of every feature is scored with
the second-order (Newton) gain under logistic loss and L2 leaf
regularisation.  Rows go left when ``x[feature] < threshold``.

Trees are stored in heap layout: node ``i`` has children ``2i+1`` and
``2i+2``; ``feature[i] == -1`` marks a leaf (or an unused slot).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Protocol

import numba
import numpy as np

from .data import DataError, LabeledDataset


@dataclass(frozen=True)
class ClassifierParams:
    rounds: int = 100
    max_depth: int = 3
    learning_rate: float = 0.1
    min_leaf: int = 5
    l2_reg: float = 1.0

    def __post_init__(self):
        if int(self.rounds) != self.rounds or self.rounds < 1:
            raise ValueError(f"rounds must be a positive integer, got {self.rounds}")
        if int(self.max_depth) != self.max_depth or self.max_depth < 1:
            raise ValueError(f"max_depth must be a positive integer, got {self.max_depth}")
        if not 0.0 < self.learning_rate <= 1.0:
            raise ValueError(f"learning_rate must lie in (0, 1], got {self.learning_rate}")
        if int(self.min_leaf) != self.min_leaf or self.min_leaf < 1:
            raise ValueError(f"min_leaf must be a positive integer, got {self.min_leaf}")
        if not self.l2_reg >= 0.0:
            raise ValueError(f"l2_reg must be nonnegative, got {self.l2_reg}")


@dataclass(frozen=True, eq=False)
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    value: np.ndarray

    @property
    def depth(self) -> int:
        return int(math.log2(self.feature.shape[0] + 1)) - 1

    def to_dict(self, node: int = 0) -> dict:
        f = int(self.feature[node])
        if f < 0:
            return {"leaf": float(self.value[node])}
        return {
            "feature": f,
            "threshold": float(self.threshold[node]),
            "left": self.to_dict(2 * node + 1),
            "right": self.to_dict(2 * node + 2),
        }


@dataclass(frozen=True, eq=False)
class Model:
    trees: tuple
    base_score: float
    feature_width: int
    learning_rate: float = 1.0
    loss_history: tuple = field(default=(), repr=False)

    def __post_init__(self):
        trees = tuple(self.trees)
        object.__setattr__(self, "trees", trees)
        for t in trees:
            used = t.feature[t.feature >= 0]
            if used.size and used.max() >= self.feature_width:
                raise ValueError("tree splits on a feature outside feature_width")
        if trees:
            size = max(t.feature.shape[0] for t in trees)
            feat = np.full((len(trees), size), -1, dtype=np.int64)
            thr = np.zeros((len(trees), size))
            val = np.zeros((len(trees), size))
            for k, t in enumerate(trees):
                n = t.feature.shape[0]
                feat[k, :n], thr[k, :n], val[k, :n] = t.feature, t.threshold, t.value
        else:
            feat = np.full((0, 1), -1, dtype=np.int64)
            thr = val = np.zeros((0, 1))
        object.__setattr__(self, "_stacked", (feat, thr, val))

    def predict_margin(self, features) -> np.ndarray:
        return predict_margin(self, features)

    def predict(self, features) -> np.ndarray:
        return predict(self, features)

    def to_json(self, **kwargs) -> str:
        """Debug dump of the ensemble; not a stable interchange format."""
        return json.dumps(
            {
                "base_score": self.base_score,
                "learning_rate": self.learning_rate,
                "feature_width": self.feature_width,
                "trees": [t.to_dict() for t in self.trees],
            },
            **kwargs,
        )


@dataclass(frozen=True)
class RiskReport:
    loss: float
    n: int
    error_label1: float
    error_label0: float

    @property
    def per_class_error(self) -> tuple[float, float]:
        return self.error_label1, self.error_label0


class Learner(Protocol):
    """Anything that turns a labeled set into a model with ``predict``."""

    def train(self, d: LabeledDataset, seed): ...


# ---------------------------------------------------------------------------
# kernels


@numba.njit(cache=True)
def _leaf_score(g, h, lam):
    den = h + lam
    if den <= 0.0:
        return 0.0
    return g * g / den


@numba.njit(cache=True)
def _grow_tree(X, order, g, h, max_depth, min_leaf, lam):
    m, k = X.shape
    n_nodes = 2 ** (max_depth + 1) - 1
    feature = np.full(n_nodes, -1, dtype=np.int64)
    threshold = np.zeros(n_nodes)
    value = np.zeros(n_nodes)
    node_of = np.zeros(m, dtype=np.int64)

    G = np.zeros(n_nodes)
    H = np.zeros(n_nodes)
    cnt = np.zeros(n_nodes, dtype=np.int64)
    GL = np.zeros(n_nodes)
    HL = np.zeros(n_nodes)
    nL = np.zeros(n_nodes, dtype=np.int64)
    last = np.zeros(n_nodes)
    best_gain = np.zeros(n_nodes)
    best_f = np.full(n_nodes, -1, dtype=np.int64)
    best_thr = np.zeros(n_nodes)
    active = np.zeros(n_nodes, dtype=np.bool_)
    active[0] = True

    for depth in range(max_depth):
        lo = 2 ** depth - 1
        hi = 2 ** (depth + 1) - 1
        any_active = False
        for nd in range(lo, hi):
            G[nd] = 0.0
            H[nd] = 0.0
            cnt[nd] = 0
            best_gain[nd] = -np.inf
            best_f[nd] = -1
            any_active = any_active or active[nd]
        if not any_active:
            break
        for r in range(m):
            nd = node_of[r]
            if active[nd]:
                G[nd] += g[r]
                H[nd] += h[r]
                cnt[nd] += 1

        for f in range(k):
            for nd in range(lo, hi):
                GL[nd] = 0.0
                HL[nd] = 0.0
                nL[nd] = 0
            for i in range(m):
                r = order[i, f]
                nd = node_of[r]
                if not active[nd]:
                    continue
                v = X[r, f]
                nl = nL[nd]
                if nl >= min_leaf and cnt[nd] - nl >= min_leaf and v > last[nd]:
                    gl = GL[nd]
                    hl = HL[nd]
                    gain = (
                        _leaf_score(gl, hl, lam)
                        + _leaf_score(G[nd] - gl, H[nd] - hl, lam)
                        - _leaf_score(G[nd], H[nd], lam)
                    )
                    # strict: lowest feature, then lowest threshold wins ties
                    if gain > best_gain[nd]:
                        best_gain[nd] = gain
                        best_f[nd] = f
                        mid = 0.5 * (last[nd] + v)
                        best_thr[nd] = mid if mid > last[nd] else v
                GL[nd] += g[r]
                HL[nd] += h[r]
                nL[nd] += 1
                last[nd] = v

        for nd in range(lo, hi):
            # zero-gain splits are allowed so symmetric patterns (XOR) can
            # be split at the root
            if active[nd] and best_f[nd] >= 0 and best_gain[nd] >= 0.0:
                feature[nd] = best_f[nd]
                threshold[nd] = best_thr[nd]
                active[nd] = False
                active[2 * nd + 1] = True
                active[2 * nd + 2] = True
            else:
                active[nd] = False
        for r in range(m):
            nd = node_of[r]
            f = feature[nd]
            if f >= 0:
                if X[r, f] < threshold[nd]:
                    node_of[r] = 2 * nd + 1
                else:
                    node_of[r] = 2 * nd + 2

    for nd in range(n_nodes):
        G[nd] = 0.0
        H[nd] = 0.0
    for r in range(m):
        G[node_of[r]] += g[r]
        H[node_of[r]] += h[r]
    for nd in range(n_nodes):
        if feature[nd] < 0 and H[nd] + lam > 0.0:
            value[nd] = -G[nd] / (H[nd] + lam)
    return feature, threshold, value, node_of


@numba.njit(cache=True)
def _ensemble_margin(X, feature, threshold, value, base, lr):
    n = X.shape[0]
    out = np.empty(n)
    for r in range(n):
        s = 0.0
        for t in range(feature.shape[0]):
            nd = 0
            while feature[t, nd] >= 0:
                if X[r, feature[t, nd]] < threshold[t, nd]:
                    nd = 2 * nd + 1
                else:
                    nd = 2 * nd + 2
            s += value[t, nd]
        out[r] = base + lr * s
    return out


# ---------------------------------------------------------------------------


def _logistic_loss(margin: np.ndarray, y: np.ndarray) -> float:
    sign = 2.0 * y - 1.0
    return float(np.mean(np.logaddexp(0.0, -sign * margin)))


def _sigmoid(margin: np.ndarray) -> np.ndarray:
    out = np.empty_like(margin)
    pos = margin >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-margin[pos]))
    e = np.exp(margin[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def train(d: LabeledDataset, params: ClassifierParams | None = None, seed=0) -> Model:
    """Fit a boosted ensemble by Newton boosting on logistic loss.

    The fit is deterministic; ``seed`` is accepted so that all learners share
    one signature.  Training loss never increases: a round whose tree would
    raise it has its leaf weights halved until it does not (zeroed after 30
    halvings).
    """
    params = params or ClassifierParams()
    if len(d) == 0:
        raise DataError("cannot train on an empty dataset")
    y = d.labels.astype(np.float64)
    p1 = y.mean()
    if p1 in (0.0, 1.0):
        raise DataError("single-class training set")
    X = np.ascontiguousarray(d.features)
    order = np.ascontiguousarray(np.argsort(X, axis=0, kind="stable"))
    base = math.log(p1 / (1.0 - p1))
    lr = float(params.learning_rate)

    margin = np.full(len(d), base)
    loss = _logistic_loss(margin, y)
    history = [loss]
    trees = []
    for _ in range(params.rounds):
        p = _sigmoid(margin)
        g = p - y
        h = p * (1.0 - p)
        feat, thr, val, node_of = _grow_tree(
            X, order, g, h, params.max_depth, params.min_leaf, float(params.l2_reg)
        )
        for _attempt in range(31):
            new_margin = margin + lr * val[node_of]
            new_loss = _logistic_loss(new_margin, y)
            if new_loss <= loss:
                break
            val = val * 0.5
        else:
            val = np.zeros_like(val)
            new_margin, new_loss = margin, loss
        margin, loss = new_margin, new_loss
        history.append(loss)
        trees.append(Tree(feat, thr, val))
    return Model(tuple(trees), base, d.width, lr, tuple(history))


def _check_width(model: Model, X: np.ndarray) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.shape[1] != model.feature_width:
        raise ValueError(
            f"feature width {X.shape[1]} does not match model width {model.feature_width}"
        )
    return X


def predict_margin(model: Model, features) -> np.ndarray:
    """Log-odds score: base score plus the learning-rate-scaled leaf sum."""
    X = _check_width(model, features)
    feat, thr, val = model._stacked
    return _ensemble_margin(X, feat, thr, val, float(model.base_score), float(model.learning_rate))


def predict(model: Model, features) -> np.ndarray:
    # margin exactly 0 predicts label 1
    return (predict_margin(model, features) >= 0.0).astype(np.int8)


def empirical_risk(model, d: LabeledDataset) -> RiskReport:
    """Mean 0-1 loss of ``model`` on ``d`` with a per-class breakdown."""
    if len(d) == 0:
        raise DataError("cannot evaluate on an empty dataset")
    wrong = model.predict(d.features) != d.labels
    ones = d.labels == 1
    n1, n0 = int(ones.sum()), int((~ones).sum())
    e1, e0 = int(wrong[ones].sum()), int(wrong[~ones].sum())
    return RiskReport(
        loss=(e1 + e0) / len(d),
        n=len(d),
        error_label1=e1 / n1 if n1 else 0.0,
        error_label0=e0 / n0 if n0 else 0.0,
    )


@dataclass(frozen=True)
class BoostedTrees:
    """The built-in :class:`Learner`."""

    params: ClassifierParams = ClassifierParams()

    def train(self, d: LabeledDataset, seed=0) -> Model:
        return train(d, self.params, seed)
