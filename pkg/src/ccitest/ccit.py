"""Classifier-based conditional independence tests.

``ccit_v1`` compares the held-out 0-1 loss of a classifier separating
original rows from nearest-neighbor-bootstrapped rows against chance (0.5).
For finite samples the bootstrap leaves artifacts in the (Y, Z) joint, so
v1 is biased towards rejecting; pick ``tau`` above that bias.

``ccit_v2`` corrects for this by also training a classifier without the X
columns and using its loss as the reference level instead of 0.5.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .boosting import BoostedTrees, ClassifierParams, empirical_risk
from .bootstrap import datagen
from .data import (
    DataError,
    Dataset,
    drop_x,
    make_labeled,
    partition3,
    split_train_test,
)

CI = "CI"
NOT_CI = "NotCI"
VARIANTS = ("v1", "v2")

MIN_PARTITION = 20
DEFAULT_B = 50

# stream ids for the per-run sub-seeds
_PARTITION, _SPLIT, _FIT_FULL, _FIT_YZ = range(4)


@dataclass(frozen=True)
class TestResult:
    __test__ = False  # not a pytest class

    variant: str
    loss_full: float
    loss_yz: Optional[float]
    statistic: float
    tau: float
    n_test: int
    decision: str
    seed: int

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "loss_full": self.loss_full,
            "loss_yz": self.loss_yz,
            "statistic": self.statistic,
            "decision": self.decision,
        }


@dataclass(frozen=True)
class AggregateResult:
    variant: str
    runs: tuple
    mean_statistic: float
    score: float
    decision: str
    tau: float
    B: int
    n_test: int = field(default=0)

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "B": self.B,
            "tau": self.tau,
            "n_test": self.n_test,
            "decision": self.decision,
            "score": self.score,
            "mean_statistic": self.mean_statistic,
            "runs": [r.to_dict() for r in self.runs],
        }


def default_tau(n_test: int) -> float:
    if n_test < 1:
        raise ValueError(f"n_test must be positive, got {n_test}")
    return 1.0 / math.sqrt(n_test)


def decide_v1(loss_full: float, tau: float) -> str:
    return CI if loss_full > 0.5 - tau else NOT_CI


def decide_v2(loss_full: float, loss_yz: float, tau: float) -> str:
    return NOT_CI if loss_full < loss_yz - tau else CI


def _sub_seed(seed: int, stream: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(seed), stream])


def prepare_split(u: Dataset, seed: int):
    """Partition, bootstrap, label and split: steps shared by both variants.

    Returns ``(train, test)``.  If the partition size is odd, one row is
    dropped from each part so both classes split evenly.
    """
    if len(u) < 3 * MIN_PARTITION:
        raise DataError(
            f"need at least {3 * MIN_PARTITION} rows ({MIN_PARTITION} per partition), "
            f"got {len(u)}"
        )
    parts = partition3(u, _sub_seed(seed, _PARTITION))
    u1, u2, u3 = parts.u1, parts.u2, parts.u3
    m = len(u1) - len(u1) % 2
    if m != len(u1):
        u1, u2, u3 = (p.take(np.arange(m)) for p in (u1, u2, u3))
    u2_prime = datagen(u2, u3).u2_prime
    labeled = make_labeled(u1, u2_prime)
    return split_train_test(labeled, _sub_seed(seed, _SPLIT))


def _learner(params, learner):
    if learner is not None:
        return learner
    return BoostedTrees(params or ClassifierParams())


def _check_tau(tau):
    if not tau >= 0.0:
        raise ValueError(f"tau must be nonnegative, got {tau}")


def ccit_v1(u: Dataset, tau: float | None = None, params: ClassifierParams | None = None,
            seed: int = 0, learner=None) -> TestResult:
    """One run of the uncorrected test; ``tau=None`` means ``1/sqrt(n_test)``."""
    train, test = prepare_split(u, seed)
    tau = default_tau(len(test)) if tau is None else float(tau)
    _check_tau(tau)
    model = _learner(params, learner).train(train, _sub_seed(seed, _FIT_FULL))
    loss = empirical_risk(model, test).loss
    return TestResult(
        variant="v1",
        loss_full=loss,
        loss_yz=None,
        statistic=0.5 - loss,
        tau=tau,
        n_test=len(test),
        decision=decide_v1(loss, tau),
        seed=int(seed),
    )


def ccit_v2(u: Dataset, tau: float | None = None, params: ClassifierParams | None = None,
            seed: int = 0, learner=None) -> TestResult:
    """One run of the bias-corrected test; ``tau=None`` means ``1/sqrt(n_test)``."""
    train, test = prepare_split(u, seed)
    tau = default_tau(len(test)) if tau is None else float(tau)
    _check_tau(tau)
    lrn = _learner(params, learner)
    g_full = lrn.train(train, _sub_seed(seed, _FIT_FULL))
    loss_full = empirical_risk(g_full, test).loss
    g_yz = lrn.train(drop_x(train, u.dims), _sub_seed(seed, _FIT_YZ))
    loss_yz = empirical_risk(g_yz, drop_x(test, u.dims)).loss
    return TestResult(
        variant="v2",
        loss_full=loss_full,
        loss_yz=loss_yz,
        statistic=loss_yz - loss_full,
        tau=tau,
        n_test=len(test),
        decision=decide_v2(loss_full, loss_yz, tau),
        seed=int(seed),
    )


_RUNNERS = {"v1": ccit_v1, "v2": ccit_v2}


def _run_one(args):
    variant, u, tau, params, seed, learner = args
    return _RUNNERS[variant](u, tau, params, seed, learner)


def ccit_bootstrap(u: Dataset, B: int = DEFAULT_B, tau: float | None = None,
                   variant: str = "v2", params: ClassifierParams | None = None,
                   seed: int = 0, learner=None, jobs: int = 1) -> AggregateResult:
    """Run ``variant`` ``B`` times with seeds ``seed+1 .. seed+B`` and average.

    Each run draws a fresh random partition of the same data.  The averaged
    statistic is the dependence score; the verdict is NotCI iff it exceeds
    ``tau`` (``None`` resolves to ``1/sqrt(n_test)``).
    """
    if int(B) != B or B < 1:
        raise ValueError(f"B must be a positive integer, got {B}")
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    tasks = [(variant, u, tau, params, seed + k, learner) for k in range(1, B + 1)]
    if jobs and jobs > 1 and B > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, B)) as pool:
            runs = tuple(pool.map(_run_one, tasks))
    else:
        runs = tuple(_run_one(t) for t in tasks)
    return aggregate(runs, variant)


def aggregate(runs, variant: str) -> AggregateResult:
    runs = tuple(runs)
    mean = float(np.mean([r.statistic for r in runs]))
    tau = runs[0].tau
    return AggregateResult(
        variant=variant,
        runs=runs,
        mean_statistic=mean,
        score=mean,
        decision=NOT_CI if mean > tau else CI,
        tau=tau,
        B=len(runs),
        n_test=runs[0].n_test,
    )
