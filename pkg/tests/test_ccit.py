import math

import numpy as np
import pytest

from ccitest.boosting import ClassifierParams
from ccitest.ccit import (
    CI,
    NOT_CI,
    aggregate,
    ccit_bootstrap,
    ccit_v1,
    ccit_v2,
    decide_v1,
    decide_v2,
    default_tau,
    prepare_split,
)
from ccitest.data import DataError, Dataset, DimSpec
from ccitest.synthetic import PnlConfig, gen_pnl

FAST = ClassifierParams(rounds=30)


def test_default_tau():
    assert default_tau(100) == 0.1
    assert default_tau(333) == 1 / math.sqrt(333)
    with pytest.raises(ValueError):
        default_tau(0)


def test_decision_boundaries():
    # v1: NotCI iff loss <= 0.5 - tau
    assert decide_v1(0.4, 0.1) == NOT_CI
    assert decide_v1(0.41, 0.1) == CI
    assert decide_v1(0.25, 0.25) == NOT_CI
    # v2: NotCI iff loss_full < loss_yz - tau, strictly
    assert decide_v2(0.25, 0.5, 0.25) == CI
    assert decide_v2(0.24, 0.5, 0.25) == NOT_CI
    assert decide_v2(0.5, 0.3, 0.0) == CI


def test_aggregate_threshold():
    runs = [ccit_v2(_pnl(300, 1, False, 0), tau=0.05, params=FAST, seed=s) for s in (1, 2)]
    agg = aggregate(runs, "v2")
    assert agg.mean_statistic == pytest.approx(np.mean([r.statistic for r in runs]))
    assert agg.decision == (NOT_CI if agg.mean_statistic > 0.05 else CI)
    assert agg.B == 2


def _pnl(n, dz, dep, seed, c=None):
    ds, _ = gen_pnl(PnlConfig.draw(n, dz, dep, seed=seed, c=c))
    return ds


def test_prepare_split_sizes():
    train, test = prepare_split(_pnl(301, 2, False, 0), seed=3)
    # 100 per part, balanced classes in both halves
    assert len(train) == len(test) == 100
    assert train.labels.sum() == test.labels.sum() == 50
    train, test = prepare_split(_pnl(99, 2, False, 0), seed=3)  # odd parts trimmed
    assert len(test) == 32


def test_too_few_rows():
    with pytest.raises(DataError):
        ccit_v2(_pnl(59, 1, False, 0))


def test_copy_of_x_is_detected():
    rng = np.random.default_rng(0)
    z = rng.standard_normal((600, 2))
    x = rng.standard_normal(600)
    u = Dataset.from_blocks(x, x, z)
    r = ccit_v2(u, params=FAST, seed=1)
    assert r.decision == NOT_CI
    assert r.loss_full < 0.3
    assert ccit_v1(u, params=FAST, seed=1).decision == NOT_CI


def test_huge_tau_always_ci():
    u = _pnl(600, 1, True, 1, c=2.0)
    assert ccit_v2(u, tau=0.5, params=FAST, seed=0).decision == CI
    assert ccit_bootstrap(u, B=2, tau=0.5, params=FAST).decision == CI


def test_result_fields():
    u = _pnl(600, 3, False, 2)
    r = ccit_v2(u, params=FAST, seed=4)
    assert r.n_test == 200 and r.tau == default_tau(200)
    assert r.statistic == r.loss_yz - r.loss_full
    v1 = ccit_v1(u, params=FAST, seed=4)
    assert v1.loss_yz is None and v1.statistic == 0.5 - v1.loss_full
    assert v1.loss_full == r.loss_full  # same split and same full-feature fit


def test_b_one_and_seeds():
    u = _pnl(300, 1, False, 3)
    agg = ccit_bootstrap(u, B=1, params=FAST, seed=10)
    assert [r.seed for r in agg.runs] == [11]
    assert agg.score == agg.runs[0].statistic
    agg = ccit_bootstrap(u, B=3, params=FAST, seed=10)
    assert [r.seed for r in agg.runs] == [11, 12, 13]


def test_bootstrap_deterministic_and_schedule_free():
    u = _pnl(300, 2, True, 4)
    a = ccit_bootstrap(u, B=3, params=FAST, seed=5)
    b = ccit_bootstrap(u, B=3, params=FAST, seed=5, jobs=2)
    assert a.to_dict() == b.to_dict()
    assert list(a.to_dict()) == ["variant", "B", "tau", "n_test", "decision", "score",
                                 "mean_statistic", "runs"]


def test_bad_arguments():
    u = _pnl(300, 1, False, 0)
    with pytest.raises(ValueError):
        ccit_bootstrap(u, B=0)
    with pytest.raises(ValueError):
        ccit_bootstrap(u, variant="v3")
    with pytest.raises(ValueError):
        ccit_v2(u, tau=-0.1)


def test_xz_only_classifier_is_at_chance():
    # the bootstrap leaves (X, Z) untouched, so a classifier that sees only
    # (X, Z) cannot beat chance
    class DropY:
        def train(self, d, seed):
            from ccitest.boosting import train

            feats = np.delete(d.features, 1, axis=1)
            m = train(type(d)(feats, d.labels), FAST)

            class Wrapped:
                def predict(self, f):
                    return m.predict(np.delete(np.asarray(f), 1, axis=1))

            return Wrapped()

    losses = []
    for s in range(5):
        u = _pnl(1200, 3, True, s, c=2.0)
        losses.append(ccit_v1(u, learner=DropY(), seed=s).loss_full)
    n_test = 400
    assert abs(np.mean(losses) - 0.5) <= 3 / math.sqrt(n_test)


def test_strong_coupling_scores_higher():
    strong, null = [], []
    for s in range(4):
        strong.append(ccit_bootstrap(_pnl(1500, 1, True, s, c=2.0), B=3, seed=s).score)
        null.append(ccit_bootstrap(_pnl(1500, 1, False, s), B=3, seed=s).score)
    assert np.mean(strong) > np.mean(null)
