import json

import numpy as np
import pytest

from ccitest.bench import PRESETS, BenchConfig, preset_config, run_benchmark
from ccitest.boosting import ClassifierParams
from ccitest.relations import load_graph

FAST = ClassifierParams(rounds=20)


def test_config_validation():
    with pytest.raises(ValueError):
        BenchConfig(datasets=3)
    with pytest.raises(ValueError):
        BenchConfig(d_z=(0,))
    with pytest.raises(ValueError):
        BenchConfig(family="graph")
    with pytest.raises(ValueError):
        BenchConfig(variant="v9")


def test_desk_preset_matches_acceptance_configuration():
    cfg = preset_config("desk", seed=1)
    assert (cfg.n, cfg.d_z, cfg.datasets, cfg.B, cfg.variant) == (1000, (1, 5, 20), 40, 10, "v2")
    assert preset_config("desk", B=3).B == 3
    assert set(PRESETS) == {"desk", "full"}


def test_small_pnl_benchmark():
    cfg = BenchConfig(n=300, d_z=(1, 2), datasets=4, B=2, params=FAST, seed=3)
    rep = run_benchmark(cfg)
    assert [p.label for p in rep.points] == ["d_z=1", "d_z=2"]
    for p in rep.points:
        assert 0.0 <= p.auc <= 1.0
        assert [s.ground_truth for s in p.per_dataset] == ["CI", "NotCI", "CI", "NotCI"]
        assert [s.meta["c"] == 0.0 for s in p.per_dataset] == [True, False, True, False]
    doc = json.loads(rep.to_json())
    assert "runtime" not in doc["points"][0]["per_dataset"][0]
    assert "runtime" in json.loads(rep.to_json(timings=True))["points"][0]["per_dataset"][0]
    assert rep.auc_csv().splitlines()[0] == "label,d_z,auc"
    again = run_benchmark(cfg, jobs=2)
    assert again.to_json() == rep.to_json()


def _sem_table(g, n, seed):
    """Linear-Gaussian data faithful to ``g`` with the graph's node names as columns."""
    rng = np.random.default_rng(seed)
    order = list(g.nodes)
    done, vals = set(), {}
    while len(done) < len(order):
        for v in order:
            if v in done or any(p not in done for p in g.parents(v)):
                continue
            x = rng.standard_normal(n)
            for p in g.parents(v):
                x += rng.choice([-1.0, 1.0]) * rng.uniform(0.8, 1.5) * vals[p]
            vals[v] = x / x.std()
            done.add(v)
    return order, np.column_stack([vals[v] for v in order])


def test_graph_family_end_to_end(tmp_path):
    g = load_graph("sachs_reconstructed")
    cols, mat = _sem_table(g, 300, 0)
    path = tmp_path / "sem.csv"
    np.savetxt(path, mat, delimiter=",", header=",".join(cols), comments="")
    cfg = BenchConfig(family="graph", graph="sachs_reconstructed", data=str(path),
                      B=1, nonci=10, params=FAST, seed=0)
    rep = run_benchmark(cfg)
    (point,) = rep.points
    assert point.label == "sachs_reconstructed"
    assert len(point.per_dataset) == 76 + 10
    assert 0.0 <= point.auc <= 1.0
