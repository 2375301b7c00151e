"""Benchmark harness: score many datasets with known truth and report ROC AUC."""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from .boosting import ClassifierParams
from .ccit import NOT_CI, VARIANTS, ccit_bootstrap
from .metrics import roc_auc
from .relations import (
    Table,
    gen_ci_relations,
    gen_nonci_relations,
    load_graph,
    slice_relation,
)
from .synthetic import PnlConfig, gen_pnl

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BenchConfig:
    family: str = "pnl"
    n: int = 1000
    d_z: tuple = (1,)
    datasets: int = 40
    B: int = 50
    variant: str = "v2"
    tau: Optional[float] = None
    params: ClassifierParams = field(default_factory=ClassifierParams)
    seed: int = 0
    # graph family only
    data: Optional[str] = None
    graph: Optional[str] = None
    nonci: int = 50
    cond_size: int = 3

    def __post_init__(self):
        object.__setattr__(self, "d_z", tuple(int(d) for d in self.d_z))
        if self.family not in ("pnl", "graph"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.family == "pnl":
            if not self.d_z or min(self.d_z) < 1:
                raise ValueError("d_z values must be positive")
            if self.datasets < 2 or self.datasets % 2:
                raise ValueError("datasets must be a positive even number")
        elif not (self.data and self.graph):
            raise ValueError("graph family needs both data and graph")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["d_z"] = list(self.d_z)
        return d


PRESETS = {
    # the acceptance-suite configuration
    "desk": dict(family="pnl", n=1000, d_z=(1, 5, 20), datasets=40, B=10, variant="v2"),
    # full sweep at published scale; hours of CPU time
    "full": dict(family="pnl", n=1000, d_z=(1, 5, 10, 20, 30, 50, 70), datasets=300,
                  B=50, variant="v2"),
}


@dataclass
class DatasetScore:
    index: int
    ground_truth: str
    score: float
    decision: str
    runtime: float
    meta: dict = field(default_factory=dict)

    def to_dict(self, timings: bool = False) -> dict:
        d = {"index": self.index, "ground_truth": self.ground_truth, "score": self.score,
             "decision": self.decision, **self.meta}
        if timings:
            d["runtime"] = self.runtime
        return d


@dataclass
class BenchPoint:
    label: str
    d_z: Optional[int]
    auc: float
    per_dataset: list

    def to_dict(self, timings: bool = False) -> dict:
        return {"label": self.label, "d_z": self.d_z, "auc": self.auc,
                "per_dataset": [r.to_dict(timings) for r in self.per_dataset]}


@dataclass
class BenchReport:
    config: dict
    points: list

    @property
    def auc(self) -> dict:
        return {p.label: p.auc for p in self.points}

    def to_json(self, timings: bool = False) -> str:
        """Report as JSON; timings are omitted by default so reruns are byte-identical."""
        return json.dumps(
            {"config": self.config, "points": [p.to_dict(timings) for p in self.points]},
            indent=2,
        )

    def auc_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "d_z", "auc"])
        for p in self.points:
            w.writerow([p.label, "" if p.d_z is None else p.d_z, repr(p.auc)])
        return buf.getvalue()


def derive_seed(*parts: int) -> int:
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0])


def _pnl_task(args):
    cfg, d_z, i = args
    dependent = i % 2 == 1
    pnl = PnlConfig.draw(cfg.n, d_z, dependent, seed=derive_seed(cfg.seed, d_z, i, 0))
    ds, truth = gen_pnl(pnl)
    t0 = time.perf_counter()
    res = ccit_bootstrap(ds, B=cfg.B, tau=cfg.tau, variant=cfg.variant, params=cfg.params,
                         seed=derive_seed(cfg.seed, d_z, i, 1))
    return DatasetScore(i, truth, res.score, res.decision, time.perf_counter() - t0,
                        {"c": pnl.c})


def _relation_task(args):
    cfg, table, rel, i = args
    ds = slice_relation(table, rel)
    t0 = time.perf_counter()
    res = ccit_bootstrap(ds, B=cfg.B, tau=cfg.tau, variant=cfg.variant, params=cfg.params,
                         seed=derive_seed(cfg.seed, i, 1))
    return DatasetScore(i, rel.label, res.score, res.decision, time.perf_counter() - t0,
                        {"relation": rel.to_dict()})


def _map(fn, tasks, jobs):
    if jobs and jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def _point(label, d_z, scores) -> BenchPoint:
    labels = [int(s.ground_truth == NOT_CI) for s in scores]
    auc = roc_auc([s.score for s in scores], labels) if 0 < sum(labels) < len(labels) else float("nan")
    return BenchPoint(label, d_z, auc, scores)


def graph_relations(cfg: BenchConfig, table: Table):
    g = load_graph(cfg.graph)
    rels = []
    for r in gen_ci_relations(g):
        if r.z_nodes:
            rels.append(r)
        else:
            log.warning("skipping %s _||_ %s: empty conditioning set", r.x_node, r.y_node)
    rels += gen_nonci_relations(g, cfg.nonci, cfg.cond_size, seed=derive_seed(cfg.seed, 2))
    return rels


def run_benchmark(config: BenchConfig, jobs: int = 1) -> BenchReport:
    """Score every dataset of ``config`` and compute ROC AUC per point.

    Datasets are scored independently (in parallel when ``jobs > 1``) and
    collected in dataset order, so the report does not depend on scheduling.
    """
    points = []
    if config.family == "pnl":
        for d_z in config.d_z:
            tasks = [(config, d_z, i) for i in range(config.datasets)]
            points.append(_point(f"d_z={d_z}", d_z, _map(_pnl_task, tasks, jobs)))
    else:
        table = Table.from_csv(config.data)
        rels = graph_relations(config, table)
        tasks = [(config, table, r, i) for i, r in enumerate(rels)]
        points.append(_point(str(config.graph), None, _map(_relation_task, tasks, jobs)))
    return BenchReport(config.to_dict(), points)


def preset_config(name: str, **overrides) -> BenchConfig:
    base = dict(PRESETS[name])
    base.update({k: v for k, v in overrides.items() if v is not None})
    return BenchConfig(**base)
