"""Classifier-based conditional independence testing with a nearest-neighbor bootstrap."""

from .bench import BenchConfig, BenchReport, preset_config, run_benchmark
from .boosting import BoostedTrees, ClassifierParams, empirical_risk, predict, train
from .bootstrap import BootstrapOutput, datagen, empirical_fci_oracle
from .ccit import (
    CI,
    NOT_CI,
    AggregateResult,
    TestResult,
    ccit_bootstrap,
    ccit_v1,
    ccit_v2,
    default_tau,
)
from .data import DataError, Dataset, DimSpec, LabeledDataset, load_csv, partition3
from .metrics import TVBoundParams, roc_auc, theorem1_bound, tv_histogram_estimate
from .neighbors import build as build_nn_index
from .neighbors import nearest, nearest_bruteforce, nearest_many
from .relations import (
    CausalGraph,
    Relation,
    gen_ci_relations,
    gen_nonci_relations,
    load_graph,
    markov_blanket,
)
from .synthetic import PnlConfig, gen_pnl

__version__ = "0.1.0"
