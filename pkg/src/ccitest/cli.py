"""``ccitest`` command line: test, bench, gen, relations.

JSON goes to stdout (or ``--output``), diagnostics to stderr.  Exit codes:
0 ran (whatever the verdict), 2 usage error, 3 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .bench import PRESETS, BenchConfig, preset_config, run_benchmark
from .boosting import ClassifierParams
from .ccit import DEFAULT_B, VARIANTS, ccit_bootstrap
from .data import DataError, load_csv
from .relations import GraphFormatError, gen_ci_relations, gen_nonci_relations, load_graph
from .synthetic import DEFAULT_VAR_ETA, PnlConfig, gen_pnl

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 2, 3


class UsageError(Exception):
    pass


def _tau(text: str):
    if text == "auto":
        return None
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tau must be 'auto' or a number, got {text!r}")
    if not v >= 0:
        raise argparse.ArgumentTypeError("tau must be nonnegative")
    return v


def _dz_list(text: str) -> tuple:
    try:
        vals = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid d_z list {text!r}")
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError(f"d_z values must be positive, got {text!r}")
    return vals


def _bool(text: str) -> bool:
    t = text.lower()
    if t in ("1", "true", "yes"):
        return True
    if t in ("0", "false", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _add_classifier_flags(p):
    g = p.add_argument_group("classifier")
    g.add_argument("--rounds", type=int, help="boosting rounds (default 100)")
    g.add_argument("--max-depth", type=int, help="tree depth (default 3)")
    g.add_argument("--learning-rate", type=float, help="shrinkage (default 0.1)")
    g.add_argument("--min-leaf", type=int, help="minimum rows per leaf (default 5)")
    g.add_argument("--l2", type=float, help="L2 penalty on leaf values (default 1.0)")


def _classifier_params(args) -> ClassifierParams:
    over = {
        "rounds": args.rounds,
        "max_depth": args.max_depth,
        "learning_rate": args.learning_rate,
        "min_leaf": args.min_leaf,
        "l2_reg": args.l2,
    }
    try:
        return ClassifierParams(**{k: v for k, v in over.items() if v is not None})
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ccitest", description="Classifier-based CI testing.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    jobs_default = os.cpu_count() or 1

    t = sub.add_parser("test", help="test X _||_ Y | Z on a CSV file")
    t.add_argument("--data", required=True, help="CSV file with a header row")
    t.add_argument("--x", required=True, help="X columns: names or a..b index ranges")
    t.add_argument("--y", required=True, help="Y columns")
    t.add_argument("--z", required=True, help="Z columns")
    t.add_argument("--B", type=_positive, default=DEFAULT_B, help="bootstrap runs (default 50)")
    t.add_argument("--tau", type=_tau, default=None, help="threshold or 'auto' (1/sqrt(n_test))")
    t.add_argument("--variant", choices=VARIANTS, default="v2")
    t.add_argument("--seed", type=int, required=True)
    t.add_argument("--output", help="write JSON here instead of stdout")
    t.add_argument("--jobs", type=_positive, default=jobs_default, help="worker processes")
    _add_classifier_flags(t)

    b = sub.add_parser("bench", help="ROC AUC benchmark on synthetic or graph-derived data")
    b.add_argument("--preset", choices=sorted(PRESETS), help="start from a named configuration")
    b.add_argument("--family", choices=("pnl", "graph"))
    b.add_argument("--dz", type=_dz_list, help="comma-separated d_z values, e.g. 1,5,20")
    b.add_argument("--n", type=_positive, help="rows per synthetic dataset")
    b.add_argument("--datasets", type=_positive, help="datasets per d_z (half CI, half not)")
    b.add_argument("--B", type=_positive, help="bootstrap runs per dataset")
    b.add_argument("--variant", choices=VARIANTS)
    b.add_argument("--tau", type=_tau, default=None)
    b.add_argument("--seed", type=int, required=True)
    b.add_argument("--data", help="graph family: CSV with one column per node")
    b.add_argument("--graph", help="graph family: bundled fixture name or graph file")
    b.add_argument("--nonci", type=int, help="graph family: number of NotCI relations")
    b.add_argument("--cond-size", type=int, help="graph family: NotCI conditioning set size")
    b.add_argument("--output", help="write the JSON report here instead of stdout")
    b.add_argument("--csv", help="also write the per-point AUC table here")
    b.add_argument("--timings", action="store_true", help="include per-dataset runtimes")
    b.add_argument("--jobs", type=_positive, default=jobs_default, help="worker processes")
    _add_classifier_flags(b)

    g = sub.add_parser("gen", help="write one post-nonlinear dataset plus a sidecar JSON")
    g.add_argument("--n", type=_positive, required=True)
    g.add_argument("--dz", type=_positive, required=True)
    g.add_argument("--dependent", type=_bool, nargs="?", const=True, default=False,
                   help="make Y depend on X (default false)")
    g.add_argument("--var-eta", type=float, default=DEFAULT_VAR_ETA, help="noise variance")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--output", required=True, help="CSV path; the sidecar gets a .json suffix")
    g.add_argument("--force", action="store_true", help="overwrite existing files")

    r = sub.add_parser("relations", help="print CI and NotCI relations of a DAG as JSON lines")
    r.add_argument("--graph", required=True, help="bundled fixture name or graph file")
    r.add_argument("--nonci", type=int, default=50)
    r.add_argument("--cond-size", type=int, default=3)
    r.add_argument("--seed", type=int, required=True)
    r.add_argument("--output", help="write here instead of stdout")
    return parser


def _emit(text: str, path):
    if not text.endswith("\n"):
        text += "\n"
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def cmd_test(args) -> int:
    params = _classifier_params(args)
    u = load_csv(args.data, {"x": args.x, "y": args.y, "z": args.z})
    res = ccit_bootstrap(u, B=args.B, tau=args.tau, variant=args.variant, params=params,
                         seed=args.seed, jobs=args.jobs)
    _emit(json.dumps(res.to_dict(), indent=2), args.output)
    return EXIT_OK


def cmd_bench(args) -> int:
    over = dict(family=args.family, d_z=args.dz, n=args.n, datasets=args.datasets, B=args.B,
                variant=args.variant, tau=args.tau, seed=args.seed, data=args.data,
                graph=args.graph, nonci=args.nonci, cond_size=args.cond_size,
                params=_classifier_params(args))
    try:
        if args.preset:
            cfg = preset_config(args.preset, **over)
        else:
            cfg = BenchConfig(**{k: v for k, v in over.items() if v is not None})
    except DataError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = run_benchmark(cfg, jobs=args.jobs)
    for label, auc in report.auc.items():
        logging.getLogger("ccitest").info("%s: AUC %.4f", label, auc)
    _emit(report.to_json(timings=args.timings), args.output)
    if args.csv:
        Path(args.csv).write_text(report.auc_csv(), encoding="utf-8")
    return EXIT_OK


def sidecar_path(csv_path) -> Path:
    p = Path(csv_path)
    side = p.with_suffix(".json")
    return side if side != p else p.with_name(p.name + ".meta.json")


def cmd_gen(args) -> int:
    out = Path(args.output)
    side = sidecar_path(out)
    if not args.force:
        for p in (out, side):
            if p.exists():
                raise DataError(f"{p} exists; pass --force to overwrite")
    try:
        cfg = PnlConfig.draw(args.n, args.dz, args.dependent, seed=args.seed,
                             var_eta=args.var_eta)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    ds, _ = gen_pnl(cfg)
    header = ["x0", "y0"] + [f"z{j}" for j in range(args.dz)]
    lines = [",".join(header)]
    lines += [",".join(repr(float(v)) for v in row) for row in ds.rows]
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    side.write_text(json.dumps(cfg.metadata(), indent=2) + "\n", encoding="utf-8")
    print(f"wrote {out} and {side}", file=sys.stderr)
    return EXIT_OK


def cmd_relations(args) -> int:
    g = load_graph(args.graph)
    try:
        rels = gen_ci_relations(g)
        rels += gen_nonci_relations(g, args.nonci, args.cond_size, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit("\n".join(json.dumps(r.to_dict()) for r in rels), args.output)
    return EXIT_OK


_COMMANDS = {"test": cmd_test, "bench": cmd_bench, "gen": cmd_gen, "relations": cmd_relations}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"ccitest {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, GraphFormatError, OSError) as exc:
        print(f"ccitest {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
