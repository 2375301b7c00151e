"""CI / non-CI test relations derived from a causal DAG.

CI relations come from Markov blankets: given its parents, children and the
children's other parents, a node is d-separated from every remaining node.
Non-CI relations take an edge (adjacent nodes are never d-separated) plus a
random conditioning set.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter
from importlib import resources
from pathlib import Path

import numpy as np

from .data import DataError, Dataset, DimSpec

log = logging.getLogger(__name__)

CI = "CI"
NOT_CI = "NotCI"

BUNDLED_GRAPHS = ("sachs_consensus", "sachs_reconstructed", "mooij_reconstructed")

# common header spellings in flow-cytometry exports -> fixture node names
COLUMN_ALIASES = {
    "praf": "raf",
    "pmek": "mek",
    "plc": "plcg",
    "plcg": "plcg",
    "p44/42": "erk",
    "perk": "erk",
    "pakts473": "akt",
    "pjnk": "jnk",
}


class GraphFormatError(ValueError):
    pass


class CausalGraph:
    """A DAG over named nodes; acyclicity is checked on construction."""

    def __init__(self, nodes, edges):
        self.nodes: tuple[str, ...] = tuple(nodes)
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("node names must be unique")
        known = set(self.nodes)
        seen = set()
        for p, c in edges:
            if p not in known or c not in known:
                raise ValueError(f"edge {p} -> {c} references an unknown node")
            if p == c:
                raise ValueError(f"self-loop on {p}")
            if (p, c) in seen:
                raise ValueError(f"duplicate edge {p} -> {c}")
            seen.add((p, c))
        self.edges: tuple[tuple[str, str], ...] = tuple((p, c) for p, c in edges)
        self._parents = {v: [] for v in self.nodes}
        self._children = {v: [] for v in self.nodes}
        for p, c in self.edges:
            self._parents[c].append(p)
            self._children[p].append(c)
        try:
            tuple(TopologicalSorter(self._parents).static_order())
        except CycleError as exc:
            raise ValueError(f"graph has a directed cycle: {exc.args[1]}") from None

    def parents(self, v: str) -> list[str]:
        return list(self._parents[v])

    def children(self, v: str) -> list[str]:
        return list(self._children[v])

    def __contains__(self, v) -> bool:
        return v in self._parents

    def __repr__(self):
        return f"CausalGraph({len(self.nodes)} nodes, {len(self.edges)} edges)"

    @classmethod
    def from_text(cls, text: str, source: str = "<graph>") -> "CausalGraph":
        """Parse ``parent -> child`` lines; ``#`` starts a comment.

        A line holding a single name declares an isolated node.
        """
        nodes: list[str] = []
        edges: list[tuple[str, str]] = []

        def add(v):
            if v not in nodes:
                nodes.append(v)

        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "->" in line:
                parts = [p.strip() for p in line.split("->")]
                if len(parts) != 2 or not all(parts) or any(" " in p for p in parts):
                    raise GraphFormatError(f"{source}:{lineno}: malformed edge {raw.strip()!r}")
                add(parts[0])
                add(parts[1])
                edges.append((parts[0], parts[1]))
            elif " " not in line:
                add(line)
            else:
                raise GraphFormatError(f"{source}:{lineno}: cannot parse {raw.strip()!r}")
        try:
            return cls(nodes, edges)
        except ValueError as exc:
            raise GraphFormatError(f"{source}: {exc}") from None


def load_graph(name_or_path: str | Path) -> CausalGraph:
    """Load a bundled fixture by name or a graph file by path."""
    if str(name_or_path) in BUNDLED_GRAPHS:
        text = resources.files("ccitest").joinpath(f"graphs/{name_or_path}.txt").read_text()
        return CausalGraph.from_text(text, str(name_or_path))
    path = Path(name_or_path)
    if not path.is_file():
        raise DataError(f"no such graph file: {path}")
    return CausalGraph.from_text(path.read_text(encoding="utf-8"), str(path))


@dataclass(frozen=True)
class Relation:
    x_node: str
    y_node: str
    z_nodes: tuple
    label: str

    def __post_init__(self):
        z = tuple(sorted(self.z_nodes))
        object.__setattr__(self, "z_nodes", z)
        if self.x_node == self.y_node:
            raise ValueError("x_node and y_node must differ")
        if self.x_node in z or self.y_node in z:
            raise ValueError("x_node and y_node must not be in the conditioning set")
        if self.label not in (CI, NOT_CI):
            raise ValueError(f"bad label {self.label!r}")

    def to_dict(self) -> dict:
        return {"x": self.x_node, "y": self.y_node, "z": list(self.z_nodes), "label": self.label}


def markov_blanket(g: CausalGraph, node: str) -> frozenset:
    if node not in g:
        raise KeyError(f"unknown node {node!r}")
    mb = set(g.parents(node)) | set(g.children(node))
    for c in g.children(node):
        mb.update(g.parents(c))
    mb.discard(node)
    return frozenset(mb)


def gen_ci_relations(g: CausalGraph) -> list[Relation]:
    out = []
    for x in g.nodes:
        z = markov_blanket(g, x)
        for y in g.nodes:
            if y != x and y not in z:
                out.append(Relation(x, y, tuple(z), CI))
    return out


def gen_nonci_relations(g: CausalGraph, count: int = 50, cond_size: int = 3,
                        seed: int = 0) -> list[Relation]:
    """``count`` relations, each a random edge plus a random conditioning set.

    Draws are independent, so the same relation can appear more than once.
    """
    if not g.edges:
        raise ValueError("graph has no edges")
    if len(g.nodes) < cond_size + 2:
        raise ValueError(
            f"need at least {cond_size + 2} nodes for a conditioning set of size {cond_size}"
        )
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        p, c = g.edges[rng.integers(len(g.edges))]
        rest = [v for v in g.nodes if v not in (p, c)]
        pick = rng.choice(len(rest), size=cond_size, replace=False)
        out.append(Relation(p, c, tuple(rest[i] for i in sorted(pick)), NOT_CI))
    return out


@dataclass(frozen=True, eq=False)
class Table:
    """A column-named matrix of finite reals."""

    columns: tuple
    values: np.ndarray

    @classmethod
    def from_csv(cls, path) -> "Table":
        from .data import read_table

        header, mat = read_table(path)
        return cls(tuple(header), mat)

    def column_index(self, name: str) -> int:
        want = name.lower()
        for i, col in enumerate(self.columns):
            c = col.strip().lower()
            if c == want or COLUMN_ALIASES.get(c) == want:
                return i
        raise DataError(f"column {name!r} not found in table")


def slice_relation(data: Table, r: Relation) -> Dataset:
    """X, Y and the (name-sorted) Z columns of ``data`` as a Dataset."""
    if not r.z_nodes:
        raise DataError(f"relation {r.x_node} / {r.y_node} has an empty conditioning set")
    cols = [data.column_index(r.x_node), data.column_index(r.y_node)]
    cols += [data.column_index(z) for z in r.z_nodes]
    return Dataset(data.values[:, cols], DimSpec(1, 1, len(r.z_nodes)))
