"""Simple undirected graph container and its text serializations."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph


def normalize_edges(pairs, num_nodes: int | None = None) -> tuple[np.ndarray, int, int]:
    """Canonical edge array plus (duplicates dropped, self-loops dropped).

    Output rows satisfy ``u < v`` and are sorted lexicographically.
    """
    arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    loops = arr[:, 0] == arr[:, 1]
    n_loops = int(loops.sum())
    arr = arr[~loops]
    arr = np.sort(arr, axis=1)
    if num_nodes is not None and arr.size and (arr.min() < 0 or arr.max() >= num_nodes):
        raise ValueError("edge endpoint outside 0..num_nodes-1")
    before = len(arr)
    if before:
        arr = np.unique(arr, axis=0)
    return arr, before - len(arr), n_loops


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple graph on nodes ``0..num_nodes-1``.

    ``edges`` is an ``(E, 2)`` int64 array with ``u < v`` in lexicographic
    order. Latent ``positions`` and community ``labels`` are optional.
    """

    num_nodes: int
    edges: np.ndarray
    positions: np.ndarray | None = None
    labels: np.ndarray | None = None
    provenance: dict = field(default_factory=dict)

    @classmethod
    def from_edges(cls, num_nodes: int, pairs, **kwargs) -> "Graph":
        edges, _, _ = normalize_edges(pairs, num_nodes)
        return cls(int(num_nodes), edges, **kwargs)

    @property
    def num_edges(self) -> int:
        return int(len(self.edges))

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """Symmetric 0/1 CSR adjacency with sorted column indices."""
        n = self.num_nodes
        u, v = self.edges[:, 0], self.edges[:, 1]
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        a = sp.csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(n, n))
        a.sort_indices()
        return a

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.num_nodes).astype(np.int64)

    def neighbors(self, v: int) -> np.ndarray:
        a = self.adjacency
        return a.indices[a.indptr[v] : a.indptr[v + 1]]

    def components(self) -> tuple[int, np.ndarray]:
        """Number of connected components and a component label per node."""
        if self.num_nodes == 0:
            return 0, np.zeros(0, dtype=np.int64)
        count, labels = csgraph.connected_components(self.adjacency, directed=False)
        return int(count), labels

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.num_nodes))
        g.add_edges_from(map(tuple, self.edges.tolist()))
        return g


def empty_graph(num_nodes: int = 0) -> Graph:
    return Graph(int(num_nodes), np.zeros((0, 2), dtype=np.int64))


def serial_rows(g: Graph) -> np.ndarray:
    """``(k, 2)`` rows written by :func:`edge_list_text`, in order.

    Edges are grouped by their larger endpoint ``b`` and sorted by the smaller
    one, except that ``(b-1, b)`` leads its group when ``b-1`` has no
    lower-numbered neighbour. A node that neither edge rule would introduce
    in label order (isolated nodes among them) gets a marker line ``v v``,
    which a reader counts as a node and then drops as a self-loop. Reading
    the text back meets the nodes in label order, so parsing relabels
    nothing, keeps ``N``, and a second write is byte-identical.
    """
    e = g.edges
    lo, hi = e[:, 0], e[:, 1]
    has_lower = np.zeros(g.num_nodes, dtype=bool)
    has_lower[hi] = True
    lead = (lo == hi - 1) & ~has_lower[lo]
    has_next = np.zeros(g.num_nodes, dtype=bool)
    has_next[lo[lead]] = True
    lonely = np.flatnonzero(~has_lower & ~has_next).astype(np.int64)
    rows = np.concatenate([e, np.column_stack([lonely, lonely])])
    lead = np.concatenate([lead, np.zeros(len(lonely), dtype=bool)])
    return rows[np.lexsort((rows[:, 0], ~lead, rows[:, 1]))]


def edge_list_text(g: Graph, header: bool = True) -> str:
    """Edge-list text: ``#`` provenance lines, then ``u v`` rows from :func:`serial_rows`."""
    out = io.StringIO()
    if header:
        out.write("# fgnet edge list\n")
        out.write(f"# nodes {g.num_nodes}\n")
        out.write(f"# edges {g.num_edges}\n")
        if g.provenance:
            out.write("# provenance " + json.dumps(g.provenance, sort_keys=True, default=_jsonable) + "\n")
    for u, v in serial_rows(g).tolist():
        out.write(f"{u} {v}\n")
    return out.getvalue()


def write_edge_list(g: Graph, path, header: bool = True) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(edge_list_text(g, header=header))


def write_positions_csv(g: Graph, path) -> None:
    if g.positions is None:
        raise ValueError("graph carries no positions")
    d = g.positions.shape[1] if g.positions.ndim == 2 else 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node_id", *[f"x{i}" for i in range(d)]])
        for i, row in enumerate(g.positions.tolist()):
            w.writerow([i, *(repr(float(c)) for c in row)])


def write_labels_csv(g: Graph, path) -> None:
    if g.labels is None:
        raise ValueError("graph carries no labels")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node_id", "community"])
        for i, c in enumerate(g.labels.tolist()):
            w.writerow([i, int(c)])


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return str(obj)
