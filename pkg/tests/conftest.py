import itertools

import numpy as np
import pytest

from fgnet.graph import Graph


def complete(n):
    return Graph.from_edges(n, list(itertools.combinations(range(n), 2)))


def path(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star(leaves):
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def random_graph(rng, n_max=30, p=None):
    n = int(rng.integers(1, n_max + 1))
    p = float(rng.uniform(0.05, 0.7)) if p is None else p
    i, j = np.triu_indices(n, 1)
    keep = rng.random(len(i)) < p
    return Graph.from_edges(n, np.stack([i[keep], j[keep]], axis=1))


def brute_adjacency(g):
    a = np.zeros((g.num_nodes, g.num_nodes), dtype=bool)
    a[g.edges[:, 0], g.edges[:, 1]] = True
    return a | a.T


def brute_cliques(g, k):
    a = brute_adjacency(g)
    return sum(
        all(a[u, v] for u, v in itertools.combinations(s, 2))
        for s in itertools.combinations(range(g.num_nodes), k)
    )


def brute_spokes(g, k):
    """Count (hub, k-subset of its neighbours) by enumeration."""
    a = brute_adjacency(g)
    total = 0
    for v in range(g.num_nodes):
        nb = np.flatnonzero(a[v])
        total += sum(1 for _ in itertools.combinations(nb, k))
    return total


def hop_distances(g):
    """Floyd-Warshall on the dense adjacency; unreachable pairs are inf."""
    n = g.num_nodes
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0)
    a = brute_adjacency(g)
    dist[a] = 1
    for k in range(n):
        dist = np.minimum(dist, dist[:, [k]] + dist[[k], :])
    return dist


def union_find_components(g):
    parent = list(range(g.num_nodes))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edges.tolist():
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    return len({find(x) for x in range(g.num_nodes)})


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, repeated together at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
