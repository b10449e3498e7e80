import warnings

import numpy as np
import pytest

from conftest import complete, hop_distances, path, random_graph, star
from fgnet import boxdim
from fgnet.graph import Graph


def optimal_cover(g, l_box):
    """Smallest number of boxes (pairwise distance < l_box): exact colouring by backtracking."""
    conflict = hop_distances(g) >= l_box
    n = g.num_nodes
    order = np.argsort(-conflict.sum(axis=1), kind="stable")

    def colourable(k):
        colors = [-1] * n

        def place(pos):
            if pos == n:
                return True
            v = order[pos]
            used = {colors[u] for u in range(n) if conflict[v, u] and colors[u] >= 0}
            for c in range(min(k, max(colors) + 2)):
                if c not in used:
                    colors[v] = c
                    if place(pos + 1):
                        return True
                    colors[v] = -1
            return False

        return place(0)

    return next(k for k in range(1, n + 1) if colourable(k)) if n else 0


def test_box_examples():
    p3 = path(3)
    assert boxdim.box_cover(p3, 1) == 3
    assert boxdim.box_cover(p3, 2) == 2
    assert boxdim.box_cover(p3, 3) == 1
    assert optimal_cover(p3, 2) == 2


def test_unit_box_is_singletons(rng):
    for _ in range(10):
        g = random_graph(rng, 20)
        assert boxdim.box_cover(g, 1) == g.num_nodes


def test_two_triangles_one_box_each():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    for l_box in (2, 3, 5):
        assert boxdim.box_cover(g, l_box) == 2


def test_boxes_are_valid(rng):
    for _ in range(40):
        g = random_graph(rng, 25, p=float(rng.uniform(0.05, 0.3)))
        dist = hop_distances(g)
        for l_box in (2, 3, 4):
            boxes = boxdim.box_assignment(g, l_box)
            for b in np.unique(boxes):
                members = np.flatnonzero(boxes == b)
                assert np.all(dist[np.ix_(members, members)] < l_box)


def test_greedy_near_optimal_on_small_graphs(rng):
    for _ in range(60):
        g = random_graph(rng, 12, p=float(rng.uniform(0.12, 0.5)))
        for l_box in (2, 3):
            greedy = boxdim.box_cover(g, l_box)
            best = optimal_cover(g, l_box)
            assert best <= greedy <= best + 1


def test_path_dimension_is_one():
    res = boxdim.fractal_dimension(path(64), [2, 4, 8, 16])
    assert res.d_box == pytest.approx(1.0, abs=0.25)
    assert not res.degenerate
    assert list(res.n_boxes) == [32, 16, 8, 4]


def test_grid_dimension_near_two():
    side = 20
    edges = [(i * side + j, i * side + j + 1) for i in range(side) for j in range(side - 1)]
    edges += [(i * side + j, (i + 1) * side + j) for i in range(side - 1) for j in range(side)]
    res = boxdim.fractal_dimension(Graph.from_edges(side * side, edges), [2, 3, 4, 6, 8])
    assert 1.5 < res.d_box < 2.5


def test_degenerate_range_warns():
    with pytest.warns(RuntimeWarning):
        res = boxdim.fractal_dimension(star(6))
    assert res.degenerate and res.d_box == 0.0
    with pytest.warns(RuntimeWarning):
        assert boxdim.fractal_dimension(complete(5)).degenerate
    with pytest.raises(ValueError):
        boxdim.fractal_dimension(path(10), [2, 3])


def test_random_orders_average():
    g = path(30)
    counts, diam = boxdim.box_counts(g, [2, 3], n_orders=4, seed=1)
    assert diam == 29
    assert np.all(counts >= [15, 10])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        boxdim.fractal_dimension(g, n_orders=3)


def test_refinement_never_adds_boxes(rng):
    for _ in range(40):
        g = random_graph(rng, 30, p=float(rng.uniform(0.05, 0.3)))
        for l_box in (2, 3, 4):
            assert boxdim.box_cover(g, l_box) <= boxdim.box_cover(g, l_box, refine=0)
