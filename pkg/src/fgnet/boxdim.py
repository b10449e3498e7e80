"""Box-covering fractal dimension by greedy colouring.

A box of size ``l`` is a node set whose pairwise graph distances are all
below ``l``. Colouring the auxiliary graph that joins nodes at distance
``>= l`` gives a cover: every colour class is a box. Components are covered
independently.

The first colouring is greedy in ascending node order. A few iterated-greedy
passes follow, each recolouring the nodes class by class (last class first).
Such a pass never uses more colours than the colouring it starts from, and
it usually trims one or two boxes off the plain greedy count.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csgraph

from .errors import ResourceLimitError
from .graph import Graph
from .rng import generator

COMPONENT_LIMIT = 20000
# components up to this size get all-pairs BFS by dense matrix products
DENSE_BFS_LIMIT = 4000
REFINE_PASSES = 8


def _component_distances(g: Graph):
    """Yield (node indices, all-pairs hop distances) per component."""
    ncomp, labels = g.components()
    adj = g.adjacency
    for c in range(ncomp):
        nodes = np.flatnonzero(labels == c)
        if len(nodes) > COMPONENT_LIMIT:
            raise ResourceLimitError(f"component of size {len(nodes)} exceeds the box-cover limit {COMPONENT_LIMIT}")
        if len(nodes) == 1:
            yield nodes, np.zeros((1, 1))
            continue
        sub = adj[nodes][:, nodes]
        if len(nodes) <= DENSE_BFS_LIMIT:
            yield nodes, _dense_bfs(sub)
        else:
            yield nodes, csgraph.shortest_path(sub, method="D", unweighted=True, directed=False)


def _dense_bfs(sub) -> np.ndarray:
    """Hop distances from every source at once, one BLAS product per level."""
    n = sub.shape[0]
    a = sub.toarray().astype(np.float32)
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    reached = np.eye(n, dtype=bool)
    frontier = reached.astype(np.float32)
    level = 0
    while True:
        level += 1
        new = (frontier @ a > 0) & ~reached
        if not new.any():
            return dist
        dist[new] = level
        reached |= new
        frontier = new.astype(np.float32)


def _greedy_colors(far: np.ndarray, order: np.ndarray) -> np.ndarray:
    """Sequential greedy colouring of the conflict graph ``far`` (boolean matrix)."""
    n = len(far)
    colors = np.empty(n, dtype=np.int64)
    # blocked[c, j]: node j conflicts with some node already given colour c
    blocked = np.zeros((1, n), dtype=bool)
    ncol = 0
    for i in order:
        free = np.flatnonzero(~blocked[:ncol, i])
        c = int(free[0]) if len(free) else ncol
        if c == ncol:
            if ncol == len(blocked):
                blocked = np.vstack([blocked, np.zeros_like(blocked)])
            ncol += 1
        colors[i] = c
        blocked[c] |= far[i]
    return colors


def _cover_colors(dist: np.ndarray, l_box: float, order: np.ndarray, passes: int) -> np.ndarray:
    if dist.max() < l_box:
        return np.zeros(len(dist), dtype=np.int64)
    far = dist >= l_box
    colors = _greedy_colors(far, order)
    idx = np.arange(len(dist))
    for _ in range(passes):
        nxt = _greedy_colors(far, np.lexsort((idx, -colors)))
        if np.array_equal(nxt, colors):
            break
        colors = nxt
    return colors


def box_assignment(g: Graph, l_box: float, order=None, refine: int = REFINE_PASSES) -> np.ndarray:
    """Box id per node for a greedy cover with boxes of size ``l_box``.

    Nodes are coloured in ascending index order unless ``order`` (a
    permutation of all nodes) is given; ``refine`` iterated-greedy passes
    follow.
    """
    if l_box < 1:
        raise ValueError("box size must be >= 1")
    boxes = np.full(g.num_nodes, -1, dtype=np.int64)
    rank = None
    if order is not None:
        rank = np.empty(g.num_nodes, dtype=np.int64)
        rank[np.asarray(order)] = np.arange(g.num_nodes)
    offset = 0
    for nodes, dist in _component_distances(g):
        local = np.arange(len(nodes)) if rank is None else np.argsort(rank[nodes], kind="stable")
        colors = _cover_colors(dist, l_box, local, refine)
        boxes[nodes] = colors + offset
        offset += int(colors.max()) + 1
    return boxes


def box_cover(g: Graph, l_box: float, order=None, refine: int = REFINE_PASSES) -> int:
    """Number of boxes in the greedy cover."""
    if g.num_nodes == 0:
        return 0
    return int(box_assignment(g, l_box, order, refine).max()) + 1


def box_counts(
    g: Graph, l_values, n_orders: int = 1, seed: int = 0, refine: int = REFINE_PASSES
) -> tuple[np.ndarray, int]:
    """``N_B`` for each box size and the largest component diameter.

    With ``n_orders > 1`` the counts are averaged over random colouring
    orders (the first order is always ascending index).
    """
    return _counts(list(_component_distances(g)), l_values, n_orders, seed, refine)


def _counts(comps, l_values, n_orders, seed, refine):
    l_values = np.asarray(list(l_values), dtype=float)
    diam = max((int(dist.max()) for _, dist in comps), default=0)
    rng = generator(seed)
    totals = np.zeros(len(l_values))
    for rep in range(n_orders):
        for k, l_box in enumerate(l_values):
            for nodes, dist in comps:
                order = np.arange(len(nodes)) if rep == 0 else rng.permutation(len(nodes))
                totals[k] += int(_cover_colors(dist, l_box, order, refine).max()) + 1
    return totals / n_orders, diam


@dataclass(frozen=True)
class BoxCoverResult:
    l_values: np.ndarray
    n_boxes: np.ndarray
    d_box: float
    fit_range: tuple
    residual: float
    degenerate: bool = False


def fractal_dimension(
    g: Graph, l_range=None, max_l: int = 12, n_orders: int = 1, seed: int = 0, refine: int = REFINE_PASSES
) -> BoxCoverResult:
    """Fit ``log N_B = -d_B log l + c`` over box sizes ``l_range``.

    The default range is ``2..min(diameter, max_l)``. A range with fewer than
    three sizes, or with constant ``N_B``, gives a degenerate result with
    ``d_B = 0`` and a warning.
    """
    if l_range is not None and len(l_range) < 3:
        raise ValueError("need at least three box sizes")
    comps = list(_component_distances(g))
    if l_range is None:
        diam = max((int(dist.max()) for _, dist in comps), default=0)
        l_range = list(range(2, min(diam, max_l) + 1))
    l_values = np.asarray(l_range, dtype=float)
    counts, _ = _counts(comps, l_values, n_orders, seed, refine)
    fit_range = (float(l_values.min()), float(l_values.max())) if len(l_values) else (np.nan, np.nan)
    if len(l_values) < 3 or np.all(counts == counts[0]):
        warnings.warn("degenerate box-size range; fractal dimension set to 0", RuntimeWarning, stacklevel=2)
        return BoxCoverResult(l_values, counts, 0.0, fit_range, 0.0, degenerate=True)
    x, y = np.log(l_values), np.log(counts)
    coef, res, *_ = np.polyfit(x, y, 1, full=True)
    residual = float(res[0]) if len(res) else 0.0
    return BoxCoverResult(l_values, counts, float(-coef[0]), fit_range, residual)
