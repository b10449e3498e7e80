"""Fractal Gaussian Network generation.

Nodes are a Cox process driven by a grid chaos measure: ``N ~ Poisson(n M(Omega))``
points, each placed in a cell with probability proportional to its mass and
uniformly inside it. Each unordered pair is then joined with probability
``exp(-|x - y|^2 / sigma^2)`` (or ``1{|x - y| <= sigma}`` for the hard
threshold model), with ``sigma = pi^{-1/2} rho^{1/d} n^{-1/d}``.

Randomness is split into three named substreams of the graph seed:
``field``, ``nodes`` and ``edges``. Edge coins are keyed by node pair, so the
all-pairs sampler and the KD-tree sampler give the same edges on every pair
inside the cutoff radius.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np
from scipy.spatial import cKDTree

from . import gmc
from .errors import ConfigError, DomainError, ResourceLimitError
from .graph import Graph
from .rng import derive_seed, generator, pair_uniforms

EDGE_MODELS = ("gaussian", "hard")
EXACT_PAIR_LIMIT = 2000
CUTOFF_RADIUS = 4.0
MAX_NODES = 2_000_000
PAIR_CHUNK = 512
MAX_EDGES = 50_000_000


def sigma_for(n: float, rho: float, d: int) -> float:
    """Connection scale ``pi^{-1/2} rho^{1/d} n^{-1/d}`` (mean degree ``rho``)."""
    if n < 1 or rho <= 0 or d < 1:
        raise DomainError("sigma_for needs n >= 1, rho > 0, d >= 1")
    return math.pi**-0.5 * (rho / n) ** (1.0 / d)


def _check_model(model: str) -> str:
    aliases = {"gaussian_kernel": "gaussian", "hard_threshold": "hard"}
    model = aliases.get(model, model)
    if model not in EDGE_MODELS:
        raise ConfigError(f"edge model must be one of {EDGE_MODELS}, got {model!r}")
    return model


@dataclass(frozen=True)
class FgnParams:
    """Generation parameters for one FGN.

    ``cells_per_side`` and ``t`` default to ``ceil(8 / sigma)`` (see
    :func:`gmc.default_cells_per_side`) and
    ``ln(cells_per_side)``.
    """

    n: int
    rho: float = 1.0
    gamma: float = 0.0
    d: int = 2
    edge_model: str = "gaussian"
    seed: int = 0
    cells_per_side: int | None = None
    t: float | None = None
    field_method: str = "auto"
    exact_pair_limit: int = EXACT_PAIR_LIMIT
    cutoff: float = CUTOFF_RADIUS
    max_nodes: int = MAX_NODES

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("n must be a positive integer")
        if self.rho <= 0:
            raise ConfigError("rho must be positive")
        if self.d < 1:
            raise ConfigError("d must be >= 1")
        object.__setattr__(self, "edge_model", _check_model(self.edge_model))
        gmc.check_subcritical(self.gamma, self.d)

    @classmethod
    def from_nu(cls, n: int, nu: float, d: int = 2, **kwargs) -> "FgnParams":
        if nu < 0:
            raise DomainError("nu must be non-negative")
        return cls(n=n, gamma=math.sqrt(nu * d), d=d, **kwargs)

    @property
    def nu(self) -> float:
        return self.gamma**2 / self.d

    @property
    def sigma(self) -> float:
        return sigma_for(self.n, self.rho, self.d)

    def grid_size(self) -> int:
        if self.cells_per_side is not None:
            return int(self.cells_per_side)
        if self.gamma == 0:
            return 1
        return gmc.default_cells_per_side(self.sigma, self.d)

    def as_dict(self) -> dict:
        out = asdict(self)
        out["nu"] = self.nu
        out["sigma"] = self.sigma
        return out


@dataclass(frozen=True)
class SbmParams:
    """Two-community FGN: independent measures with ``gamma1``, ``gamma2``."""

    n: int
    gamma1: float
    gamma2: float
    sigma_in: float
    sigma_out: float
    d: int = 2
    seed: int = 0
    cells_per_side: int | None = None
    t: float | None = None
    field_method: str = "auto"
    exact_pair_limit: int = EXACT_PAIR_LIMIT
    cutoff: float = CUTOFF_RADIUS
    max_nodes: int = MAX_NODES

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("n must be a positive integer")
        if self.sigma_in <= 0 or self.sigma_out <= 0:
            raise ConfigError("sigma_in and sigma_out must be positive")
        gmc.check_subcritical(self.gamma1, self.d)
        gmc.check_subcritical(self.gamma2, self.d)

    def grid_size(self) -> int:
        if self.cells_per_side is not None:
            return int(self.cells_per_side)
        if self.gamma1 == 0 and self.gamma2 == 0:
            return 1
        return gmc.default_cells_per_side(min(self.sigma_in, self.sigma_out), self.d)


@dataclass(frozen=True, eq=False)
class PointCloud:
    positions: np.ndarray

    @property
    def count(self) -> int:
        return int(len(self.positions))

    @property
    def d(self) -> int:
        return int(self.positions.shape[1])


def sample_nodes(measure: gmc.GmcMeasure, n: float, seed: int, max_nodes: int = MAX_NODES) -> PointCloud:
    """Draw ``N ~ Poisson(n * total_mass)`` points from the normalized measure."""
    if not measure.total_mass > 0:
        raise DomainError("measure has no mass")
    rng = generator(seed)
    count = int(rng.poisson(n * measure.total_mass))
    if count > max_nodes:
        raise ResourceLimitError(f"sampled N={count} exceeds the node cap {max_nodes}")
    d, m = measure.d, measure.m
    masses = measure.cell_masses.ravel()
    cdf = np.cumsum(masses)
    cdf /= cdf[-1]
    cells = np.searchsorted(cdf, rng.random(count), side="right")
    cells = np.minimum(cells, masses.size - 1)
    idx = np.stack(np.unravel_index(cells, (m,) * d), axis=1).astype(float) if count else np.zeros((0, d))
    pos = (idx + rng.random((count, d))) / m - 0.5
    return PointCloud(pos)


def edge_prob(x, y, sigma: float, model: str = "gaussian"):
    """Connection probability for points ``x`` and ``y`` (broadcasts over rows)."""
    model = _check_model(model)
    diff = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    d2 = np.sum(diff**2, axis=-1)
    if model == "gaussian":
        return np.exp(-d2 / sigma**2)
    return (d2 <= sigma**2).astype(float)


def _candidate_chunks(positions: np.ndarray, radius: float, exact_limit: int, chunk: int = PAIR_CHUNK):
    """Yield ``(k, 2)`` arrays of index pairs ``i < j`` to test, in bounded batches."""
    n = len(positions)
    if n < 2:
        return
    if n <= exact_limit:
        i, j = np.triu_indices(n, k=1)
        yield np.stack([i, j], axis=1).astype(np.int64)
        return
    tree = cKDTree(positions)
    for start in range(0, n, chunk):
        stop = min(n, start + chunk)
        local = cKDTree(positions[start:stop])
        hits = local.sparse_distance_matrix(tree, radius, output_type="ndarray")
        i = hits["i"].astype(np.int64) + start
        j = hits["j"].astype(np.int64)
        keep = i < j
        yield np.stack([i[keep], j[keep]], axis=1)


def wire_edges(
    positions: np.ndarray,
    sigma,
    edge_key: int,
    model: str = "gaussian",
    exact_limit: int = EXACT_PAIR_LIMIT,
    cutoff: float = CUTOFF_RADIUS,
    pair_sigma=None,
    max_edges: int = MAX_EDGES,
) -> np.ndarray:
    """Edges among ``positions`` using pair-keyed coins.

    Up to ``exact_limit`` points every pair is tested. Above it only pairs
    within ``cutoff * sigma`` (``sigma`` for the hard model) are tested; the
    per-pair probability ignored that way is below ``exp(-cutoff**2)``.
    Candidates are generated a block of points at a time, so a dense cluster
    of nodes never materializes all of its pairs at once.
    ``pair_sigma`` optionally maps candidate pairs to their own scale (used
    by the block model, where ``sigma`` is then the largest scale).
    Raises ``ResourceLimitError`` once more than ``max_edges`` edges are kept.
    """
    model = _check_model(model)
    radius = cutoff * sigma if model == "gaussian" else sigma
    kept = [np.zeros((0, 2), dtype=np.int64)]
    total = 0
    for pairs in _candidate_chunks(positions, radius, exact_limit):
        if len(pairs) == 0:
            continue
        s = sigma if pair_sigma is None else pair_sigma(pairs)
        p = edge_prob(positions[pairs[:, 0]], positions[pairs[:, 1]], s, model)
        coins = pair_uniforms(edge_key, pairs[:, 0], pairs[:, 1])
        kept.append(pairs[coins < p])
        total += len(kept[-1])
        if total > max_edges:
            raise ResourceLimitError(f"graph exceeds the edge cap of {max_edges}")
    edges = np.concatenate(kept)
    order = np.lexsort((edges[:, 1], edges[:, 0]))
    return edges[order]


def measure_for(params: FgnParams) -> gmc.GmcMeasure:
    """Fresh chaos measure from the ``field`` substream of ``params.seed``."""
    m = params.grid_size()
    if params.gamma == 0:
        return gmc.lebesgue(params.d, m)
    return gmc.sample_gmc(
        params.gamma, params.d, m, derive_seed(params.seed, stream="field"), t=params.t, method=params.field_method
    )


def generate_graph(params: FgnParams, measure: gmc.GmcMeasure | None = None) -> Graph:
    """Sample one FGN.

    Passing ``measure`` reuses an existing chaos realization (tests, and
    common-field scaling runs); its ``gamma`` must match ``params.gamma``.
    """
    if measure is None:
        measure = measure_for(params)
    elif not math.isclose(measure.gamma, params.gamma) or measure.d != params.d:
        raise ConfigError("injected measure does not match params (gamma, d)")
    cloud = sample_nodes(measure, params.n, derive_seed(params.seed, stream="nodes"), params.max_nodes)
    edges = wire_edges(
        cloud.positions,
        params.sigma,
        derive_seed(params.seed, stream="edges"),
        params.edge_model,
        params.exact_pair_limit,
        params.cutoff,
    )
    prov = params.as_dict()
    prov["grid"] = measure.m
    prov["total_mass"] = measure.total_mass
    return Graph(cloud.count, edges, positions=cloud.positions, provenance=prov)


def generate_sbm(params: SbmParams) -> Graph:
    """Two-community FGN with ground-truth labels (0 then 1)."""
    m = params.grid_size()
    clouds = []
    for k, gamma in enumerate((params.gamma1, params.gamma2), start=1):
        if gamma == 0:
            measure = gmc.lebesgue(params.d, m)
        else:
            measure = gmc.sample_gmc(
                gamma, params.d, m, derive_seed(params.seed, k, stream="field"), t=params.t, method=params.field_method
            )
        clouds.append(sample_nodes(measure, params.n, derive_seed(params.seed, k, stream="nodes"), params.max_nodes))
    positions = np.concatenate([c.positions for c in clouds], axis=0)
    labels = np.concatenate([np.full(c.count, i, dtype=np.int64) for i, c in enumerate(clouds)])

    def pair_sigma(pairs):
        same = labels[pairs[:, 0]] == labels[pairs[:, 1]]
        return np.where(same, params.sigma_in, params.sigma_out)

    edges = wire_edges(
        positions,
        max(params.sigma_in, params.sigma_out),
        derive_seed(params.seed, stream="edges"),
        "gaussian",
        params.exact_pair_limit,
        params.cutoff,
        pair_sigma=pair_sigma,
    )
    prov = asdict(params)
    prov["grid"] = m
    return Graph(len(positions), edges, positions=positions, labels=labels, provenance=prov)


def with_seed(params, seed: int):
    return replace(params, seed=int(seed))
