"""Dense Laplacian and adjacency spectra with multiplicity profiling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import ResourceLimitError
from .graph import Graph

DENSE_EIG_LIMIT = 6000


@dataclass(frozen=True)
class Cluster:
    value: float
    count: int
    is_peak: bool = False


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    matrix_kind: str
    eigenvalues: np.ndarray
    clusters: list
    scree: np.ndarray
    num_components: int
    num_edges: int

    @property
    def zero_multiplicity(self) -> int:
        """Number of eigenvalues within ``1e-8 * max(1, max|lambda|)`` of 0."""
        if len(self.eigenvalues) == 0:
            return 0
        return int(np.sum(np.abs(self.eigenvalues) <= 10 * _default_tol(self.eigenvalues)))


def _default_tol(values: np.ndarray) -> float:
    scale = float(np.max(np.abs(values))) if len(values) else 0.0
    return 1e-9 * max(1.0, scale)


def multiplicity_profile(eigenvalues, tol: float | None = None, peak_min: float | None = None) -> list[Cluster]:
    """Group sorted eigenvalues whose consecutive gaps are at most ``tol``.

    ``tol`` defaults to ``1e-9 * max(1, max|lambda|)``. A cluster is a peak
    when its count reaches ``peak_min`` (default 0.5% of the spectrum, at
    least 2).
    """
    vals = np.asarray(eigenvalues, dtype=float)
    if len(vals) == 0:
        return []
    if tol is None:
        tol = _default_tol(vals)
    if peak_min is None:
        peak_min = max(2, int(np.ceil(0.005 * len(vals))))
    breaks = np.flatnonzero(np.diff(vals) > tol) + 1
    out = []
    for chunk in np.split(vals, breaks):
        out.append(Cluster(float(np.mean(chunk)), int(len(chunk)), bool(len(chunk) >= peak_min)))
    return out


def laplacian_matrix(g: Graph) -> np.ndarray:
    a = g.adjacency.toarray().astype(float)
    return np.diag(a.sum(axis=1)) - a


def spectrum(g: Graph, kind: str = "laplacian", max_nodes: int = DENSE_EIG_LIMIT, tol: float | None = None) -> SpectrumReport:
    """Full symmetric eigendecomposition of the Laplacian or adjacency matrix."""
    if kind not in ("laplacian", "adjacency"):
        raise ValueError(f"kind must be 'laplacian' or 'adjacency', got {kind!r}")
    if g.num_nodes > max_nodes:
        raise ResourceLimitError(
            f"dense eigensolve limited to {max_nodes} nodes (graph has {g.num_nodes}); subsample the graph first"
        )
    if kind == "laplacian":
        mat = laplacian_matrix(g)
    else:
        mat = g.adjacency.toarray().astype(float)
    vals = linalg.eigvalsh(mat) if g.num_nodes else np.zeros(0)
    clusters = multiplicity_profile(vals, tol)
    mags = np.sort(np.abs(vals))[::-1]
    scree = np.column_stack([np.arange(1, len(mags) + 1), mags])
    ncomp, _ = g.components()
    return SpectrumReport(kind, vals, clusters, scree, ncomp, g.num_edges)
