"""Fractality estimation, detection, scaling fits and count predictions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate, special, stats

from . import gmc
from .errors import DomainError, InsufficientDataError, NumericalError
from .rng import generator

# Reported counts for the SNAP ANSWERS and FLICKR graphs, and the
# fractality values published alongside them.
ANSWERS_NODES = 598_314
ANSWERS_EDGES = 1_834_200
ANSWERS_REPORTED_NU = 0.3234
FLICKR_REPORTED_NU = 0.1834


@dataclass(frozen=True)
class EstimateResult:
    nu_hat: float
    mode: str
    edges: float
    nodes: float
    m: int = 1
    inputs: tuple = ()


@dataclass(frozen=True)
class DetectionResult:
    declared_fractal: bool
    nu0: float
    statistic: float
    threshold: float
    nodes: float


def _check_counts(E: float, N: float) -> None:
    if not N >= 3:
        raise InsufficientDataError(f"estimator needs N >= 3, got {N}")
    if not E >= 1:
        raise InsufficientDataError(f"estimator needs E >= 1, got {E}")


def estimate_nu_single(E: float, N: float) -> EstimateResult:
    """``ln E / ln N - 1`` from one observed graph."""
    _check_counts(E, N)
    nu = math.log(E) / math.log(N) - 1.0
    return EstimateResult(nu, "single_pass", float(E), float(N), 1, ((E, N),))


def estimate_nu_multi(records: Sequence[tuple[float, float]]) -> EstimateResult:
    """``ln(mean E) / ln(mean N) - 1`` from ``(E_i, N_i)`` pairs of i.i.d. graphs."""
    recs = [(float(e), float(n)) for e, n in records]
    if not recs:
        raise InsufficientDataError("no records")
    e_bar = float(np.mean([e for e, _ in recs]))
    n_bar = float(np.mean([n for _, n in recs]))
    _check_counts(e_bar, n_bar)
    nu = math.log(e_bar) / math.log(n_bar) - 1.0
    return EstimateResult(nu, "multi_pass", e_bar, n_bar, len(recs), tuple(recs))


def detect_fractality(E: float, N: float, nu0: float = 0.3) -> DetectionResult:
    """Declare fractality when ``E > N^(1 + nu0/2)``."""
    if not nu0 > 0:
        raise DomainError("nu0 must be positive")
    if N < 2:
        raise InsufficientDataError(f"detector needs N >= 2, got {N}")
    threshold = float(N) ** (1.0 + 0.5 * nu0)
    return DetectionResult(bool(E > threshold), float(nu0), float(E), threshold, float(N))


def detect_fractality_multi(records: Sequence[tuple[float, float]], nu0: float = 0.3) -> DetectionResult:
    """Mean-based detector: ``mean E > (mean N)^(1 + nu0/2)``."""
    if not records:
        raise InsufficientDataError("no records")
    e_bar = float(np.mean([e for e, _ in records]))
    n_bar = float(np.mean([n for _, n in records]))
    return detect_fractality(e_bar, n_bar, nu0)


def aggregate(values, how: str = "median", trim: float = 0.1) -> float:
    """Central value of replicate counts: ``median``, ``mean`` or ``trimmed_mean``."""
    v = np.asarray(values, dtype=float)
    if how == "median":
        return float(np.median(v))
    if how == "mean":
        return float(np.mean(v))
    if how == "trimmed_mean":
        return float(stats.trim_mean(v, trim))
    raise ValueError(f"unknown aggregator {how!r}")


@dataclass(frozen=True)
class ScalingFit:
    points: list
    slope: float
    intercept: float
    count_kind: str
    aggregator: str
    diagnostics: dict = field(default_factory=dict)


def fit_scaling_exponent(batches, count_kind: str = "edges", aggregator: str = "median", trim: float = 0.1) -> ScalingFit:
    """Least-squares slope of ln(aggregated count) on ln(mean N).

    ``batches`` maps each size parameter ``n`` to a sequence of
    ``(N, count)`` replicate pairs (or is a sequence of such sequences).
    """
    groups = list(batches.values()) if isinstance(batches, dict) else list(batches)
    if len(groups) < 3:
        raise InsufficientDataError("scaling fit needs at least 3 size values")
    points = []
    for grp in groups:
        arr = np.asarray(grp, dtype=float).reshape(-1, 2)
        if len(arr) == 0:
            raise InsufficientDataError("empty replicate batch")
        c = aggregate(arr[:, 1], aggregator, trim)
        if c <= 0:
            raise InsufficientDataError(f"aggregated {count_kind} count is zero at mean N={arr[:, 0].mean():.1f}")
        points.append((float(arr[:, 0].mean()), c))
    x = np.log([p[0] for p in points])
    y = np.log([p[1] for p in points])
    if np.ptp(x) == 0:
        raise InsufficientDataError("all batches have the same mean N")
    slope, intercept = np.polyfit(x, y, 1)
    return ScalingFit(points, float(slope), float(intercept), count_kind, aggregator)


def radial_moment(gamma: float, d: int) -> float:
    """``int_{R^d} |x|^{-gamma^2} exp(-|x|^2) dx`` by radial quadrature."""
    a = gamma**2
    if a >= d:
        raise DomainError("radial integral diverges for gamma^2 >= d")
    surface = 2.0 * math.pi ** (d / 2) / special.gamma(d / 2)
    # substitute s = r^(d - a) to remove the endpoint singularity at r = 0
    p = d - a
    f = lambda s: math.exp(-(s ** (2.0 / p))) / p
    val, err = integrate.quad(f, 0.0, math.inf, limit=200)
    if not math.isfinite(val) or err > 1e-6 * max(1.0, val):
        raise NumericalError("radial quadrature did not converge")
    return surface * val


def _kernel_factor(kernel, gamma: float, pairs: int) -> float:
    if kernel is None:
        return 1.0
    return math.exp(pairs * gamma**2 * gmc.kernel_offset(kernel))


def edge_constant(gamma: float, d: int, kernel=None) -> float:
    """Prefactor of ``rho^(1-nu) n^(1+nu)`` in the expected edge count.

    ``0.5 * pi^((gamma^2 - d)/2) * radial_moment(gamma, d)``, equal to 1/2
    at ``gamma = 0``. With a ``kernel`` the finite-scale covariance offset
    ``exp(gamma^2 * kernel_offset)`` is included.
    """
    return 0.5 * math.pi ** ((gamma**2 - d) / 2.0) * radial_moment(gamma, d) * _kernel_factor(kernel, gamma, 1)


def predicted_edge_count(gamma: float, d: int, rho: float, n: float, kernel=None) -> float:
    """Asymptotic expected edge count ``C(gamma, d) rho^(1-nu) n^(1+nu)``; needs ``nu < 1``."""
    nu = gamma**2 / d
    if nu >= 1:
        raise DomainError(f"edge-count asymptotics need nu < 1, got {nu:.4g}")
    return edge_constant(gamma, d, kernel) * rho ** (1.0 - nu) * n ** (1.0 + nu)


def triangle_integral(gamma: float, d: int, samples: int = 400_000, seed: int = 12345, rtol: float = 0.02):
    """``J = iint |u|^-a |v|^-a |u-v|^-a exp(-|u|^2-|v|^2-|u-v|^2) du dv``, ``a = gamma^2``.

    The radial part in ``R^{2d}`` is integrated in closed form, leaving a
    Monte Carlo average over the unit sphere ``S^{2d-1}``. Directions are
    drawn from an equal mixture of the uniform law and laws concentrated near
    the three singular sets ``u = 0``, ``v = 0`` and ``u = v``. Returns
    ``(estimate, standard error)``; raises ``NumericalError`` when the
    relative standard error exceeds ``rtol``.
    """
    a = gamma**2
    if 3 * a >= 2 * d:
        raise DomainError("triangle integral diverges for 3 gamma^2 >= 2d")
    if a == 0:
        return math.pi**d / 3 ** (d / 2), 0.0
    dim = 2 * d
    area = 2.0 * math.pi ** (dim / 2) / special.gamma(dim / 2)
    power = d - 1.5 * a
    radial = 0.5 * special.gamma(power)
    rng = generator(seed)

    # mixture proposal: component 0 uniform on the sphere; components 1-3 use
    # a linear map that shrinks one singular coordinate block before normalizing
    shrink = 0.15
    maps = [np.eye(dim)]
    blk = np.eye(d)
    zero = np.zeros((d, d))
    maps.append(np.block([[shrink * blk, zero], [zero, blk]]))  # u small
    maps.append(np.block([[blk, zero], [zero, shrink * blk]]))  # v small
    # u - v small: coordinates (s, w) with u = w + s/2, v = w - s/2
    half = np.block([[0.5 * blk, blk], [-0.5 * blk, blk]])
    maps.append(half @ np.block([[shrink * blk, zero], [zero, blk]]))
    maps = [mp / np.linalg.norm(mp, 2) for mp in maps]
    inv = [np.linalg.inv(mp) for mp in maps]
    dets = [abs(np.linalg.det(mp)) for mp in maps]

    comp = rng.integers(0, 4, size=samples)
    z = rng.standard_normal((samples, dim))
    pts = np.empty_like(z)
    for k in range(4):
        sel = comp == k
        pts[sel] = z[sel] @ maps[k].T
    omega = pts / np.linalg.norm(pts, axis=1, keepdims=True)

    # density on the sphere of the direction of A z, z ~ N(0, I): the angular
    # central Gaussian law, proportional to |det A|^-1 (w' (A A')^-1 w)^(-dim/2)
    dens = np.zeros(samples)
    for k in range(4):
        q = np.sum((omega @ inv[k].T) ** 2, axis=1)
        dens += 0.25 * q ** (-dim / 2) / dets[k] / area
    u, v = omega[:, :d], omega[:, d:]
    nu_ = np.linalg.norm(u, axis=1)
    nv_ = np.linalg.norm(v, axis=1)
    nw_ = np.linalg.norm(u - v, axis=1)
    quad_form = nu_**2 + nv_**2 + nw_**2
    f = (nu_ * nv_ * nw_) ** (-a) * quad_form ** (-power)
    w = f / dens
    est = radial * float(w.mean())
    se = radial * float(w.std(ddof=1)) / math.sqrt(samples)
    if not math.isfinite(est) or se > rtol * est:
        raise NumericalError(f"triangle integral did not converge (relative error {se / est:.3g})")
    return est, se


def triangle_constant(gamma: float, d: int, **kwargs) -> float:
    """Prefactor of ``rho^(2-nu) n^(1+nu)`` in the predicted triangle count.

    ``J / 6 * pi^(gamma^2/2 - d)``; at ``gamma = 0`` this is
    ``1 / (6 * 3^(d/2))``.
    """
    j, _ = triangle_integral(gamma, d, **kwargs)
    return j / 6.0 * math.pi ** (gamma**2 / 2.0 - d)


def predicted_triangle_count(gamma: float, d: int, rho: float, n: float, **kwargs) -> float:
    """Predicted triangle count ``C rho^(2-nu) n^(1+nu)``; needs ``nu < 1/2``."""
    nu = gamma**2 / d
    if nu >= 0.5:
        raise DomainError(f"triangle-count prediction needs nu < 1/2, got {nu:.4g}")
    return triangle_constant(gamma, d, **kwargs) * rho ** (2.0 - nu) * n ** (1.0 + nu)


def spoke_clique_regime_check(k: int, gamma: float, d: int, kind: str) -> bool:
    """Whether ``nu`` lies in the validity range of the spoke or clique law.

    Spokes (``k >= 2``): ``nu < min(1/k, 2/(k(k-1)))``.
    Cliques (``k >= 3``): ``nu < min(1/(k-1), 2/((k-1)(k-2)))``.
    """
    nu = gamma**2 / d
    if kind in ("spokes", "spoke"):
        if k < 2:
            raise ValueError("spoke law needs k >= 2")
        bound = min(1.0 / k, 2.0 / (k * (k - 1)))
    elif kind in ("cliques", "clique"):
        if k < 3:
            raise ValueError("clique law needs k >= 3")
        bound = min(1.0 / (k - 1), 2.0 / ((k - 1) * (k - 2)))
    else:
        raise ValueError(f"kind must be 'spokes' or 'cliques', got {kind!r}")
    return nu < bound


def pairwise_motif_exponent(kind: str, k: int, nu: float) -> float:
    """Growth exponent of the expected count when every vertex pair of the
    motif carries its own ``|x - y|^-gamma^2`` factor.

    ``1 + P nu`` where ``P`` is the number of vertex pairs among the motif's
    vertices: ``C(k, 2)`` for a ``k``-clique, ``C(k+1, 2)`` for a ``k``-spoke
    (its leaves all sit within a few ``sigma`` of the hub).
    """
    if kind == "edges":
        pairs = 1
    elif kind == "triangles":
        pairs = 3
    elif kind in ("spokes", "spoke"):
        pairs = (k + 1) * k // 2
    elif kind in ("cliques", "clique"):
        pairs = k * (k - 1) // 2
    else:
        raise ValueError(f"unknown motif kind {kind!r}")
    return 1.0 + pairs * nu


def size_tail_fraction(node_counts, total_masses, n: float) -> float:
    """Fraction of replicates with ``N >= 2 n mean(M(Omega))``.

    The threshold uses the empirical mean of the total masses across the
    replicates, so the fraction tracks how far ``N/n`` strays above its
    typical scale.
    """
    N = np.asarray(node_counts, dtype=float)
    M = np.asarray(total_masses, dtype=float)
    return float(np.mean(N >= 2.0 * n * M.mean()))


def log_size_deviation_fraction(node_counts, n: float, eps: float = 0.1) -> float:
    """Fraction of replicates with ``|ln N / ln n - 1| > eps`` (``N = 0`` counts as a deviation).

    ``ln N = ln n (1 + o(1))`` in probability, so this fraction goes to 0 as
    ``n`` grows for any fixed ``eps``.
    """
    N = np.asarray(node_counts, dtype=float)
    with np.errstate(divide="ignore"):
        ratio = np.log(N) / math.log(n)
    return float(np.mean(~(np.abs(ratio - 1.0) <= eps)))
