"""Truncated log-correlated Gaussian fields and the grid GMC measure.

The field ``X_t`` lives on the cell centres of a regular grid over the cube
``[-1/2, 1/2]^d`` and has covariance

    K_t(r) = int_1^{e^t} k(u r) / u du,

for a radial kernel ``k`` with ``k(0) = 1``. Exponentiating gives the cell
masses ``exp(gamma X_t - gamma^2 t / 2) h^d`` of the chaos measure.

Two samplers are provided. ``dense`` factorizes the exact covariance matrix
(Cholesky) and is limited to a few thousand cells. ``circulant`` embeds the
grid in a torus of side 2, which reproduces the covariance exactly whenever
the kernel vanishes beyond ``r = 1`` (true for the default triangular
kernel), and samples with FFTs.
"""

from __future__ import annotations

import csv
import functools
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, linalg

from .errors import DomainError, InvalidKernelError, NumericalError, ResourceLimitError
from .rng import generator

DENSE_CELL_LIMIT = 4096
CIRCULANT_CELL_LIMIT = 1 << 20
# default and minimum grid cells per connection radius
PER_RADIUS = 8
MIN_PER_RADIUS = 4
MAX_JITTER = 1e-10


@dataclass(frozen=True)
class KernelSpec:
    """Radial kernel profile ``k(r)``.

    ``support`` is the radius beyond which the profile is identically zero
    (``inf`` when it is not compactly supported). Use :meth:`triangular` or
    :meth:`tabulated` rather than building one by hand.
    """

    name: str
    profile: Callable[[np.ndarray], np.ndarray] = field(compare=False)
    support: float = math.inf
    table: tuple[tuple[float, ...], tuple[float, ...]] | None = None

    @classmethod
    def triangular(cls) -> "KernelSpec":
        return TRIANGULAR

    @classmethod
    def tabulated(cls, r, k, name: str = "tabulated") -> "KernelSpec":
        """Piecewise-linear profile through ``(r, k)``, zero past the last node."""
        r = np.asarray(r, dtype=float)
        k = np.asarray(k, dtype=float)
        if r.ndim != 1 or r.shape != k.shape or r.size < 2:
            raise InvalidKernelError("tabulated kernel needs matching 1-d arrays of length >= 2")
        if r[0] != 0.0 or np.any(np.diff(r) <= 0):
            raise InvalidKernelError("tabulated radii must start at 0 and increase strictly")
        if not math.isclose(k[0], 1.0, abs_tol=1e-12):
            raise InvalidKernelError(f"kernel must satisfy k(0) = 1, got {k[0]}")
        if np.any(k < 0) or not np.all(np.isfinite(k)):
            raise InvalidKernelError("kernel values must be finite and non-negative")
        rr, kk = tuple(r.tolist()), tuple(k.tolist())

        def profile(x, _r=r, _k=k):
            return np.interp(np.asarray(x, dtype=float), _r, _k, right=0.0)

        return cls(name=name, profile=profile, support=float(r[-1]), table=(rr, kk))

    @property
    def is_triangular(self) -> bool:
        return self.name == "triangular"

    def __call__(self, r):
        return self.profile(r)


def _triangular_profile(r):
    return np.maximum(0.0, 1.0 - np.asarray(r, dtype=float))


TRIANGULAR = KernelSpec(name="triangular", profile=_triangular_profile, support=1.0)


def _quad_phi(spec: KernelSpec, r: float) -> float:
    upper = spec.support
    if r >= upper:
        return 0.0
    f = lambda u: float(spec.profile(u)) / u
    if math.isinf(upper):
        val, _ = integrate.quad(f, r, math.inf, limit=200)
    else:
        pts = None
        if spec.table is not None:
            pts = [x for x in spec.table[0] if r < x < upper] or None
        val, _ = integrate.quad(f, r, upper, points=pts, limit=200)
    if not math.isfinite(val):
        raise InvalidKernelError(f"integral of k(u)/u from {r} diverges for kernel {spec.name!r}")
    return val


def kernel_phi(spec: KernelSpec, r: float) -> float:
    """``phi(r) = int_r^inf k(u)/u du`` for ``r > 0``.

    For the triangular kernel this is ``-ln r - 1 + r`` on ``(0, 1]`` and 0
    beyond.
    """
    if not r > 0:
        raise ValueError("kernel_phi needs r > 0")
    if spec.is_triangular:
        return 0.0 if r >= 1.0 else -math.log(r) - 1.0 + r
    return _quad_phi(spec, float(r))


def kernel_offset(spec: KernelSpec) -> float:
    """Limit of ``phi(r) + ln r`` as ``r -> 0``.

    Equals ``int_0^1 (k(u) - 1)/u du + int_1^inf k(u)/u du``; it is -1 for
    the triangular kernel. The small-distance covariance of the field is
    ``ln(1/r) + kernel_offset``.
    """
    if spec.is_triangular:
        return -1.0
    pts = [spec.support] if spec.support < 1.0 else None
    inner, _ = integrate.quad(lambda u: (float(spec.profile(u)) - 1.0) / u, 0.0, 1.0, points=pts, limit=200)
    return inner + _quad_phi(spec, 1.0)


def covariance_t(spec: KernelSpec, r, t: float):
    """Truncated covariance ``K_t(r) = int_1^{e^t} k(u r)/u du``.

    Accepts scalar or array ``r >= 0``; ``K_t(0) = t`` exactly.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    scalar = np.ndim(r) == 0
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be non-negative")
    if spec.is_triangular:
        with np.errstate(divide="ignore", over="ignore"):
            upper = np.where(r > 0, np.minimum(math.exp(t), 1.0 / np.where(r > 0, r, 1.0)), math.exp(t))
        out = np.where(r < 1.0, np.log(upper) - r * (upper - 1.0), 0.0)
        out = np.where(r == 0, float(t), out)
    else:
        out = np.empty_like(r)
        flat_r = r.ravel()
        uniq, inv = np.unique(flat_r, return_inverse=True)
        vals = np.empty_like(uniq)
        for idx, rv in enumerate(uniq):
            if rv == 0:
                vals[idx] = t
            else:
                # K_t(r) = phi(r) - phi(r e^t)
                vals[idx] = _quad_phi(spec, rv) - _quad_phi(spec, rv * math.exp(t))
        out = vals[inv].reshape(r.shape)
    return float(out) if scalar else out


def _cells_per_side(h: float) -> int:
    m = int(round(1.0 / h))
    if m < 1 or abs(m * h - 1.0) > 1e-9:
        raise DomainError(f"grid spacing h={h} must divide the unit interval (1/h integer)")
    return m


def cell_centers(d: int, m: int) -> np.ndarray:
    """Cell-centre coordinates, shape ``(m**d, d)``, C order."""
    axis = (np.arange(m) + 0.5) / m - 0.5
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1)


@dataclass(frozen=True, eq=False)
class FieldGrid:
    """One realization of the truncated field on an ``m**d`` grid."""

    d: int
    m: int
    t: float
    values: np.ndarray
    seed: int
    kernel: str = "triangular"
    method: str = "dense"

    @property
    def h(self) -> float:
        return 1.0 / self.m

    @property
    def num_cells(self) -> int:
        return self.m**self.d

    def centers(self) -> np.ndarray:
        return cell_centers(self.d, self.m)


@functools.lru_cache(maxsize=8)
def _dense_factor(d: int, m: int, t: float, spec: KernelSpec) -> np.ndarray:
    pts = cell_centers(d, m)
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff**2).sum(-1))
    cov = covariance_t(spec, dist, t)
    jitter = 0.0
    while True:
        try:
            return linalg.cholesky(cov + jitter * np.eye(len(cov)), lower=True, check_finite=False)
        except linalg.LinAlgError:
            jitter = 1e-14 * t if jitter == 0.0 else jitter * 10.0
            if jitter > MAX_JITTER * t * (1 + 1e-9):
                raise NumericalError(
                    f"covariance not positive definite after jitter {MAX_JITTER}*t "
                    f"(d={d}, m={m}, t={t}, kernel={spec.name})"
                ) from None


@functools.lru_cache(maxsize=8)
def _circulant_sqrt_eigs(d: int, m: int, t: float, spec: KernelSpec) -> np.ndarray:
    if spec.support > 1.0:
        raise DomainError("circulant embedding on a side-2 torus needs a kernel supported in [0, 1]")
    size = 2 * m
    lag = np.arange(size)
    lag = np.minimum(lag, size - lag) / m
    mesh = np.meshgrid(*([lag] * d), indexing="ij")
    r = np.sqrt(sum(g**2 for g in mesh))
    first_row = covariance_t(spec, r, t)
    eigs = np.fft.fftn(first_row).real
    lo, hi = eigs.min(), eigs.max()
    if lo < -1e-8 * max(hi, 1.0):
        raise NumericalError(
            f"circulant embedding not positive semi-definite (min eigenvalue {lo:.3e}); use method='dense'"
        )
    return np.sqrt(np.clip(eigs, 0.0, None) / eigs.size)


def sample_field(
    d: int,
    h: float,
    t: float,
    spec: KernelSpec = TRIANGULAR,
    seed: int = 0,
    method: str = "auto",
    dense_limit: int = DENSE_CELL_LIMIT,
) -> FieldGrid:
    """Sample the centred Gaussian field ``X_t`` on the cell centres.

    Parameters
    ----------
    d : int
        Ambient dimension.
    h : float
        Grid spacing; ``1/h`` must be an integer.
    t : float
        Truncation level; every cell value has variance ``t``.
    spec : KernelSpec
        Radial kernel, triangular by default.
    seed : int
        Seed of the field substream.
    method : {"auto", "dense", "circulant"}
        ``auto`` uses the dense factorization up to ``dense_limit`` cells
        and the circulant embedding above it.

    Raises
    ------
    ResourceLimitError
        If the grid exceeds the limit of the chosen sampler.
    NumericalError
        If the covariance cannot be factorized.
    """
    if d < 1:
        raise DomainError("dimension d must be >= 1")
    if t < 0:
        raise DomainError("truncation t must be >= 0")
    m = _cells_per_side(h)
    cells = m**d
    if method == "auto":
        method = "dense" if cells <= dense_limit or spec.support > 1.0 else "circulant"
    rng = generator(seed)
    shape = (m,) * d
    if t == 0:
        return FieldGrid(d, m, float(t), np.zeros(shape), seed, spec.name, method)
    if method == "dense":
        if cells > dense_limit:
            raise ResourceLimitError(
                f"dense factorization limited to {dense_limit} cells, grid has {cells}"
            )
        chol = _dense_factor(d, m, float(t), spec)
        values = (chol @ rng.standard_normal(cells)).reshape(shape)
    elif method == "circulant":
        if cells > CIRCULANT_CELL_LIMIT:
            raise ResourceLimitError(
                f"circulant sampler limited to {CIRCULANT_CELL_LIMIT} cells, grid has {cells}"
            )
        scale = _circulant_sqrt_eigs(d, m, float(t), spec)
        noise = rng.standard_normal(scale.shape) + 1j * rng.standard_normal(scale.shape)
        full = np.fft.fftn(scale * noise).real
        values = np.ascontiguousarray(full[(slice(0, m),) * d])
    else:
        raise ValueError(f"unknown field method {method!r}")
    return FieldGrid(d, m, float(t), values, seed, spec.name, method)


@dataclass(frozen=True, eq=False)
class GmcMeasure:
    """Grid-discretized chaos measure: one non-negative mass per cell."""

    gamma: float
    d: int
    m: int
    t: float
    cell_masses: np.ndarray
    total_mass: float

    @property
    def nu(self) -> float:
        return self.gamma**2 / self.d

    @property
    def h(self) -> float:
        return 1.0 / self.m


def check_subcritical(gamma: float, d: int) -> None:
    if gamma < 0:
        raise DomainError("gamma must be non-negative")
    if gamma**2 / d >= 2.0:
        raise DomainError(f"nu = gamma^2/d = {gamma**2 / d:.4g} is not subcritical (needs < 2)")


def gmc_from_field(field: FieldGrid, gamma: float) -> GmcMeasure:
    """Exponentiate a field into cell masses ``exp(gamma X - gamma^2 t/2) h^d``."""
    check_subcritical(gamma, field.d)
    vol = field.h**field.d
    if gamma == 0 or field.t == 0:
        masses = np.full(field.values.shape, vol)
        return GmcMeasure(float(gamma), field.d, field.m, field.t, masses, 1.0)
    masses = np.exp(gamma * field.values - 0.5 * gamma**2 * field.t) * vol
    return GmcMeasure(float(gamma), field.d, field.m, field.t, masses, float(masses.sum()))


def lebesgue(d: int, m: int = 1) -> GmcMeasure:
    """The deterministic measure with ``gamma = 0``."""
    return GmcMeasure(0.0, d, m, 0.0, np.full((m,) * d, float(m) ** -d), 1.0)


def default_cells_per_side(
    sigma: float, d: int, per_radius: int = PER_RADIUS, min_per_radius: int = MIN_PER_RADIUS
) -> int:
    """Grid resolution giving ``per_radius`` cells per connection radius.

    Pairs closer than one cell miss the short-range boost of the field, and
    that loss grows as ``sigma`` shrinks, so a coarse grid flattens fitted
    count-versus-size slopes. When ``CIRCULANT_CELL_LIMIT`` does not allow
    ``per_radius`` the cap is used silently as long as it still gives
    ``min_per_radius`` cells; below that a warning is emitted.
    """
    want = max(1, math.ceil(per_radius / sigma))
    cap = int(math.floor(CIRCULANT_CELL_LIMIT ** (1.0 / d) + 1e-9))
    if want <= cap:
        return want
    need = max(1, math.ceil(min_per_radius / sigma))
    if need > cap:
        warnings.warn(
            f"grid resolution capped at {cap} cells per side in d={d} "
            f"(wanted {need} for {min_per_radius} cells per radius)",
            RuntimeWarning,
            stacklevel=2,
        )
    return cap


def sample_gmc(
    gamma: float,
    d: int,
    m: int,
    seed: int,
    t: float | None = None,
    spec: KernelSpec = TRIANGULAR,
    method: str = "auto",
) -> GmcMeasure:
    """Sample a field with the default cutoff ``e^t = m`` and exponentiate it."""
    check_subcritical(gamma, d)
    if t is None:
        t = math.log(m)
    if gamma == 0:
        return lebesgue(d, m)
    return gmc_from_field(sample_field(d, 1.0 / m, t, spec, seed, method), gamma)


def write_grid_csv(path, field: FieldGrid, measure: GmcMeasure | None = None) -> None:
    """Dump ``cell_index, x0..x{d-1}, field_value, mass`` rows."""
    centers = field.centers()
    values = field.values.ravel()
    masses = measure.cell_masses.ravel() if measure is not None else np.full(values.shape, np.nan)
    header = ["cell_index", *[f"x{i}" for i in range(field.d)], "field_value", "mass"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for idx in range(values.size):
            w.writerow([idx, *(repr(float(c)) for c in centers[idx]), repr(float(values[idx])), repr(float(masses[idx]))])
