"""Fractal Gaussian Networks: chaos-driven random geometric graphs."""

from .errors import (
    ConfigError,
    DataError,
    DomainError,
    FgnError,
    InsufficientDataError,
    InvalidKernelError,
    NumericalError,
    ParseError,
    ResourceLimitError,
)
from .generate import FgnParams, SbmParams, edge_prob, generate_graph, generate_sbm, sample_nodes, sigma_for
from .gmc import TRIANGULAR, KernelSpec, covariance_t, gmc_from_field, kernel_phi, sample_field, sample_gmc
from .graph import Graph
from .inference import (
    detect_fractality,
    estimate_nu_multi,
    estimate_nu_single,
    fit_scaling_exponent,
    predicted_edge_count,
    predicted_triangle_count,
    spoke_clique_regime_check,
)

__version__ = "0.1.0"
