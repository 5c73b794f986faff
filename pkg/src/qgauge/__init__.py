"""Minkowski functions of quasi-balanced domains in C^n, with sampled numerical checks."""

__version__ = "0.1.0"

from .core import Weights, quasi_action, validate_weights, weighted_degree  # noqa: E402
from .domains import CATALOG, builtin, oracle_gauge  # noqa: E402
from .gauge import (  # noqa: E402
    DomainDefinition,
    GaugeResult,
    boundary_project,
    bracket_root,
    contains,
    defining_r,
    gauge,
    gauge_gradient,
    radial_value,
)

__all__ = [
    "CATALOG",
    "DomainDefinition",
    "GaugeResult",
    "Weights",
    "boundary_project",
    "bracket_root",
    "builtin",
    "contains",
    "defining_r",
    "gauge",
    "gauge_gradient",
    "oracle_gauge",
    "quasi_action",
    "radial_value",
    "validate_weights",
    "weighted_degree",
]
