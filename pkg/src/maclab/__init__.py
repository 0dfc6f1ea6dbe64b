"""
Exact-arithmetic verification of Macdonald process identities.

This package computes Macdonald symmetric functions, formal Macdonald processes and their
observables, and evaluates the contour-integral and Fredholm-determinant formulas for their
moments by exact residue calculus.
"""

from . import ascending, contour, fredholm, integrands, process, quadrature, symfunc
from .core import Params, Partition, parse_scalar
from .errors import ConfigError, ContourError, MaclabError
from .harness import CheckReport, list_identities, parse_config, run_check

__all__ = [
    "CheckReport",
    "ConfigError",
    "ContourError",
    "MaclabError",
    "Params",
    "Partition",
    "ascending",
    "contour",
    "fredholm",
    "integrands",
    "list_identities",
    "parse_config",
    "parse_scalar",
    "process",
    "quadrature",
    "run_check",
    "symfunc",
]
