"""
Numeric contour quadrature, used as an independent oracle for the exact integrals.

Every contour is a circle z = c + r e^{i theta}; on it (2 pi i)^{-1} dz = (z - c) dtheta / (2 pi),
so the trapezoid rule on M nodes is the mean of f(z) (z - c) over the nodes. Nodes are
doubled until two successive estimates agree.
"""

from __future__ import annotations

import itertools
import logging
from typing import TYPE_CHECKING, Any

import numpy as np

from maclab.errors import ConvergenceError

if TYPE_CHECKING:
    from collections.abc import Callable, Mapping

    from maclab.contour import Circle, ContourScheme

__all__ = ["numeric_quadrature_oracle", "trapezoid"]

logger = logging.getLogger(__name__)


def trapezoid(
    f: Callable[[Mapping[str, Any]], Any],
    circles: Mapping[str, Circle],
    nodes: int,
) -> complex:
    """
    Trapezoid estimate of (2 pi i)^{-d} times the integral of f over a torus of circles.

    Parameters
    ----------
    f : callable
        Integrand taking a mapping of variable names to broadcastable complex arrays.
    circles : mapping of str to Circle
        One circle per variable.
    nodes : int
        Nodes per circle.

    Returns
    -------
    complex
        The estimate.
    """
    names = list(circles)
    theta = 2 * np.pi * np.arange(nodes) / nodes
    axes = [float(circles[v].center) + float(circles[v].radius) * np.exp(1j * theta) for v in names]
    grids = np.meshgrid(*axes, indexing="ij", sparse=True)
    values = dict(zip(names, grids, strict=True))
    weight: Any = 1.0
    for v, grid in values.items():
        weight = weight * (grid - float(circles[v].center))
    samples = np.broadcast_to(np.asarray(f(values) * weight, dtype=complex), (nodes,) * len(names))
    return complex(samples.mean())


def numeric_quadrature_oracle(
    f: Callable[[Mapping[str, Any]], Any],
    scheme: ContourScheme,
    *,
    tolerance: float = 1e-10,
    start_nodes: int = 16,
    max_points: int = 2**22,
) -> complex:
    """
    Numeric value of the iterated contour integral of f.

    Variables on a union of circles are integrated over every assignment of one circle
    per variable, and the assignments are summed.

    Parameters
    ----------
    f : callable
        Integrand over numpy arrays, as returned by `Integrand.numeric`.
    scheme : ContourScheme
        Contours of every variable.
    tolerance : float, optional
        Relative agreement required between successive refinements.
    start_nodes : int, optional
        Initial nodes per circle.
    max_points : int, optional
        Largest grid, in points per assignment.

    Returns
    -------
    complex
        The integral, normalized by (2 pi i)^{-d}.

    Raises
    ------
    ConvergenceError
        If the grid budget is exhausted first.
    """
    variables = scheme.order
    if not variables:
        return complex(f({}))
    assignments = [
        dict(zip(variables, choice, strict=True))
        for choice in itertools.product(*(scheme.contours[v] for v in variables))
    ]

    def estimate(nodes: int) -> complex:
        return sum((trapezoid(f, circles, nodes) for circles in assignments), 0j)

    nodes = start_nodes
    previous = estimate(nodes)
    while True:
        nodes *= 2
        if nodes ** len(variables) > max_points:
            raise ConvergenceError(
                f"quadrature over {len(variables)} variables did not converge within {max_points} points"
            )
        current = estimate(nodes)
        change = abs(current - previous)
        logger.debug("quadrature with %d nodes: %s (change %.3g)", nodes, current, change)
        if change <= tolerance * max(1.0, abs(current)):
            return current
        previous = current
