from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from maclab.ascending import AscendingConfig, operator_chain_expectation
from maclab.contour import Circle, ContourScheme, Location, RationalExpr, iterated_residue_integral
from maclab.core import Params
from maclab.errors import ConvergenceError
from maclab.integrands import ascending_integrand, fredholm_ek_integrand, single_level_integrand, specialize_all
from maclab.quadrature import numeric_quadrature_oracle, trapezoid
from maclab.symfunc import SpecializationRho

from .conftest import nearly_equal

UNIT = Circle(Fraction(0), Fraction(1))


def test_trapezoid_simple_pole() -> None:
    value = trapezoid(lambda v: 1 / (v["z"] - 0.5), {"z": UNIT}, 64)
    assert nearly_equal(value, 1.0, 1e-12)


def test_trapezoid_off_center() -> None:
    circle = Circle(Fraction(2), Fraction(1, 2))
    assert nearly_equal(trapezoid(lambda v: 1 / (v["z"] - 2) ** 2, {"z": circle}, 64), 0.0, 1e-12)
    assert nearly_equal(trapezoid(lambda v: np.exp(v["z"]) / (v["z"] - 2), {"z": circle}, 64), np.exp(2), 1e-10)


def test_oracle_matches_exact_residues() -> None:
    f = RationalExpr.pole("z", Location(Fraction(1, 2), "w")) * RationalExpr.monomial(1, {"w": -1}) * RationalExpr.pole(
        "w", Location(Fraction(1, 3))
    )
    scheme = ContourScheme(("z", "w"), {"z": (UNIT,), "w": (UNIT,)})
    exact = iterated_residue_integral(f, scheme)
    assert nearly_equal(numeric_quadrature_oracle(f.evaluate_numeric, scheme), float(exact), 1e-9)


def test_oracle_on_specialized_formal_integrand(base_params: Params) -> None:
    integrand = single_level_integrand(1, base_params, 4)
    substitution = {"X": SpecializationRho.finite([Fraction(1, 5)]), "Y": SpecializationRho.finite([Fraction(1, 6)])}
    exact = specialize_all(integrand.evaluate(), substitution)
    scalar = integrand.specialize(substitution)
    numeric = numeric_quadrature_oracle(scalar.numeric(), scalar.scheme)
    assert nearly_equal(numeric, float(exact), 1e-9)


def test_oracle_on_disk_contours(base_params: Params) -> None:
    config = AscendingConfig((Fraction(1, 10), Fraction(1, 11)), SpecializationRho.finite([Fraction(1, 10)]), base_params)
    integrand = ascending_integrand(config, (2,), (1,))
    numeric = numeric_quadrature_oracle(integrand.numeric(), integrand.scheme)
    assert nearly_equal(numeric, float(operator_chain_expectation((2,), (1,), config)), 1e-9)


def test_oracle_plancherel(base_params: Params) -> None:
    """The transcendental factor is integrated numerically."""
    config = AscendingConfig((Fraction(1, 10),), SpecializationRho.plancherel(Fraction(1, 2)), base_params)
    integrand = fredholm_ek_integrand(1, config)
    numeric = numeric_quadrature_oracle(integrand.numeric(), integrand.scheme)
    assert nearly_equal(numeric, -operator_chain_expectation((1,), (1,), config), 1e-9)


def test_oracle_budget() -> None:
    f = RationalExpr.pole("z", Location(Fraction(1, 2)))
    scheme = ContourScheme(("z",), {"z": (UNIT,)})
    with pytest.raises(ConvergenceError):
        numeric_quadrature_oracle(f.evaluate_numeric, scheme, max_points=16)
