from __future__ import annotations

from fractions import Fraction

import pytest

from maclab.ascending import AscendingConfig, operator_chain_expectation
from maclab.contour import Circle
from maclab.core import Params
from maclab.errors import ConfigError, ContourError, ParameterError
from maclab.integrands import (
    appendix_integrand,
    ascending_integrand,
    block_integrand,
    build_integrand,
    disk_contours,
    fredholm_ek_integrand,
    hatted_integrand,
    multilevel_integrand,
    q_whittaker_integrand,
    scaled_integrand,
    single_level_integrand,
    specialize_all,
)
from maclab.process import ObservableEntry, ObservablePlan, ProcessSpec, expectation_lhs
from maclab.symfunc import SpecializationRho

A = Fraction(1, 10)
B = Fraction(1, 7)


def one_variable(params: Params, b: Fraction = B) -> AscendingConfig:
    return AscendingConfig((A,), SpecializationRho.finite([b]), params)


def test_disk_contours_radius() -> None:
    (level,) = disk_contours([[Fraction(1, 10)]], {Fraction(0), Fraction(1, 11)}, shrink=Fraction(1))
    assert level == (Circle(Fraction(1, 10), Fraction(1, 880)),)


def test_disk_contours_grow_outwards() -> None:
    outer, inner = disk_contours(
        [[Fraction(1, 2)], [Fraction(1, 2)]], {Fraction(0)}, shrink=Fraction(1), growth=Fraction(2)
    )
    assert outer[0].radius == 2 * inner[0].radius


def test_disk_contours_errors() -> None:
    with pytest.raises(ContourError):
        disk_contours([[Fraction(1, 2)]], {Fraction(1, 2)}, shrink=Fraction(1))
    with pytest.raises(ContourError):
        disk_contours([[Fraction(1, 2)]], {Fraction(0)}, shrink=Fraction(1), bound=Fraction(1, 2))


def test_block_integrand_validation(base_params: Params) -> None:
    spec = ProcessSpec(2, base_params, 3)
    with pytest.raises(ConfigError, match="levels"):
        block_integrand(spec, [(2, 1), (1, 1)])
    with pytest.raises(ConfigError, match="levels"):
        block_integrand(spec, [(3, 1)])
    with pytest.raises(ConfigError, match="c"):
        block_integrand(spec, [(1, 1)], scales=[Fraction(1, 2)])
    with pytest.raises(ConfigError):
        multilevel_integrand(spec, [1])
    with pytest.raises(ConfigError):
        scaled_integrand(spec, [1], [Fraction(1, 2), Fraction(1, 3)])


@pytest.mark.parametrize("r", [1, 2])
def test_single_level_integral(params: Params, r: int) -> None:
    spec = ProcessSpec(1, params, 4, ("X",), ("Y",))
    lhs = expectation_lhs(ObservablePlan((ObservableEntry(1, r),)), spec)
    assert single_level_integrand(r, params, 4).evaluate() == lhs


def test_single_level_radius_is_irrelevant(base_params: Params) -> None:
    unit = single_level_integrand(1, base_params, 4).evaluate()
    assert single_level_integrand(1, base_params, 4, radius=Fraction(3, 5)).evaluate() == unit


def test_zero_order_integral_is_one(base_params: Params) -> None:
    assert single_level_integrand(0, base_params, 3).evaluate() == 1


@pytest.mark.slow
def test_multilevel_integral(base_params: Params) -> None:
    spec = ProcessSpec(2, base_params, 3)
    lhs = expectation_lhs(ObservablePlan.from_levels([1, 1]), spec)
    assert multilevel_integrand(spec, [1, 1]).evaluate() == lhs


@pytest.mark.slow
def test_scaled_integral(base_params: Params) -> None:
    spec = ProcessSpec(2, base_params, 3)
    scales = (Fraction(1, 2), Fraction(2, 3))
    lhs = expectation_lhs(ObservablePlan(ObservablePlan.from_levels([1, 0]).entries, scales), spec)
    assert scaled_integrand(spec, [1, 0], scales).evaluate() == lhs


def test_appendix_integral(base_params: Params) -> None:
    spec = ProcessSpec(1, base_params, 4, ("X",), ("Y",))
    lhs = expectation_lhs(ObservablePlan.from_levels([1], kind="O_hat_1"), spec)
    assert appendix_integrand(spec).evaluate() == lhs


def test_ascending_single_variable(params: Params) -> None:
    # E[q^{lambda_1}] = Pi(q a) / Pi(a) = (1 - a b) / (1 - t a b)
    expected = (1 - A * B) / (1 - params.t * A * B)
    assert ascending_integrand(one_variable(params), (1,), (1,)).evaluate() == expected


def test_hatted_single_variable(params: Params) -> None:
    # E[q^{-lambda_1}] = Pi(a / q) / Pi(a)
    q, t = params.q, params.t
    expected = (1 - t * A * B / q) / (1 - A * B / q)
    assert hatted_integrand(one_variable(params), (1,), (1,)).evaluate() == expected


def test_ascending_integral_matches_operators(base_params: Params) -> None:
    config = AscendingConfig((A, Fraction(1, 11)), SpecializationRho.finite([Fraction(1, 10)]), base_params)
    for levels, rs in [((2,), (1,)), ((2,), (2,)), ((2, 1), (1, 1))]:
        integral = ascending_integrand(config, levels, rs).evaluate()
        assert integral == operator_chain_expectation(levels, rs, config)


def test_ascending_drops_zero_orders(base_params: Params) -> None:
    config = one_variable(base_params)
    assert ascending_integrand(config, (1,), (0,)).evaluate() == 1


def test_ascending_needs_positive_t() -> None:
    config = one_variable(Params(Fraction(1, 2), Fraction(0)))
    with pytest.raises(ParameterError):
        ascending_integrand(config, (1,), (1,))


def test_explicit_contour_through_pole(base_params: Params) -> None:
    integrand = ascending_integrand(
        one_variable(base_params), (1,), (1,), contours=[[Circle(Fraction(0), A)]]
    )
    with pytest.raises(ContourError):
        integrand.evaluate()


def test_q_whittaker_single_variable() -> None:
    params = Params(Fraction(1, 2), Fraction(0))
    assert q_whittaker_integrand(one_variable(params), (1,)).evaluate() == 1 - A * B


def test_q_whittaker_needs_zero_t(base_params: Params) -> None:
    with pytest.raises(ConfigError, match="t"):
        q_whittaker_integrand(one_variable(base_params), (1,))


def test_plancherel_integrand_is_numeric_only(base_params: Params) -> None:
    config = AscendingConfig((A,), SpecializationRho.plancherel(Fraction(1, 2)), base_params)
    integrand = fredholm_ek_integrand(1, config)
    assert integrand.numeric_factor is not None
    with pytest.raises(ConfigError, match="rho"):
        integrand.evaluate()


def test_specialize_all_requires_every_alphabet(base_params: Params) -> None:
    series = single_level_integrand(1, base_params, 3).evaluate()
    with pytest.raises(ConfigError, match="Y"):
        specialize_all(series, {"X": SpecializationRho.finite([Fraction(1, 5)])})


def test_build_integrand_dispatch(base_params: Params) -> None:
    integrand = build_integrand("prop-3.4", 1, base_params, 3)
    assert integrand.is_formal
    with pytest.raises(ValueError, match="no contour integrand"):
        build_integrand("cauchy-identity")
