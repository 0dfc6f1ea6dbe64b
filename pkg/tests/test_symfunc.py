from __future__ import annotations

from fractions import Fraction

import pytest

from maclab.core import Params, Partition, enumerate_partitions, partitions_of_size
from maclab.errors import RadiusViolationError
from maclab.symfunc import (
    AlphabetSeries,
    SpecializationRho,
    SymFunc,
    TruncatedExponential,
    alphabet_pair,
    cauchy_sum,
    coproduct,
    evaluate,
    format_polynomial,
    gram_schmidt_basis,
    kernel_series,
    macdonald_P,
    macdonald_pair,
    macdonald_Q,
    monomial_table,
    restrict_to_vars,
    schur_jacobi_trudi,
    skew_P,
    specialize,
    tensor,
)

P1 = Partition((1,))
P2 = Partition((2,))
P11 = Partition((1, 1))
P21 = Partition((2, 1))


def e2(degree: int) -> SymFunc:
    return SymFunc({P11: Fraction(1, 2), P2: Fraction(-1, 2)}, degree)


def test_monomial_tables_are_inverse() -> None:
    for degree in range(1, 5):
        table = monomial_table(degree)
        n = len(table.partitions)
        for i in range(n):
            for j in range(n):
                entry = sum(table.m_to_p[i][k] * table.p_to_m[k][j] for k in range(n))
                assert entry == (1 if i == j else 0)


def test_small_macdonald_functions(params: Params) -> None:
    q, t = params.q, params.t
    assert macdonald_P(P1, params, 2) == SymFunc({P1: 1}, 2)
    assert macdonald_Q(P1, params, 2) == SymFunc({P1: (1 - t) / (1 - q)}, 2)
    assert macdonald_P(P11, params, 2) == e2(2)
    # P_(2) = m_2 + (1+q)(1-t)/(1-qt) m_11
    c = (1 + q) * (1 - t) / (1 - q * t)
    assert macdonald_P(P2, params, 2) == SymFunc({P2: 1}, 2) + e2(2) * c


def test_orthogonality(params: Params) -> None:
    for degree in range(1, 4):
        shapes = partitions_of_size(degree)
        for lam in shapes:
            for mu in shapes:
                value = macdonald_pair(macdonald_P(lam, params, degree), macdonald_Q(mu, params, degree), params)
                assert value == (1 if lam == mu else 0)


def test_inverted_parameters_give_same_functions() -> None:
    params = Params(Fraction(1, 3), Fraction(1, 5))
    inverted = gram_schmidt_basis(3, 1 / params.q, 1 / params.t)
    for lam in partitions_of_size(3):
        assert inverted[lam] == macdonald_P(lam, params, 3)


def test_schur_at_q_equal_t() -> None:
    params = Params(Fraction(2, 5), Fraction(2, 5))
    for lam in enumerate_partitions(5):
        assert macdonald_P(lam, params, lam.size) == schur_jacobi_trudi(lam, lam.size)
    assert schur_jacobi_trudi(P11, 2) == e2(2)


@pytest.mark.parametrize("degree", [2, 4, 6])
def test_cauchy_identity(params: Params, degree: int) -> None:
    assert cauchy_sum(params, degree) == kernel_series("Pi", ("X", "Y"), params, degree)


def test_kernel_inverse(params: Params) -> None:
    product = kernel_series("Pi", ("X", "Y"), params, 6) * kernel_series("Pi_inverse", ("X", "Y"), params, 6)
    assert product == 1
    h = kernel_series("H", ("X", "Y"), params, 4) * kernel_series("H_inverse", ("X", "Y"), params, 4)
    assert h == 1


def test_kernel_is_exponential(base_params: Params) -> None:
    params = base_params
    exponent = AlphabetSeries.constant(0, ("X", "Y"), 6)
    for k in range(1, 4):
        c = (1 - params.t**k) / (1 - params.q**k)
        exponent = exponent + AlphabetSeries.power_sum("X", k, 6) * AlphabetSeries.power_sum("Y", k, 6) * (c / k)
    assert exponent.exp() == kernel_series("Pi", ("X", "Y"), params, 6)


def test_split_alphabet_factorizes_kernel(base_params: Params) -> None:
    joint = kernel_series("Pi", ("X", "A"), base_params, 4).split_alphabet("A", ("Y", "Z"))
    product = kernel_series("Pi", ("X", "Y"), base_params, 4) * kernel_series("Pi", ("X", "Z"), base_params, 4)
    assert joint == product


def test_reciprocal() -> None:
    series = 1 + AlphabetSeries.power_sum("X", 1, 4) * Fraction(2, 3) + AlphabetSeries.power_sum("X", 2, 4)
    assert series * series.reciprocal() == 1


@pytest.mark.parametrize("size", [1, 2, 3, 4, pytest.param(5, marks=pytest.mark.slow)])
def test_branching_rule(base_params: Params, size: int) -> None:
    params = base_params
    for lam in partitions_of_size(size):
        split = coproduct(macdonald_P(lam, params, size))
        expected = AlphabetSeries.constant(0, ("X", "Y"), size)
        for mu in enumerate_partitions(size):
            if lam.contains(mu):
                expected = expected + tensor(skew_P(lam, mu, params, size), "X", macdonald_P(mu, params, size), "Y", size)
        assert split == expected, lam


def test_skew_edge_cases(base_params: Params) -> None:
    assert skew_P(P21, Partition(), base_params, 3) == macdonald_P(P21, base_params, 3)
    assert skew_P(P1, P1, base_params, 1) == SymFunc.one(1)
    assert skew_P(P2, P11, base_params, 2).is_zero()


def test_restrict_to_vars(base_params: Params) -> None:
    assert format_polynomial(restrict_to_vars(macdonald_P(P11, base_params, 2), 2)) == "x1*x2"
    assert format_polynomial(restrict_to_vars(macdonald_P(P2, base_params, 2), 1)) == "x1**2"
    assert restrict_to_vars(macdonald_P(Partition((1, 1, 1)), base_params, 3), 2).is_zero


def test_evaluate_matches_specialize(base_params: Params) -> None:
    point = [Fraction(1, 4), Fraction(1, 5)]
    rho = SpecializationRho.finite(point)
    f = macdonald_Q(P21, base_params, 3)
    assert specialize(f.as_series("X"), "X", rho).constant_term() == evaluate(f, point)


def test_specialization_radius() -> None:
    assert SpecializationRho.finite([Fraction(1, 4), Fraction(-1, 5)]).radius == Fraction(9, 20)
    assert SpecializationRho.plancherel(Fraction(1, 2)).power_sum(2) == 0
    with pytest.raises(RadiusViolationError):
        SpecializationRho.finite([Fraction(1, 2), Fraction(2, 3)])
    with pytest.raises(RadiusViolationError):
        SpecializationRho.finite([Fraction(1, 2)], Fraction(1, 3))


def test_specialization_config_roundtrip() -> None:
    rho = SpecializationRho.finite([Fraction(1, 7)], Fraction(1, 5))
    assert SpecializationRho.from_config(rho.get_config()) == rho


def test_shift_ratio(base_params: Params) -> None:
    b = Fraction(1, 7)
    x = Fraction(1, 2)
    rho = SpecializationRho.finite([b])
    assert rho.shift_ratio(x, base_params) == (1 - x * b) / (1 - base_params.t * x * b)
    assert SpecializationRho.zero().shift_ratio(x, base_params) == 1


def test_exponential_pairing_fast_path(base_params: Params) -> None:
    f = TruncatedExponential("Y", {1: AlphabetSeries.power_sum("X", 1, 4) * Fraction(1, 2), 2: AlphabetSeries.power_sum("X", 2, 4)}, 4)
    g = TruncatedExponential("Y", {1: AlphabetSeries.power_sum("Z", 1, 4), 2: AlphabetSeries.power_sum("Z", 2, 4) * Fraction(-2, 3)}, 4)
    fast = alphabet_pair(f, g, "Y", base_params)
    slow = alphabet_pair(f.expand(), g.expand(), "Y", base_params)
    assert fast == slow


def test_pairing_reproduces_cauchy(base_params: Params) -> None:
    """<Pi(X; Y), P_lambda(Y)>_Y = P_lambda(X)."""
    kernel = kernel_series("Pi", ("X", "Y"), base_params, 6)
    for lam in enumerate_partitions(3):
        paired = alphabet_pair(kernel, macdonald_P(lam, base_params, 3).as_series("Y"), "Y", base_params)
        assert paired == macdonald_P(lam, base_params, 3).as_series("X")
