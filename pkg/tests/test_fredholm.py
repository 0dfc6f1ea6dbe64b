from __future__ import annotations

from fractions import Fraction

import pytest

from maclab.ascending import AscendingConfig, operator_chain_expectation
from maclab.contour import ResiduePlan
from maclab.core import Params, Partition, enumerate_partitions
from maclab.errors import ConfigError, PoleCollisionError
from maclab.fredholm import (
    compositions,
    fredholm_ek_coefficient,
    fredholm_qt_coefficient,
    noumi_coefficient,
    noumi_eigen_defect,
    noumi_eigenvalue,
    noumi_term_coefficient,
    weak_compositions,
)
from maclab.symfunc import SpecializationRho, evaluate, macdonald_Q

B = Fraction(1, 7)


def ascending(params: Params, n: int = 2) -> AscendingConfig:
    return AscendingConfig((Fraction(1, 10), Fraction(1, 11), Fraction(1, 12))[:n], SpecializationRho.finite([B]), params)


def test_compositions() -> None:
    assert list(compositions(3, 2)) == [(1, 2), (2, 1)]
    assert list(compositions(0, 0)) == [()]
    assert not list(compositions(2, 3))
    assert sorted(weak_compositions(2, 2)) == [(0, 2), (1, 1), (2, 0)]


def test_noumi_eigenvalue_is_q_function(base_params: Params) -> None:
    q, t = base_params.q, base_params.t
    for lam in [Partition(), Partition((1,)), Partition((2, 1))]:
        y = [q ** lam.part(i) * t ** (1 - i) for i in range(2)]
        for r in range(3):
            expected = evaluate(macdonald_Q(Partition((r,) if r else ()), base_params, r), y)
            assert noumi_eigenvalue(lam, 2, r, base_params) == expected


def test_noumi_eigenrelation(base_params: Params) -> None:
    point = [Fraction(1, 3), Fraction(2, 7)]
    for lam in enumerate_partitions(2):
        for r in range(3):
            assert noumi_eigen_defect(lam, 2, r, base_params, point) == 0


def test_noumi_term_collision(base_params: Params) -> None:
    with pytest.raises(PoleCollisionError):
        noumi_term_coefficient((1, 0), [Fraction(1, 2), Fraction(1, 2)], base_params)


def test_argument_validation(base_params: Params) -> None:
    config = ascending(base_params)
    point = [Fraction(1, 3), Fraction(2, 7)]
    with pytest.raises(ConfigError, match="^r:"):
        noumi_coefficient(-1, config)
    with pytest.raises(ConfigError, match="^r:"):
        fredholm_qt_coefficient(-1, config)
    with pytest.raises(ConfigError, match="^r:"):
        fredholm_ek_coefficient(-1, config)
    with pytest.raises(ConfigError, match="^partitions:"):
        noumi_eigenvalue(Partition((1, 1, 1)), 2, 1, base_params)
    with pytest.raises(ConfigError, match="^points:"):
        noumi_eigen_defect(Partition((1,)), 3, 1, base_params, point)
    with pytest.raises(ConfigError, match="^points:"):
        noumi_term_coefficient((1,), point, base_params)


def test_single_variable_noumi(params: Params) -> None:
    config = ascending(params, 1)
    a = config.a[0]
    h = (1 - a * B) / (1 - params.t * a * B)
    assert noumi_coefficient(1, config) == (1 - params.t) / (1 - params.q) * h


@pytest.mark.parametrize("r", [0, 1, 2])
def test_fredholm_reproduces_noumi(params: Params, r: int) -> None:
    config = ascending(params)
    assert fredholm_qt_coefficient(r, config) == noumi_coefficient(r, config)


@pytest.mark.slow
def test_fredholm_terminates_after_n_terms(base_params: Params) -> None:
    config = ascending(base_params)
    assert fredholm_qt_coefficient(3, config, max_terms=3) == fredholm_qt_coefficient(3, config)


def test_fredholm_records_residues(base_params: Params) -> None:
    plan = ResiduePlan()
    fredholm_qt_coefficient(1, ascending(base_params), plan=plan)
    assert plan.summary()["inside"] >= 2


def test_ek_fredholm_matches_operators(params: Params) -> None:
    config = ascending(params)
    for r in range(3):
        chain = operator_chain_expectation((2,), (r,), config)
        assert fredholm_ek_coefficient(r, config) == (-1) ** r * chain
    assert fredholm_ek_coefficient(3, config) == 0
