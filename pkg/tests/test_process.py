from __future__ import annotations

from fractions import Fraction

import pytest

from maclab.core import Params, Partition, enumerate_partitions
from maclab.errors import ConfigError, ParameterError
from maclab.process import (
    ObservableEntry,
    ObservablePlan,
    ProcessSpec,
    constant_term_projection,
    drop_level,
    expectation_lhs,
    merge_levels,
    merged_weight,
    mm_weight,
    mp_weight,
    mp_weight_via_pairing,
    observable_O,
    observable_O_finite,
    observable_Ohat1,
    psi,
    psi_via_pairing,
)
from maclab.symfunc import AlphabetSeries

EMPTY = Partition()
P1 = Partition((1,))
P2 = Partition((2,))
P21 = Partition((2, 1))


def test_measure_has_mass_one(params: Params) -> None:
    total = AlphabetSeries.constant(0, ("X", "Y"), 4)
    for lam in enumerate_partitions(2):
        total = total + mm_weight(lam, params, 4)
    assert total == 1


@pytest.mark.parametrize(
    ("N", "degree"),
    [
        (1, 4),
        (1, 6),
        (2, 4),
        (3, 4),
        pytest.param(2, 6, marks=pytest.mark.slow),
        pytest.param(3, 6, marks=pytest.mark.slow),
    ],
)
def test_process_has_mass_one(base_params: Params, N: int, degree: int) -> None:
    spec = ProcessSpec(N, base_params, degree)
    assert expectation_lhs(ObservablePlan(), spec) == 1


def test_plan_validation() -> None:
    with pytest.raises(ConfigError, match="^levels:"):
        ObservablePlan((ObservableEntry(3),)).validate(2)
    with pytest.raises(ConfigError, match="^plan:"):
        ObservablePlan((ObservableEntry(1, multiplicity=0),)).validate(2)
    with pytest.raises(ConfigError, match="^c:"):
        ObservablePlan(scales=(Fraction(1, 2),)).validate(2)


def test_observable_level_beyond_process(base_params: Params) -> None:
    spec = ProcessSpec(1, base_params, 2)
    with pytest.raises(ConfigError, match="^levels:"):
        expectation_lhs(ObservablePlan((ObservableEntry(1), ObservableEntry(2))), spec)


def test_enumeration_bound_is_sufficient(base_params: Params) -> None:
    spec = ProcessSpec(1, base_params, 4, ("X",), ("Y",))
    plan = ObservablePlan((ObservableEntry(1, 1),))
    assert expectation_lhs(plan, spec) == expectation_lhs(plan, spec, bound=3)


def test_psi_forms_agree(base_params: Params) -> None:
    for lam, mu in [(P21, P1), (P2, P21), (P1, EMPTY), (P21, P2)]:
        assert psi(lam, mu, "A", "B", base_params, 5) == psi_via_pairing(lam, mu, "A", "B", base_params, 5)


def test_weight_via_pairing(base_params: Params) -> None:
    spec = ProcessSpec(2, base_params, 4)
    for sequence in [(P1, P1), (P2, P1), (EMPTY, P1)]:
        assert mp_weight(sequence, spec) == mp_weight_via_pairing(sequence, spec)


def test_observable_closed_form(params: Params) -> None:
    q, t = params.q, params.t
    assert observable_O(1, EMPTY, params) == 1 / (1 - t)
    assert observable_O(1, P21, params) == q**-2 + q**-1 * t + t**2 / (1 - t)
    assert observable_O(0, P21, params) == 1
    assert observable_Ohat1(EMPTY, params) == 1
    assert observable_Ohat1(P1, params) == 1 + (1 - t) * (1 - q) / t


def test_observable_is_limit_of_finite_version(base_params: Params) -> None:
    exact = observable_O(2, P21, base_params)
    gaps = [abs(exact - observable_O_finite(2, P21, base_params, m)) for m in (4, 8, 16)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < Fraction(1, 10**8)


def test_observables_need_positive_t() -> None:
    params = Params(Fraction(1, 2), Fraction(0))
    with pytest.raises(ParameterError):
        observable_O(1, P1, params)
    assert observable_O(0, P1, params) == 1


def test_plan_value_with_scales(base_params: Params) -> None:
    plan = ObservablePlan((ObservableEntry(1, 1, multiplicity=2),), (Fraction(1, 2), Fraction(3)))
    value = plan.value((P1, P2), base_params)
    assert value == observable_O(1, P1, base_params) ** 2 * Fraction(1, 2) * 9


def test_constant_term_projection(base_params: Params) -> None:
    spec = ProcessSpec(2, base_params, 4)
    reduced = drop_level(spec, 1)
    assert reduced.a_names == ("A1",)
    assert reduced.b_names == ("B2",)
    for first in enumerate_partitions(2):
        for second in enumerate_partitions(2):
            projected = constant_term_projection((first, second), spec, 1)
            if first == second:
                assert projected == mp_weight((first,), reduced)
            else:
                assert projected.is_zero()


@pytest.mark.parametrize("level", [1, 2])
def test_merge_levels(base_params: Params, level: int) -> None:
    spec = ProcessSpec(2, base_params, 4)
    for lam in enumerate_partitions(2):
        assert merge_levels((lam,), spec, level) == merged_weight((lam,), spec, level)


@pytest.mark.slow
def test_merge_middle_level(base_params: Params) -> None:
    spec = ProcessSpec(3, base_params, 2)
    for rest in [(EMPTY, P1), (P1, P1), (P1, EMPTY)]:
        assert merge_levels(rest, spec, 2) == merged_weight(rest, spec, 2)


def test_spec_config_roundtrip(base_params: Params) -> None:
    spec = ProcessSpec(2, base_params, 4)
    assert ProcessSpec.from_config(spec.get_config()) == spec
