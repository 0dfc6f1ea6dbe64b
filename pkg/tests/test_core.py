from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from maclab.core import (
    Interval,
    Params,
    Partition,
    elementary_symmetric,
    enumerate_partitions,
    exp_interval,
    parse_scalar,
    partitions_of_size,
    q_pochhammer,
    z_factor,
    z_lambda,
)
from maclab.errors import ParameterError


@pytest.mark.parametrize(("text", "expected"), [("1/3", Fraction(1, 3)), (" -2/4 ", Fraction(-1, 2)), ("5", Fraction(5)), (7, Fraction(7))])
def test_parse_scalar(text: object, expected: Fraction) -> None:
    assert parse_scalar(text) == expected


@pytest.mark.parametrize("bad", [0.5, "0.5", "1e-3", "one", True, None])
def test_parse_scalar_rejects_inexact(bad: object) -> None:
    with pytest.raises(ValueError):
        parse_scalar(bad)


@pytest.mark.parametrize(("q", "t"), [(0, Fraction(1, 2)), (1, Fraction(1, 2)), (Fraction(1, 2), 1), (Fraction(1, 2), -Fraction(1, 3))])
def test_params_bounds(q: Fraction, t: Fraction) -> None:
    with pytest.raises(ParameterError):
        Params(q, t)


def test_params_config_roundtrip() -> None:
    params = Params(Fraction(2, 7), Fraction(1, 2))
    assert Params.from_config(params.get_config()) == params


def test_zero_t_allowed_but_not_inverted() -> None:
    params = Params(Fraction(1, 2), Fraction(0))
    with pytest.raises(ParameterError, match="requires t > 0"):
        params.require_positive_t("hatted operators")


def brute_force_partitions(n: int) -> set[tuple[int, ...]]:
    """Every composition of n, sorted into a partition and deduplicated."""
    found: set[tuple[int, ...]] = set()
    for cuts in itertools.product((False, True), repeat=max(n - 1, 0)):
        parts: list[int] = []
        run = 1
        for cut in cuts:
            if cut:
                parts.append(run)
                run = 0
            run += 1
        if n:
            parts.append(run)
        found.add(tuple(sorted(parts, reverse=True)))
    return found


@pytest.mark.parametrize("n", range(11))
def test_partition_counts(n: int) -> None:
    expected = brute_force_partitions(n)
    assert {lam.parts for lam in partitions_of_size(n)} == expected
    assert len(partitions_of_size(n)) == len(expected)
    assert len(enumerate_partitions(n)) == sum(len(brute_force_partitions(d)) for d in range(n + 1))


def test_partition_order() -> None:
    assert partitions_of_size(3) == (Partition((3,)), Partition((2, 1)), Partition((1, 1, 1)))
    assert enumerate_partitions(2) == [Partition(), Partition((1,)), Partition((2,)), Partition((1, 1))]


def test_partition_validation() -> None:
    with pytest.raises(ValueError):
        Partition((1, 2))
    with pytest.raises(ValueError):
        Partition((2, 0))
    assert Partition.from_string("1,2") == Partition((2, 1))
    assert Partition.from_string("") == Partition()


def test_partition_combinatorics() -> None:
    lam = Partition((3, 1, 1))
    assert lam.size == 5
    assert lam.length == 3
    assert lam.part(0) == 3
    assert lam.part(5) == 0
    assert lam.conjugate() == Partition((3, 1, 1))
    assert Partition((4, 2)).conjugate() == Partition((2, 2, 1, 1))
    assert Partition((3, 1)).dominates(Partition((2, 2)))
    assert not Partition((2, 2)).dominates(Partition((3, 1)))
    assert Partition((3, 1)).contains(Partition((2, 1)))
    assert Partition((3, 1)).interlaces(Partition((2,)))
    assert not Partition((3, 1)).interlaces(Partition((2, 2)))


def test_q_pochhammer() -> None:
    q = Fraction(1, 2)
    assert q_pochhammer(q, q, 0) == 1
    assert q_pochhammer(q, q, 2) == Fraction(1, 2) * Fraction(3, 4)
    assert q_pochhammer(Fraction(1), q, 3) == 0


def test_z_lambda() -> None:
    assert z_lambda(Partition((2, 1, 1))) == 2 * 1 * 2
    assert z_lambda(Partition((3,))) == 3
    assert z_lambda(Partition()) == 1


def test_z_factor_reduces_to_z_lambda_at_q_equal_t() -> None:
    params = Params(Fraction(1, 3), Fraction(1, 3))
    for lam in enumerate_partitions(4):
        assert z_factor(lam, params) == z_lambda(lam)


def test_elementary_symmetric() -> None:
    values = [Fraction(1), Fraction(2), Fraction(3)]
    assert [elementary_symmetric(values, r) for r in range(5)] == [1, 6, 11, 6, 0]


def test_interval_arithmetic() -> None:
    x = Interval(Fraction(1), Fraction(2))
    y = Interval(Fraction(-1), Fraction(3))
    assert x + y == Interval(Fraction(0), Fraction(5))
    assert x * y == Interval(Fraction(-2), Fraction(6))
    assert (1 / x) == Interval(Fraction(1, 2), Fraction(1))
    assert Interval.around(Fraction(1), Fraction(1, 4)).width == Fraction(1, 2)
    with pytest.raises(ZeroDivisionError):
        y.reciprocal()


def test_exp_interval_encloses() -> None:
    enclosure = exp_interval(Fraction(1))
    assert Fraction(27182818284590452, 10**16) < enclosure.lo
    assert enclosure.hi < Fraction(27182818284590453, 10**16)
    assert enclosure.width < Fraction(1, 10**20)
