from __future__ import annotations

from fractions import Fraction

import pytest

from maclab.contour import (
    Circle,
    ContourScheme,
    LaurentSeries,
    Location,
    RadiusConstraint,
    RationalExpr,
    ResiduePlan,
    cauchy_determinant,
    classify_pole,
    integrate_series,
    iterated_residue_integral,
)
from maclab.errors import ContourError, HigherOrderPoleError, PoleCollisionError
from maclab.symfunc import AlphabetSeries

from .conftest import nearly_equal

UNIT = Circle(Fraction(0), Fraction(1))


def single(variable: str, circle: Circle = UNIT) -> ContourScheme:
    return ContourScheme((variable,), {variable: (circle,)})


def test_simple_pole_inside_and_outside() -> None:
    f = RationalExpr.pole("z", Location(Fraction(1, 2)))
    assert iterated_residue_integral(f, single("z")) == 1
    assert iterated_residue_integral(f, single("z", Circle(Fraction(2), Fraction(1, 2)))) == 0


def test_higher_order_pole_at_origin() -> None:
    # res_{z=0} 1 / (z^2 (z - 2)) = -1/4
    f = RationalExpr.monomial(1, {"z": -2}) * RationalExpr.pole("z", Location(Fraction(2)))
    assert iterated_residue_integral(f, single("z")) == Fraction(-1, 4)


def test_higher_order_pole_away_from_origin() -> None:
    f = RationalExpr.pole("z", Location(Fraction(1, 2)), 2) * RationalExpr.pole("z", Location(Fraction(3)))
    with pytest.raises(HigherOrderPoleError):
        iterated_residue_integral(f, single("z"))
    assert iterated_residue_integral(f, single("z"), allow_higher_order=True) == Fraction(-4, 25)


def test_cancelled_pole_leaves_no_residue() -> None:
    plan = ResiduePlan()
    f = RationalExpr.pole("z", Location(Fraction(1, 2))) * RationalExpr.linear("z", Location(Fraction(1, 2)))
    assert iterated_residue_integral(f, single("z"), plan=plan) == 0


def test_moving_pole() -> None:
    # oint_w oint_z 1 / ((z - w/2) w) = 1
    f = RationalExpr.pole("z", Location(Fraction(1, 2), "w")) * RationalExpr.monomial(1, {"w": -1})
    scheme = ContourScheme(("z", "w"), {"z": (UNIT,), "w": (UNIT,)})
    assert iterated_residue_integral(f, scheme) == 1
    # the image of a large circle encloses the z contour, so the pole at 2w is outside
    g = RationalExpr.pole("z", Location(Fraction(2), "w")) * RationalExpr.monomial(1, {"w": -1})
    assert iterated_residue_integral(g, scheme) == 0


def test_classify_pole_undecidable() -> None:
    circle = Circle(Fraction(1, 2), Fraction(1))
    with pytest.raises(ContourError):
        classify_pole(circle, Location(Fraction(1), "w"), {"w": UNIT})
    with pytest.raises(ContourError):
        classify_pole(UNIT, Location(Fraction(1)), {})
    assert classify_pole(UNIT, Location(Fraction(1, 3), "w"), {"w": UNIT}) == "inside"


def test_scheme_validation() -> None:
    with pytest.raises(ContourError):
        Circle(Fraction(0), Fraction(0))
    with pytest.raises(ContourError):
        ContourScheme(("z",), {"z": (UNIT, Circle(Fraction(1, 2), Fraction(1, 4)))})
    with pytest.raises(ContourError):
        ContourScheme(("z",), {})
    radii = {"z": Fraction(1), "w": Fraction(1, 2)}
    with pytest.raises(ContourError):
        ContourScheme.centered(radii, ("z", "w"), [RadiusConstraint("z", "w")])
    with pytest.raises(ContourError):
        ContourScheme.centered(
            radii,
            ("z", "w"),
            [RadiusConstraint("w", "z", Fraction(4)), RadiusConstraint("z", "w", Fraction(4))],
        )


def test_cauchy_determinant_forms_agree() -> None:
    names = ["x1", "x2", "x3"]
    point = {"x1": Fraction(1, 3), "x2": Fraction(1, 7), "x3": Fraction(2, 11)}
    u = [Fraction(2), Fraction(3), Fraction(5)]
    product = cauchy_determinant(names, u, 1)
    expanded = cauchy_determinant(names, u, 1, expanded=True)
    assert product.evaluate(point) == expanded.evaluate(point)


def test_cauchy_determinant_two_by_two() -> None:
    x, y = Fraction(1, 3), Fraction(1, 5)
    q = Fraction(1, 2)
    value = cauchy_determinant(["w1", "w2"], q, 1).evaluate({"w1": x, "w2": y})
    expected = 1 / ((q - 1) * x * (q - 1) * y) - 1 / ((q * x - y) * (q * y - x))
    assert value == expected


def test_singular_cauchy_diagonal() -> None:
    with pytest.raises(PoleCollisionError):
        cauchy_determinant(["w"], 1, 1)


def test_numeric_evaluation_matches_exact() -> None:
    f = (
        RationalExpr.pole("z", Location(Fraction(1, 3), "w"))
        * RationalExpr.monomial(Fraction(3, 2), {"w": 2})
        + RationalExpr.linear("z", Location(Fraction(2)))
    )
    point = {"z": Fraction(1, 2), "w": Fraction(2, 3)}
    assert nearly_equal(f.evaluate_numeric({k: float(v) for k, v in point.items()}), float(f.evaluate(point)), 1e-12)


def test_residue_plan_digest_is_stable() -> None:
    f = RationalExpr.pole("z", Location(Fraction(1, 2), "w")) * RationalExpr.monomial(1, {"w": -1})
    scheme = ContourScheme(("z", "w"), {"z": (UNIT,), "w": (UNIT,)})
    first, second = ResiduePlan(), ResiduePlan()
    iterated_residue_integral(f, scheme, plan=first)
    iterated_residue_integral(f, scheme, plan=second)
    assert first.digest() == second.digest()
    assert first.summary()["inside"] >= 1


def test_integrate_series_picks_residue_terms() -> None:
    a = AlphabetSeries.power_sum("X", 1, 2)
    b = AlphabetSeries.power_sum("X", 2, 2)
    series = LaurentSeries.in_variable(("z",), "z", {0: a, -1: b}, 2)
    rational = RationalExpr.monomial(1, {"z": -1})
    assert integrate_series(series, rational, single("z")) == a
