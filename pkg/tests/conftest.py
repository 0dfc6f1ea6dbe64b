from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from maclab.core import Params

GRID = [
    (Fraction(1, 3), Fraction(1, 5)),
    (Fraction(2, 7), Fraction(1, 2)),
    (Fraction(1, 2), Fraction(1, 3)),
]


def nearly_equal(a: object, b: object, sensitivity: float) -> bool:
    """
    Compare if two arrays are approximately equal within a tolerance.
    The arrays are linearized before comparison.
    """
    return np.allclose(np.array(a, dtype=complex).ravel(), np.array(b, dtype=complex).ravel(), atol=sensitivity, rtol=0)


@pytest.fixture(params=GRID, ids=lambda p: f"q={p[0]},t={p[1]}")
def params(request: pytest.FixtureRequest) -> Params:
    return Params(*request.param)


@pytest.fixture
def base_params() -> Params:
    return Params(Fraction(1, 3), Fraction(1, 5))
