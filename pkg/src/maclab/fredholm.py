"""
The Noumi q-integral operator and the two Fredholm determinants, one u-coefficient at a time.

The Noumi operator is a sum over nu in Z_{>=0}^N of terms u^{|nu|} C_nu(x) prod_i T_{q,i}^{nu_i};
its u^r part is diagonal on Macdonald polynomials with eigenvalue g_r = Q_(r) of the spectrum
q^{lambda_i} t^{N-i}. Applied to Pi(x; rho) and divided by Pi, the u^r coefficient at x = a is
a finite sum, which the first Fredholm determinant reproduces through residues at the a_j.
The second Fredholm determinant reproduces the Macdonald difference operators.
"""

from __future__ import annotations

import itertools
import logging
import math
from fractions import Fraction
from typing import TYPE_CHECKING, Any

from maclab.core import Params, Partition, q_pochhammer
from maclab.errors import ConfigError, PoleCollisionError
from maclab.integrands import fredholm_ek_integrand, fredholm_qt_integrand
from maclab.symfunc import evaluate, macdonald_P

if TYPE_CHECKING:
    from collections.abc import Iterator, Sequence

    from maclab.ascending import AscendingConfig
    from maclab.contour import ResiduePlan

__all__ = [
    "compositions",
    "fredholm_ek_coefficient",
    "fredholm_qt_coefficient",
    "noumi_coefficient",
    "noumi_eigen_defect",
    "noumi_eigenvalue",
    "noumi_term_coefficient",
    "weak_compositions",
]

logger = logging.getLogger(__name__)


def compositions(r: int, k: int) -> Iterator[tuple[int, ...]]:
    """Sequences of k positive integers summing to r."""
    if k == 0:
        if r == 0:
            yield ()
        return
    for cuts in itertools.combinations(range(1, r), k - 1):
        bounds = (0, *cuts, r)
        yield tuple(b - a for a, b in itertools.pairwise(bounds))


def weak_compositions(r: int, n: int) -> Iterator[tuple[int, ...]]:
    """Sequences of n nonnegative integers summing to r."""
    for parts in compositions(r + n, n):
        yield tuple(p - 1 for p in parts)


def _require_order(r: int) -> None:
    if r < 0:
        raise ConfigError("r", f"coefficient index must be nonnegative, got {r}")


def noumi_term_coefficient(nu: Sequence[int], x: Sequence[Any], params: Params) -> Any:
    """
    The coefficient C_nu(x) of prod_i T_{q,i}^{nu_i} in the Noumi operator.

    C_nu(x) = prod_{i<j} (q^{nu_j} x_j - q^{nu_i} x_i) / (x_j - x_i)
    prod_{i,j} (t x_i / x_j; q)_{nu_i} / (q x_i / x_j; q)_{nu_i}.

    Raises
    ------
    PoleCollisionError
        If two coordinates coincide or a q-Pochhammer denominator vanishes.
    """
    if len(nu) != len(x):
        raise ConfigError("points", f"nu has {len(nu)} parts for {len(x)} variables")
    q, t = params.q, params.t
    value: Any = Fraction(1)
    for i, j in itertools.combinations(range(len(x)), 2):
        if x[i] == x[j]:
            raise PoleCollisionError(f"x_{i + 1} = x_{j + 1} in the Noumi operator")
        value = value * (q ** nu[j] * x[j] - q ** nu[i] * x[i]) / (x[j] - x[i])
    for i, j in itertools.product(range(len(x)), repeat=2):
        if not nu[i]:
            continue
        denominator = q_pochhammer(q * x[i] / x[j], q, nu[i])
        if denominator == 0:
            raise PoleCollisionError(f"(q x_{i + 1}/x_{j + 1}; q)_{nu[i]} vanishes")
        value = value * q_pochhammer(t * x[i] / x[j], q, nu[i]) / denominator
    return value


def noumi_coefficient(r: int, config: AscendingConfig) -> Fraction | complex:
    """
    The u^r coefficient of (Noumi operator Pi)(x) / Pi(x) at x = a.

    Each term contributes C_nu(a) prod_i prod_{s < nu_i} h(q^s a_i) with
    h(x) = Pi(q x; rho) / Pi(x; rho).

    Parameters
    ----------
    r : int
        Power of u, r >= 0.
    config : AscendingConfig
        Process parameters.

    Returns
    -------
    Fraction or complex
        Exact for finite and zero specializations, floating point for Plancherel.

    Raises
    ------
    ConfigError
        If r < 0.
    """
    _require_order(r)
    params, rho = config.params, config.rho
    q = params.q
    total: Any = Fraction(0)
    for nu in weak_compositions(r, config.N):
        term = noumi_term_coefficient(nu, config.a, params)
        for x, n in zip(config.a, nu, strict=True):
            for s in range(n):
                term = term * rho.shift_ratio(q**s * x, params)
        total = total + term
    return Fraction(total) if rho.is_exact else complex(total)


def noumi_eigenvalue(lam: Partition, n: int, r: int, params: Params) -> Fraction:
    """
    g_r(q^{lambda_1} t^{n-1}, ..., q^{lambda_n}).

    The u^r coefficient of prod_i (t y_i u; q)_inf / (y_i u; q)_inf, expanded by the
    q-binomial theorem as sum_{|m| = r} prod_i (t; q)_{m_i} / (q; q)_{m_i} y_i^{m_i}.
    """
    if lam.length > n:
        raise ConfigError("partitions", f"{lam} has more than {n} parts")
    _require_order(r)
    q, t = params.q, params.t
    y = [q ** lam.part(i) * t ** (n - 1 - i) for i in range(n)]
    total = Fraction(0)
    for m in weak_compositions(r, n):
        term = Fraction(1)
        for yi, mi in zip(y, m, strict=True):
            term *= q_pochhammer(t, q, mi) / q_pochhammer(q, q, mi) * yi**mi
        total += term
    return total


def noumi_eigen_defect(lam: Partition, n: int, r: int, params: Params, point: Sequence[Fraction]) -> Fraction:
    """
    The u^r part of the Noumi operator applied to P_lambda, minus g_r(spectrum) P_lambda, at a point.

    Zero at every point exactly when the eigenrelation holds at order r.
    """
    if len(point) != n:
        raise ConfigError("points", f"expected {n} coordinates, got {len(point)}")
    polynomial = macdonald_P(lam, params, lam.size)
    q = params.q
    applied = Fraction(0)
    for nu in weak_compositions(r, n):
        shifted = [q**k * x for k, x in zip(nu, point, strict=True)]
        applied += noumi_term_coefficient(nu, point, params) * evaluate(polynomial, shifted)
    return applied - noumi_eigenvalue(lam, n, r, params) * evaluate(polynomial, point)


def fredholm_qt_coefficient(
    r: int,
    config: AscendingConfig,
    *,
    max_terms: int | None = None,
    plan: ResiduePlan | None = None,
) -> Fraction:
    """
    The u^r coefficient of det(I + K) through its Fredholm expansion.

    The k-th term of the expansion contributes (1/k!) times the sum over compositions
    v_1 + ... + v_k = r of the k-fold integral of det[K'(v_i, w_i, w_j)], each evaluated by
    residues at the a_j.

    Parameters
    ----------
    r : int
        Power of u, r >= 0.
    config : AscendingConfig
        Process parameters; a finite or zero specialization.
    max_terms : int, optional
        Last expansion term to include; min(r, N) by default. Terms beyond N vanish.
    plan : ResiduePlan, optional
        Receives the pole classifications.

    Returns
    -------
    Fraction
        The coefficient; 1 for r = 0.
    """
    _require_order(r)
    if r == 0:
        return Fraction(1)
    last = min(r, config.N) if max_terms is None else min(r, max_terms)
    total = Fraction(0)
    for k in range(1, last + 1):
        term = Fraction(0)
        for v in compositions(r, k):
            term += fredholm_qt_integrand(v, config).evaluate(plan=plan)
        logger.debug("Fredholm term k=%d at u^%d: %s", k, r, term)
        total += term / math.factorial(k)
    return total


def fredholm_ek_coefficient(r: int, config: AscendingConfig, *, plan: ResiduePlan | None = None) -> Fraction:
    """
    The u^r coefficient of det(I - u J) with J(w, w') = F(w) / (t w' - w).

    Equals (-1)^r (M^r_N Pi)(a) / Pi(a) for r <= N and vanishes for r > N.
    """
    _require_order(r)
    value = fredholm_ek_integrand(r, config).evaluate(plan=plan)
    assert isinstance(value, Fraction)
    return value
