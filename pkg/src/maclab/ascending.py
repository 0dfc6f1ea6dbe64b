"""
Ascending Macdonald processes and the Macdonald difference operators.

An ascending process is the formal process specialized to single variables
a_1, ..., a_N on the A side and a specialization rho of the last B alphabet. Its
weights are supported on interlacing sequences lambda^1 < lambda^2 < ... < lambda^N
with l(lambda^i) <= i, and the normalization Pi(a; rho) is an infinite product which
is only ever enclosed, never evaluated.

Expectations of products of e_r(q^{lambda_j} t^{n-j}) are computed two ways: as
finite partition sums with a certified tail bound, and as iterated difference
operators applied to Pi(x; rho) and evaluated at x = a.
"""

from __future__ import annotations

import functools
import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Any, TypedDict

from maclab.core import (
    Interval,
    Params,
    Partition,
    elementary_symmetric,
    enumerate_partitions,
    exp_interval,
    parse_scalar,
)
from maclab.errors import ConfigError, ConvergenceError, PoleCollisionError, RadiusViolationError
from maclab.symfunc import RhoConfig, SpecializationRho, evaluate, macdonald_P, macdonald_Q, skew_P, specialize

if TYPE_CHECKING:
    from collections.abc import Callable, Iterator, Sequence
    from typing import Self

__all__ = [
    "AscendingConfig",
    "AscendingConfigDict",
    "AscendingObservable",
    "ShiftedProduct",
    "TailBound",
    "apply_difference_operator",
    "ascending_numerator",
    "ascending_sequences",
    "ascending_weight",
    "difference_operator_terms",
    "interlacing_below",
    "marginal_numerator",
    "measure_numerator",
    "operator_chain_expectation",
    "operator_eigen_defect",
    "pi_enclosure",
    "spectrum",
    "tail_bound",
    "truncated_expectation_lhs",
]

logger = logging.getLogger(__name__)

Sequence_ = tuple[Partition, ...]

# Remainder target for the infinite q-products in Pi(x; rho)
_PRODUCT_REMAINDER = Fraction(1, 10**30)


class AscendingConfigDict(TypedDict):
    """Serialized form of `AscendingConfig`."""

    q: str
    t: str
    a: list[str]
    rho: RhoConfig


@dataclass(frozen=True, slots=True)
class AscendingConfig:
    """
    Parameters of an ascending Macdonald process.

    Attributes
    ----------
    a : tuple of Fraction
        Nonzero distinct variables a_1, ..., a_N.
    rho : SpecializationRho
        Specialization of the last B alphabet.
    params : Params
        Macdonald parameters.

    Raises
    ------
    ConfigError
        If an a_i is zero or two of them coincide.
    RadiusViolationError
        If |a_i| R >= 1 for some i.
    """

    a: tuple[Fraction, ...]
    rho: SpecializationRho
    params: Params

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", tuple(Fraction(x) for x in self.a))
        if not self.a:
            raise ConfigError("a", "at least one variable a_i is required")
        if any(x == 0 for x in self.a):
            raise ConfigError("a", "the variables a_i must be nonzero")
        if len(set(self.a)) != len(self.a):
            raise ConfigError("a", "the variables a_i must be distinct; perturb coinciding values")
        for x in self.a:
            if abs(x) * self.radius >= 1:
                raise RadiusViolationError("a", f"|a_i| R = {abs(x) * self.radius} must be below 1")

    @property
    def N(self) -> int:
        return len(self.a)

    @property
    def radius(self) -> Fraction:
        return Fraction(self.rho.radius)  # type: ignore[arg-type]

    def require_hatted_radius(self, m: int) -> None:
        """
        Check the strengthened condition |a_i| R < q^m of the inverted observables.

        Raises
        ------
        RadiusViolationError
            If the condition fails.
        """
        bound = self.params.q**m
        for x in self.a:
            if abs(x) * self.radius >= bound:
                raise RadiusViolationError("a", f"|a_i| R = {abs(x) * self.radius} must be below q^{m} = {bound}")

    def get_config(self) -> AscendingConfigDict:
        return {
            **self.params.get_config(),
            "a": [str(x) for x in self.a],
            "rho": self.rho.get_config(),
        }

    @classmethod
    def from_config(cls, config: AscendingConfigDict) -> Self:
        return cls(
            a=tuple(parse_scalar(x) for x in config["a"]),
            rho=SpecializationRho.from_config(config["rho"]),
            params=Params.from_config(config),
        )


def interlacing_below(lam: Partition, length: int) -> Iterator[Partition]:
    """
    Partitions mu with l(mu) <= length interlacing below lam.

    Interlacing means lam_1 >= mu_1 >= lam_2 >= mu_2 >= ...
    """
    if lam.length > length + 1:
        return
    ranges = [range(lam.part(j + 1), lam.part(j) + 1) for j in range(length)]
    for parts in itertools.product(*ranges):
        yield Partition.trusted(tuple(p for p in parts if p))


def ascending_sequences(N: int, max_size: int) -> Iterator[Sequence_]:
    """Every interlacing sequence lambda^1 < ... < lambda^N with |lambda^N| <= max_size."""

    def below(lam: Partition, level: int) -> Iterator[tuple[Partition, ...]]:
        if level == 0:
            yield ()
            return
        for mu in interlacing_below(lam, level):
            for rest in below(mu, level - 1):
                yield (*rest, mu)

    for top in enumerate_partitions(max_size):
        if top.length > N:
            continue
        for lower in below(top, N - 1):
            yield (*lower, top)


@functools.cache
def _single_variable_skew(lam: Partition, mu: Partition, q: Fraction, t: Fraction) -> Fraction:
    """P_{lam/mu}(1), the coefficient of a^{|lam| - |mu|} in P_{lam/mu}(a)."""
    return evaluate(skew_P(lam, mu, Params(q, t), lam.size), [1])


@functools.cache
def _q_value(lam: Partition, params: Params, rho: SpecializationRho) -> Fraction:
    series = macdonald_Q(lam, params, lam.size).as_series("_rho")
    return specialize(series, "_rho", rho).constant_term()


def ascending_numerator(sequence: Sequence_, config: AscendingConfig) -> Fraction:
    """
    P_{lambda^1}(a_1) prod_k P_{lambda^k/lambda^{k-1}}(a_k) Q_{lambda^N}(rho).

    Zero off the support: l(lambda^i) > i or a broken interlacing.
    """
    if len(sequence) != config.N:
        raise ConfigError("N", f"expected {config.N} partitions, got {len(sequence)}")
    params = config.params
    previous = Partition()
    value = Fraction(1)
    for level, (lam, a) in enumerate(zip(sequence, config.a, strict=True), start=1):
        if lam.length > level or not lam.interlaces(previous):
            return Fraction(0)
        value *= _single_variable_skew(lam, previous, params.q, params.t) * a ** (lam.size - previous.size)
        previous = lam
    return value * _q_value(sequence[-1], params, config.rho)


def measure_numerator(lam: Partition, config: AscendingConfig) -> Fraction:
    """P_lambda(a_1, ..., a_N) Q_lambda(rho), the unnormalized Macdonald measure."""
    if lam.length > config.N:
        return Fraction(0)
    p_value = evaluate(macdonald_P(lam, config.params, lam.size), config.a)
    return p_value * _q_value(lam, config.params, config.rho)


def marginal_numerator(lam: Partition, config: AscendingConfig) -> Fraction:
    """The sum of `ascending_numerator` over all lower levels below lambda^N = lam."""
    total = Fraction(0)
    for sequence in ascending_sequences(config.N, lam.size):
        if sequence[-1] == lam:
            total += ascending_numerator(sequence, config)
    return total


def _q_product_enclosure(u: Fraction, params: Params) -> Interval:
    """Enclose prod_{k>=0} (1 - t u q^k) / (1 - u q^k) for |u| < 1."""
    q, t = params.q, params.t
    assert abs(u) < 1, f"|u| = {abs(u)} must be below 1"
    partial = Fraction(1)
    k = 0
    while True:
        eps = abs(u) * q**k
        bound = eps / ((1 - q) * (1 - eps))
        if bound < _PRODUCT_REMAINDER:
            break
        partial *= (1 - t * u * q**k) / (1 - u * q**k)
        k += 1
    return Interval(1 - bound, 1 / (1 - bound)) * partial


def pi_enclosure(points: Sequence[Fraction], rho: SpecializationRho, params: Params) -> Interval:
    """
    Enclose Pi(x_1, ..., x_n; rho) = prod_i Pi(x_i; rho).

    Parameters
    ----------
    points : sequence of Fraction
        The variables x_i with |x_i| R < 1.
    rho : SpecializationRho
        Specialization.
    params : Params
        Macdonald parameters.

    Returns
    -------
    Interval
        A positive interval containing the product.
    """
    if rho.kind == "zero":
        return Interval.point(1)
    if rho.kind == "plancherel":
        exponent = (1 - params.t) / (1 - params.q) * rho.gamma * sum(points, Fraction(0))
        return exp_interval(exponent)
    out = Interval.point(1)
    for x in points:
        for b in rho.b:
            if b:
                out = out * _q_product_enclosure(Fraction(x) * b, params)
    return out


def ascending_weight(sequence: Sequence_, config: AscendingConfig) -> Interval:
    """
    The normalized ascending weight, enclosed.

    Parameters
    ----------
    sequence : tuple of Partition
        lambda^1, ..., lambda^N.
    config : AscendingConfig
        Process parameters.

    Returns
    -------
    Interval
        The exact numerator divided by an enclosure of Pi(a; rho).
    """
    numerator = ascending_numerator(sequence, config)
    return Interval.point(numerator) / pi_enclosure(config.a, config.rho, config.params)


def spectrum(lam: Partition, n: int, params: Params, *, hatted: bool = False) -> list[Fraction]:
    """
    The eigenvalue arguments q^{lambda_j} t^{n-j}, or q^{-lambda_j} t^{j-n} when hatted.
    """
    q, t = params.q, params.t
    if hatted:
        params.require_positive_t("hatted spectrum")
        return [q ** (-lam.part(j)) * t ** (j + 1 - n) for j in range(n)]
    return [q ** lam.part(j) * t ** (n - 1 - j) for j in range(n)]


@dataclass(frozen=True, slots=True)
class AscendingObservable:
    """
    The observable prod_i e_{r_i}(spectrum of lambda^{n_i}).

    Attributes
    ----------
    levels : tuple of int
        n_1 >= n_2 >= ... >= n_m >= 1.
    rs : tuple of int
        r_i with 0 <= r_i <= n_i.
    hatted : bool
        Use the inverted spectrum q^{-lambda_j} t^{j-n}.
    """

    levels: tuple[int, ...] = ()
    rs: tuple[int, ...] = ()
    hatted: bool = False

    def validate(self, N: int) -> None:
        """
        Raises
        ------
        ConfigError
            If the levels are not weakly decreasing within 1..N or some r_i is out of range.
        """
        if len(self.levels) != len(self.rs):
            raise ConfigError("r", f"{len(self.rs)} orders given for {len(self.levels)} levels")
        if any(n < 1 or n > N for n in self.levels):
            raise ConfigError("levels", f"levels must lie in 1..{N}, got {list(self.levels)}")
        if any(a < b for a, b in itertools.pairwise(self.levels)):
            raise ConfigError("levels", f"levels must be weakly decreasing, got {list(self.levels)}")
        if any(not 0 <= r <= n for r, n in zip(self.rs, self.levels, strict=True)):
            raise ConfigError("r", f"need 0 <= r_i <= n_i, got r = {list(self.rs)}")

    @property
    def active(self) -> int:
        return sum(1 for r in self.rs if r)

    def value(self, sequence: Sequence_, params: Params) -> Fraction:
        out = Fraction(1)
        for n, r in zip(self.levels, self.rs, strict=True):
            out *= Fraction(elementary_symmetric(spectrum(sequence[n - 1], n, params, hatted=self.hatted), r))
        return out

    def bound(self, params: Params) -> tuple[Fraction, Fraction]:
        """
        Constants (C, g) with |value| <= C g^{|lambda^N|}.
        """
        constant = Fraction(1)
        for n, r in zip(self.levels, self.rs, strict=True):
            constant *= math.comb(n, r)
            if self.hatted:
                constant *= params.t ** (-r * (n - 1))
        g = params.q ** (-self.active) if self.hatted else Fraction(1)
        return constant, g


@dataclass(frozen=True, slots=True)
class TailBound:
    """
    Certified bound on the discarded part of an ascending partition sum.

    sum_{|lambda^N| > L} |observable * numerator| <= constant * majorant * ratio^{L+1}, where
    majorant encloses Pi(z0 |a|; |rho|) from above and ratio = g / z0.
    """

    L: int
    z0: Fraction
    constant: Fraction
    majorant: Fraction
    ratio: Fraction

    @property
    def bound(self) -> Fraction:
        return self.constant * self.majorant * self.ratio ** (self.L + 1)


def _absolute(rho: SpecializationRho) -> SpecializationRho:
    if rho.kind == "finite":
        return SpecializationRho.finite([abs(b) for b in rho.b], rho.radius)
    if rho.kind == "plancherel":
        return SpecializationRho.plancherel(abs(rho.gamma), rho.radius)
    return rho


def tail_bound(observable: AscendingObservable, config: AscendingConfig, L: int) -> TailBound:
    """
    Tail bound for truncation at |lambda^N| <= L.

    The P and Q functions have nonnegative monomial coefficients for 0 <= q, t < 1, so the
    degree-d part of Pi(|a|; |rho|) majorizes the level-d terms; a shift by z0 turns the
    majorant series into a geometric bound.

    Raises
    ------
    ConvergenceError
        If g / z0 >= 1, so that the bound cannot shrink with L.
    """
    constant, g = observable.bound(config.params)
    largest = max(abs(x) for x in config.a)
    radius = config.radius
    if radius == 0:
        # the series terminates at lambda^N = empty
        return TailBound(L, Fraction(0), constant, Fraction(0), Fraction(0))
    z0 = 1 / (2 * largest * radius)
    if g >= z0:
        raise ConvergenceError(f"tail ratio g / z0 = {g / z0} is not below 1; shrink |a| R")
    shifted = [z0 * abs(x) for x in config.a]
    majorant = pi_enclosure(shifted, _absolute(config.rho), config.params).hi
    return TailBound(L, z0, constant, majorant, g / z0)


def truncated_expectation_lhs(
    observable: AscendingObservable,
    config: AscendingConfig,
    L: int | None = None,
    *,
    tolerance: Fraction = Fraction(1, 10**12),
    max_size: int = 14,
) -> tuple[Interval, TailBound]:
    """
    Enclose the expectation of an observable by a partial sum plus a certified tail.

    Parameters
    ----------
    observable : AscendingObservable
        Observable; hatted observables need |a_i| R < q^m.
    config : AscendingConfig
        Process parameters.
    L : int, optional
        Truncation size |lambda^N| <= L. Chosen as the smallest L whose tail bound is
        below `tolerance` when omitted.
    tolerance : Fraction, optional
        Target tail bound.
    max_size : int, optional
        Largest L tried when choosing automatically.

    Returns
    -------
    tuple of Interval and TailBound
        The enclosure of the expectation and the tail bound used.

    Raises
    ------
    ConvergenceError
        If no L <= max_size achieves the tolerance.
    """
    observable.validate(config.N)
    if observable.hatted:
        config.require_hatted_radius(observable.active)
    if L is None:
        for size in range(max_size + 1):
            tail = tail_bound(observable, config, size)
            if tail.bound < tolerance:
                L = size
                break
        else:
            raise ConvergenceError(f"tail bound above {tolerance} for every L <= {max_size}")
    tail = tail_bound(observable, config, L)
    total = Fraction(0)
    count = 0
    for sequence in ascending_sequences(config.N, L):
        numerator = ascending_numerator(sequence, config)
        if numerator:
            total += observable.value(sequence, config.params) * numerator
            count += 1
    logger.info("partial sum over %d sequences with |lambda^N| <= %d, tail %s", count, L, float(tail.bound))
    pi = pi_enclosure(config.a, config.rho, config.params)
    return Interval.around(total, tail.bound) / pi, tail


def difference_operator_terms(
    r: int, n: int, x: Sequence[Any], q: Any, t: Any
) -> Iterator[tuple[Any, tuple[int, ...], tuple[Any, ...]]]:
    """
    The terms of M^r_n at the point x.

    Yields (A_I(x; t), I, x with x_i -> q x_i for i in I) for every I subset of {0..n-1}
    with |I| = r, where A_I(x; t) = t^{r(r-1)/2} prod_{i in I, j not in I} (t x_i - x_j) / (x_i - x_j).

    Raises
    ------
    PoleCollisionError
        If two of x_1..x_n coincide.
    """
    for subset in itertools.combinations(range(n), r):
        coefficient: Any = t ** (r * (r - 1) // 2)
        for i in subset:
            for j in range(n):
                if j in subset:
                    continue
                if x[i] == x[j]:
                    raise PoleCollisionError(f"x_{i + 1} = x_{j + 1} in the difference operator")
                coefficient = coefficient * (t * x[i] - x[j]) / (x[i] - x[j])
        shifted = list(x)
        for i in subset:
            shifted[i] = q * x[i]
        yield coefficient, subset, tuple(shifted)


@dataclass(frozen=True)
class ShiftedProduct:
    """
    A function F(x) = R(x) Pi(x_1; rho) ... Pi(x_n; rho), stored through R.

    Difference operators act on the class exactly: T_{q,i} multiplies Pi by
    Pi(q x_i) / Pi(x_i), which is rational for finite alphabets.
    """

    rational: Callable[[tuple[Any, ...]], Any]
    rho: SpecializationRho
    params: Params
    n: int

    @classmethod
    def reference(cls, rho: SpecializationRho, params: Params, n: int) -> ShiftedProduct:
        """Pi(x; rho) itself, R = 1."""
        return cls(lambda x: 1, rho, params, n)

    def __call__(self, point: Sequence[Any]) -> Any:
        return self.rational(tuple(point))


def apply_difference_operator(r: int, n: int, f: ShiftedProduct, *, hatted: bool = False) -> ShiftedProduct:
    """
    Apply M^r_n (acting on x_1..x_n) to a shifted product.

    Parameters
    ----------
    r, n : int
        0 <= r <= n <= f.n.
    f : ShiftedProduct
        Argument.
    hatted : bool, optional
        Replace (q, t) by (1/q, 1/t); the shift ratio becomes 1 / h(x / q).

    Returns
    -------
    ShiftedProduct
        M^r_n f.

    Raises
    ------
    ConfigError
        Unless 0 <= r <= n <= f.n.
    PoleCollisionError
        If a shifted evaluation meets a pole.
    """
    if not 0 <= r <= n <= f.n:
        raise ConfigError("r", f"need 0 <= r <= n <= {f.n}, got r={r}, n={n}")
    params, rho = f.params, f.rho
    if hatted:
        params.require_positive_t("hatted difference operator")
        q_eff, t_eff = 1 / params.q, 1 / params.t
    else:
        q_eff, t_eff = params.q, params.t

    def rational(x: tuple[Any, ...]) -> Any:
        total: Any = 0
        for coefficient, subset, shifted in difference_operator_terms(r, n, x, q_eff, t_eff):
            ratio: Any = 1
            try:
                for i in subset:
                    if hatted:
                        ratio = ratio / rho.shift_ratio(shifted[i], params)
                    else:
                        ratio = ratio * rho.shift_ratio(x[i], params)
            except ZeroDivisionError as exc:
                raise PoleCollisionError(f"shift ratio is singular at {shifted}") from exc
            total = total + coefficient * ratio * f.rational(shifted)
        return total

    return ShiftedProduct(rational, rho, params, f.n)


def operator_chain_expectation(
    levels: Sequence[int],
    rs: Sequence[int],
    config: AscendingConfig,
    *,
    hatted: bool = False,
) -> Fraction | complex:
    """
    (M^{r_m}_{n_m} ... M^{r_1}_{n_1} Pi)(a) / Pi(a; rho).

    M^{r_1}_{n_1} is applied first. Exact for finite and zero specializations; Plancherel
    specializations give a complex floating-point value.

    Parameters
    ----------
    levels : sequence of int
        N >= n_1 >= ... >= n_m >= 1.
    rs : sequence of int
        0 <= r_i <= n_i.
    config : AscendingConfig
        Process parameters.
    hatted : bool, optional
        Use the inverted operators.

    Returns
    -------
    Fraction or complex
        The expectation of prod_i e_{r_i} of the (inverted) spectrum of lambda^{n_i}.
    """
    AscendingObservable(tuple(levels), tuple(rs), hatted).validate(config.N)
    f = ShiftedProduct.reference(config.rho, config.params, config.N)
    for n, r in zip(levels, rs, strict=True):
        if r:
            f = apply_difference_operator(r, n, f, hatted=hatted)
    point: tuple[Any, ...] = tuple(config.a) if config.rho.is_exact else tuple(complex(x) for x in config.a)
    value = f(point)
    return Fraction(value) if config.rho.is_exact else complex(value)


def operator_eigen_defect(
    lam: Partition,
    n: int,
    r: int,
    params: Params,
    point: Sequence[Fraction],
    *,
    hatted: bool = False,
) -> Fraction:
    """
    M^r_n P_lambda - e_r(spectrum) P_lambda at one point of n variables.

    Zero at every point exactly when the eigenrelation holds.
    """
    if len(point) != n:
        raise ConfigError("points", f"expected {n} coordinates, got {len(point)}")
    polynomial = macdonald_P(lam, params, lam.size)
    q, t = (1 / params.q, 1 / params.t) if hatted else (params.q, params.t)
    applied = Fraction(0)
    for coefficient, _, shifted in difference_operator_terms(r, n, list(point), q, t):
        applied += coefficient * evaluate(polynomial, shifted)
    eigenvalue = Fraction(elementary_symmetric(spectrum(lam, n, params, hatted=hatted), r))
    return applied - eigenvalue * evaluate(polynomial, point)
