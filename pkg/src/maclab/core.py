"""
Exact scalars, the (q, t) parameters, partitions and q-Pochhammer primitives.

Every coefficient in maclab is a `fractions.Fraction`. The helpers here are shared
by all other modules and are pure functions over immutable values.
"""

from __future__ import annotations

import functools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, TypedDict, TypeVar

from maclab.errors import ParameterDegeneracyError, ParameterError

if TYPE_CHECKING:
    from collections.abc import Iterator, Sequence
    from typing import Self

__all__ = [
    "Interval",
    "Params",
    "ParamsConfig",
    "Partition",
    "Scalar",
    "elementary_symmetric",
    "enumerate_partitions",
    "exp_interval",
    "parse_scalar",
    "partitions_of_size",
    "q_pochhammer",
    "z_factor",
    "z_lambda",
]

Scalar = Fraction
T = TypeVar("T")


def parse_scalar(value: object) -> Fraction:
    """
    Parse an exact rational from an int, a Fraction or a "num/den" string.

    Floats are refused because they are not exact.

    Parameters
    ----------
    value : object
        The value to parse.

    Returns
    -------
    Fraction
        The parsed rational.

    Raises
    ------
    ValueError
        If the value is a float, a bool or a malformed string.
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise ValueError(f"expected an exact rational, got {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text.lower():
            raise ValueError(f"expected 'num/den', got {value!r}")
        return Fraction(text)
    raise ValueError(f"expected an exact rational, got {value!r}")


class ParamsConfig(TypedDict):
    """Serialized form of `Params`."""

    q: str
    t: str


@dataclass(frozen=True, slots=True)
class Params:
    """
    The Macdonald parameters.

    Attributes
    ----------
    q : Fraction
        Strictly between 0 and 1.
    t : Fraction
        In [0, 1). t = 0 is the q-Whittaker degeneration.
    """

    q: Fraction
    t: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "q", Fraction(self.q))
        object.__setattr__(self, "t", Fraction(self.t))
        if not 0 < self.q < 1:
            raise ParameterError(f"q must lie in (0, 1), got {self.q}")
        if not 0 <= self.t < 1:
            raise ParameterError(f"t must lie in [0, 1), got {self.t}")

    def require_positive_t(self, context: str) -> None:
        """
        Reject t = 0 for operations that need t^-1.

        Parameters
        ----------
        context : str
            Name of the operation, used in the error message.

        Raises
        ------
        ParameterError
            If t is zero.
        """
        if self.t == 0:
            raise ParameterError(f"{context} requires t > 0")

    def get_config(self) -> ParamsConfig:
        """
        Serialize the parameters with exact rational strings.

        Returns
        -------
        ParamsConfig
            Dictionary with "q" and "t".
        """
        return {"q": str(self.q), "t": str(self.t)}

    @classmethod
    def from_config(cls, config: ParamsConfig) -> Self:
        """
        Build parameters from a configuration dictionary.

        Parameters
        ----------
        config : ParamsConfig
            Dictionary with "q" and "t" as rational strings.

        Returns
        -------
        Params
            New parameter pair.
        """
        return cls(q=parse_scalar(config["q"]), t=parse_scalar(config["t"]))


@dataclass(frozen=True, slots=True)
class Partition:
    """
    An integer partition stored without trailing zeros.

    Attributes
    ----------
    parts : tuple of int
        Weakly decreasing positive parts.
    """

    parts: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        parts = tuple(int(p) for p in self.parts)
        if any(p < 1 for p in parts):
            raise ValueError(f"partition parts must be positive, got {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError(f"partition parts must be weakly decreasing, got {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def trusted(cls, parts: tuple[int, ...]) -> Partition:
        """Build a partition from parts already known to be valid."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "parts", parts)
        return obj

    @classmethod
    def from_string(cls, text: str) -> Partition:
        """
        Parse a comma-separated partition such as "2,1". The empty string is the empty partition.
        """
        text = text.strip()
        if not text or text in {"()", "0"}:
            return cls(())
        return cls(tuple(sorted((int(p) for p in text.split(",") if p.strip()), reverse=True)))

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"

    def part(self, i: int) -> int:
        """The i-th part (0-based), zero beyond the length."""
        return self.parts[i] if i < len(self.parts) else 0

    def multiplicities(self) -> dict[int, int]:
        return dict(Counter(self.parts))

    def conjugate(self) -> Partition:
        if not self.parts:
            return self
        return Partition.trusted(
            tuple(sum(1 for p in self.parts if p > j) for j in range(self.parts[0]))
        )

    def contains(self, other: Partition) -> bool:
        """True when other is a subset of self as Young diagrams."""
        return other.length <= self.length and all(
            o <= s for o, s in zip(other.parts, self.parts, strict=False)
        )

    def dominates(self, other: Partition) -> bool:
        """Dominance order for partitions of the same size."""
        if self.size != other.size:
            return False
        acc_self = acc_other = 0
        for i in range(max(self.length, other.length)):
            acc_self += self.part(i)
            acc_other += other.part(i)
            if acc_self < acc_other:
                return False
        return True

    def interlaces(self, lower: Partition) -> bool:
        """True when lower ≺ self, i.e. self_1 >= lower_1 >= self_2 >= lower_2 >= ..."""
        if lower.length > self.length:
            return False
        for i in range(self.length):
            mu_i = lower.part(i)
            if not self.part(i + 1) <= mu_i <= self.part(i):
                return False
        return True

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        """Key ordering partitions by size, then reverse-lexicographically."""
        return (self.size, tuple(-p for p in self.parts))


@functools.cache
def merge_parts(left: Partition, right: Partition) -> Partition:
    """The partition whose parts are the union of the parts of left and right."""
    if not left.parts:
        return right
    if not right.parts:
        return left
    return Partition.trusted(tuple(sorted(left.parts + right.parts, reverse=True)))


def _partitions(n: int, largest: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first, *rest)


@functools.cache
def partitions_of_size(n: int) -> tuple[Partition, ...]:
    """
    All partitions of n in reverse-lexicographic order, e.g. (3), (2,1), (1,1,1).

    Parameters
    ----------
    n : int
        Nonnegative size.

    Returns
    -------
    tuple of Partition
        The partitions of n.
    """
    assert n >= 0, f"size must be nonnegative, got {n}"
    return tuple(Partition.trusted(p) for p in _partitions(n, n))


def enumerate_partitions(max_size: int) -> list[Partition]:
    """
    Every partition with at most `max_size` boxes, ordered by size and then reverse-lexicographically.

    Parameters
    ----------
    max_size : int
        Nonnegative bound on the size.

    Returns
    -------
    list of Partition
        For max_size = 2 this is [(), (1), (2), (1,1)].
    """
    assert max_size >= 0, f"max_size must be nonnegative, got {max_size}"
    return [lam for n in range(max_size + 1) for lam in partitions_of_size(n)]


def q_pochhammer(a: Fraction, base: Fraction, n: int) -> Fraction:
    """
    The finite q-Pochhammer symbol (a; base)_n = prod_{k<n} (1 - a base^k).

    Parameters
    ----------
    a : Fraction
        Argument.
    base : Fraction
        Deformation parameter.
    n : int
        Number of factors; n = 0 gives 1.

    Returns
    -------
    Fraction
        The product.
    """
    assert n >= 0, f"n must be nonnegative, got {n}"
    out = Fraction(1)
    factor = Fraction(a)
    for _ in range(n):
        out *= 1 - factor
        factor *= base
    return out


def z_lambda(lam: Partition) -> int:
    """The centralizer order prod_i i^{m_i} m_i!."""
    out = 1
    for part, mult in lam.multiplicities().items():
        out *= part**mult * math.factorial(mult)
    return out


@functools.cache
def power_sum_norm(lam: Partition, q: Fraction, t: Fraction) -> Fraction:
    """
    The (q, t) norm of p_lambda for arbitrary rational q and t.

    Raises
    ------
    ParameterDegeneracyError
        If some 1 - t^k vanishes.
    """
    out = Fraction(z_lambda(lam))
    for part in lam.parts:
        denominator = 1 - t**part
        if denominator == 0:
            raise ParameterDegeneracyError(f"1 - t^{part} vanishes at t = {t}")
        out *= (1 - q**part) / denominator
    return out


def z_factor(lam: Partition, params: Params) -> Fraction:
    """
    The Macdonald scalar product <p_lambda, p_lambda>.

    Parameters
    ----------
    lam : Partition
        Index of the power-sum product.
    params : Params
        Macdonald parameters.

    Returns
    -------
    Fraction
        z_lambda times prod_i (1 - q^{lambda_i}) / (1 - t^{lambda_i}).
    """
    return power_sum_norm(lam, params.q, params.t)


@dataclass(frozen=True, slots=True)
class Interval:
    """
    A closed rational interval [lo, hi].

    Used for enclosures of infinite products and certified tail sums.
    """

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        assert self.lo <= self.hi, f"empty interval [{self.lo}, {self.hi}]"

    @classmethod
    def point(cls, value: Fraction | int) -> Interval:
        return cls(Fraction(value), Fraction(value))

    @classmethod
    def around(cls, center: Fraction, radius: Fraction) -> Interval:
        """The interval [center - radius, center + radius]."""
        radius = abs(Fraction(radius))
        return cls(center - radius, center + radius)

    @staticmethod
    def _coerce(other: Interval | Fraction | int) -> Interval:
        return other if isinstance(other, Interval) else Interval.point(other)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, value: Fraction | int) -> bool:
        return self.lo <= value <= self.hi

    def __add__(self, other: Interval | Fraction | int) -> Interval:
        o = self._coerce(other)
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self) -> Interval:
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other: Interval | Fraction | int) -> Interval:
        return self + (-self._coerce(other))

    def __mul__(self, other: Interval | Fraction | int) -> Interval:
        o = self._coerce(other)
        corners = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(min(corners), max(corners))

    __rmul__ = __mul__

    def reciprocal(self) -> Interval:
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError(f"interval {self} contains zero")
        return Interval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other: Interval | Fraction | int) -> Interval:
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other: Fraction | int) -> Interval:
        return Interval.point(other) * self.reciprocal()


def exp_interval(x: Fraction, terms: int = 30) -> Interval:
    """
    Enclose exp(x) by its Taylor polynomial plus a geometric remainder bound.

    Parameters
    ----------
    x : Fraction
        Exponent.
    terms : int, optional
        Number of Taylor terms, raised automatically until the remainder series converges.

    Returns
    -------
    Interval
        An interval containing exp(x).
    """
    x = Fraction(x)
    n = max(terms, 2 * int(abs(x)) + 2)
    partial = Fraction(0)
    term = Fraction(1)
    for k in range(n):
        partial += term
        term = term * x / (k + 1)
    # |remainder| <= |x|^n / n! * 1 / (1 - |x| / (n + 1))
    remainder = abs(term) / (1 - abs(x) / (n + 1))
    return Interval.around(partial, remainder)


def elementary_symmetric(values: Sequence[T], r: int) -> T | int:
    """
    The elementary symmetric polynomial e_r of `values`.

    Works for any ring elements supporting + and * (Fraction, complex, numpy arrays).

    Parameters
    ----------
    values : sequence
        The variables.
    r : int
        Degree; e_0 = 1 and e_r = 0 for r > len(values).

    Returns
    -------
    object
        e_r(values).
    """
    assert r >= 0, f"r must be nonnegative, got {r}"
    e: list[T | int] = [1] + [0] * r
    for x in values:
        for k in range(r, 0, -1):
            e[k] = e[k] + e[k - 1] * x  # type: ignore[operator]
    return e[r]
