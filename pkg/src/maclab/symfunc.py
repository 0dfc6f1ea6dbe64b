"""
Symmetric functions in the power-sum basis.

`SymFunc` holds a truncated linear combination of power-sum products p_lambda in a
single alphabet; `AlphabetSeries` is the same object over several named alphabets and
is the home of formal measures. Macdonald P and Q functions are built by Gram-Schmidt
over the monomial basis, skew functions by pairing the coproduct against Q_mu.

All series are truncated at a total degree D: results are exact in degrees <= D and
absent above.
"""

from __future__ import annotations

import functools
import itertools
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Literal, TypedDict

import numpy as np
import sympy

from maclab.core import (
    Params,
    Partition,
    enumerate_partitions,
    merge_parts,
    parse_scalar,
    partitions_of_size,
    power_sum_norm,
    z_factor,
    z_lambda,
)
from maclab.errors import (
    ParameterDegeneracyError,
    PoleCollisionError,
    RadiusViolationError,
)

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Mapping, Sequence
    from typing import Self

__all__ = [
    "AlphabetSeries",
    "KernelKind",
    "MonomialTable",
    "RhoConfig",
    "SpecializationRho",
    "SymFunc",
    "TruncatedExponential",
    "alphabet_pair",
    "cauchy_sum",
    "coproduct",
    "evaluate",
    "format_polynomial",
    "generic_evaluator",
    "gram_schmidt_basis",
    "kernel_coefficient",
    "kernel_in_variable",
    "kernel_series",
    "macdonald_P",
    "macdonald_Q",
    "macdonald_norm",
    "macdonald_pair",
    "monomial_table",
    "pair_exponentials",
    "restrict_to_vars",
    "schur_jacobi_trudi",
    "skew_P",
    "skew_Q",
    "specialize",
    "tensor",
]

logger = logging.getLogger(__name__)

EMPTY = Partition()
Key = tuple[Partition, ...]
KernelKind = Literal["Pi", "Pi_inverse", "H", "H_inverse", "W"]


def _weight(key: Key) -> int:
    return sum(sum(lam.parts) for lam in key)


def _union(left: Sequence[str], right: Sequence[str]) -> tuple[str, ...]:
    return tuple(left) + tuple(name for name in right if name not in left)


class SymFunc:
    """
    A symmetric function in one alphabet, truncated at degree `degree`.

    Parameters
    ----------
    terms : mapping of Partition to Fraction, optional
        Coefficients of p_lambda. Zero coefficients and terms above the degree are dropped.
    degree : int, optional
        Truncation order D.
    """

    __slots__ = ("degree", "terms")

    def __init__(self, terms: Mapping[Partition, Fraction | int] | None = None, degree: int = 0) -> None:
        assert degree >= 0, f"truncation order must be nonnegative, got {degree}"
        self.degree = degree
        self.terms: dict[Partition, Fraction] = {
            lam: Fraction(c) for lam, c in (terms or {}).items() if c and lam.size <= degree
        }

    @classmethod
    def one(cls, degree: int = 0) -> Self:
        return cls({EMPTY: 1}, degree)

    @classmethod
    def power_sum(cls, k: int, degree: int) -> Self:
        return cls({Partition.trusted((k,)): 1}, degree)

    def coefficient(self, lam: Partition) -> Fraction:
        return self.terms.get(lam, Fraction(0))

    def homogeneous(self, d: int) -> SymFunc:
        """The degree-d component."""
        return SymFunc({lam: c for lam, c in self.terms.items() if lam.size == d}, self.degree)

    def with_degree(self, degree: int) -> SymFunc:
        return SymFunc(self.terms, degree)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: SymFunc) -> SymFunc:
        out = defaultdict(Fraction, self.terms)
        for lam, c in other.terms.items():
            out[lam] += c
        return SymFunc(out, min(self.degree, other.degree))

    def __neg__(self) -> SymFunc:
        return SymFunc({lam: -c for lam, c in self.terms.items()}, self.degree)

    def __sub__(self, other: SymFunc) -> SymFunc:
        return self + (-other)

    def __mul__(self, other: SymFunc | Fraction | int) -> SymFunc:
        if isinstance(other, (int, Fraction)):
            return SymFunc({lam: c * other for lam, c in self.terms.items()}, self.degree)
        if not isinstance(other, SymFunc):
            return NotImplemented
        degree = min(self.degree, other.degree)
        out: defaultdict[Partition, Fraction] = defaultdict(Fraction)
        for lam, c in self.terms.items():
            for mu, d in other.terms.items():
                if lam.size + mu.size <= degree:
                    out[merge_parts(lam, mu)] += c * d
        return SymFunc(out, degree)

    __rmul__ = __mul__

    def __truediv__(self, other: Fraction | int) -> SymFunc:
        return self * (1 / Fraction(other))

    def __eq__(self, other: object) -> bool:
        """Equal when the stored coefficients agree, whatever the truncation orders."""
        if not isinstance(other, SymFunc):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        body = " + ".join(f"{c}*p{lam}" for lam, c in sorted(self.terms.items(), key=lambda kv: kv[0].sort_key()))
        return f"SymFunc({body or '0'}, D={self.degree})"

    def as_series(self, name: str) -> AlphabetSeries:
        """View this function as a series in the alphabet `name`."""
        return AlphabetSeries((name,), {(lam,): c for lam, c in self.terms.items()}, self.degree)

    @classmethod
    def from_series(cls, series: AlphabetSeries) -> SymFunc:
        """Convert a single-alphabet series back to a SymFunc."""
        trimmed = series.drop_trivial()
        if not trimmed.alphabets:
            return cls({EMPTY: trimmed.constant_term()}, series.degree)
        assert len(trimmed.alphabets) == 1, f"expected one alphabet, got {trimmed.alphabets}"
        return cls({key[0]: c for key, c in trimmed.terms.items()}, series.degree)


class AlphabetSeries:
    """
    A truncated polynomial in the power sums p_k(A) of several named alphabets.

    Parameters
    ----------
    alphabets : sequence of str
        Ordered alphabet names.
    terms : mapping, optional
        Map from a tuple of partitions (one per alphabet) to its coefficient.
    degree : int, optional
        Truncation order D on the total degree.
    """

    __slots__ = ("alphabets", "degree", "terms")

    def __init__(
        self,
        alphabets: Sequence[str] = (),
        terms: Mapping[Key, Fraction | int] | None = None,
        degree: int = 0,
    ) -> None:
        names = tuple(alphabets)
        assert len(set(names)) == len(names), f"duplicate alphabet names in {names}"
        assert degree >= 0, f"truncation order must be nonnegative, got {degree}"
        self.alphabets = names
        self.degree = degree
        clean: dict[Key, Fraction] = {}
        for key, c in (terms or {}).items():
            assert len(key) == len(names), f"key {key} does not match alphabets {names}"
            if c and _weight(key) <= degree:
                clean[key] = Fraction(c)
        self.terms = clean

    @classmethod
    def one(cls, alphabets: Sequence[str] = (), degree: int = 0) -> Self:
        return cls.constant(1, alphabets, degree)

    @classmethod
    def constant(cls, value: Fraction | int, alphabets: Sequence[str] = (), degree: int = 0) -> Self:
        names = tuple(alphabets)
        return cls(names, {(EMPTY,) * len(names): value}, degree)

    @classmethod
    def power_sum(cls, name: str, k: int, degree: int) -> Self:
        return cls((name,), {(Partition.trusted((k,)),): 1}, degree)

    @classmethod
    def monomial(cls, parts: Mapping[str, Partition], coefficient: Fraction | int, degree: int) -> Self:
        """The single term coefficient * prod_A p_{parts[A]}(A)."""
        names = tuple(parts)
        return cls(names, {tuple(parts[n] for n in names): coefficient}, degree)

    def reindex(self, alphabets: Sequence[str]) -> AlphabetSeries:
        """
        Express the series over a superset of its alphabets.

        Alphabets of self that are missing from `alphabets` must be trivial in every term.
        """
        names = tuple(alphabets)
        if names == self.alphabets:
            return self
        position = {name: i for i, name in enumerate(self.alphabets)}
        dropped = [i for name, i in position.items() if name not in names]
        out: dict[Key, Fraction] = {}
        for key, c in self.terms.items():
            if any(key[i].parts for i in dropped):
                raise ValueError(f"cannot drop non-trivial alphabets from {self.alphabets} to {names}")
            out[tuple(key[position[n]] if n in position else EMPTY for n in names)] = c
        return AlphabetSeries(names, out, self.degree)

    def drop_trivial(self) -> AlphabetSeries:
        """Remove alphabets that appear in no term."""
        used = [
            name
            for i, name in enumerate(self.alphabets)
            if any(key[i].parts for key in self.terms)
        ]
        return self.reindex(used)

    def constant_term(self) -> Fraction:
        return self.terms.get((EMPTY,) * len(self.alphabets), Fraction(0))

    def coefficient(self, parts: Mapping[str, Partition]) -> Fraction:
        """Coefficient of prod_A p_{parts[A]}(A); alphabets not named contribute the empty partition."""
        for name in parts:
            if name not in self.alphabets and parts[name].parts:
                return Fraction(0)
        key = tuple(parts.get(name, EMPTY) for name in self.alphabets)
        return self.terms.get(key, Fraction(0))

    def is_zero(self) -> bool:
        return not self.terms

    def with_degree(self, degree: int) -> AlphabetSeries:
        """Truncate further; raising the order is not allowed."""
        assert degree <= self.degree, f"cannot raise truncation order {self.degree} to {degree}"
        return AlphabetSeries(self.alphabets, self.terms, degree)

    def positive_degree_part(self) -> AlphabetSeries:
        return AlphabetSeries(
            self.alphabets,
            {k: c for k, c in self.terms.items() if _weight(k) > 0},
            self.degree,
        )

    def max_abs_coefficient(self) -> Fraction:
        return max((abs(c) for c in self.terms.values()), default=Fraction(0))

    def __add__(self, other: AlphabetSeries | Fraction | int) -> AlphabetSeries:
        if isinstance(other, (int, Fraction)):
            other = AlphabetSeries.constant(other, self.alphabets, self.degree)
        if not isinstance(other, AlphabetSeries):
            return NotImplemented
        names = _union(self.alphabets, other.alphabets)
        out = defaultdict(Fraction, self.reindex(names).terms)
        for key, c in other.reindex(names).terms.items():
            out[key] += c
        return AlphabetSeries(names, out, min(self.degree, other.degree))

    __radd__ = __add__

    def __neg__(self) -> AlphabetSeries:
        return AlphabetSeries(self.alphabets, {k: -c for k, c in self.terms.items()}, self.degree)

    def __sub__(self, other: AlphabetSeries | Fraction | int) -> AlphabetSeries:
        return self + (-other)

    def __rsub__(self, other: Fraction | int) -> AlphabetSeries:
        return (-self) + other

    def __mul__(self, other: AlphabetSeries | Fraction | int) -> AlphabetSeries:
        if isinstance(other, (int, Fraction)):
            return AlphabetSeries(self.alphabets, {k: c * other for k, c in self.terms.items()}, self.degree)
        if not isinstance(other, AlphabetSeries):
            return NotImplemented
        names = _union(self.alphabets, other.alphabets)
        degree = min(self.degree, other.degree)
        left = self.reindex(names).terms
        grouped: defaultdict[int, list[tuple[Key, Fraction]]] = defaultdict(list)
        for key, c in other.reindex(names).terms.items():
            grouped[_weight(key)].append((key, c))
        out: defaultdict[Key, Fraction] = defaultdict(Fraction)
        for lkey, lc in left.items():
            budget = degree - _weight(lkey)
            for w in range(budget + 1):
                for rkey, rc in grouped.get(w, ()):
                    out[tuple(map(merge_parts, lkey, rkey))] += lc * rc
        return AlphabetSeries(names, out, degree)

    __rmul__ = __mul__

    def __truediv__(self, other: Fraction | int) -> AlphabetSeries:
        return self * (1 / Fraction(other))

    def __eq__(self, other: object) -> bool:
        """Equal when the difference has no nonzero coefficient."""
        if isinstance(other, (int, Fraction)):
            other = AlphabetSeries.constant(other, self.alphabets, self.degree)
        if not isinstance(other, AlphabetSeries):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"AlphabetSeries({self.alphabets}, {len(self.terms)} terms, D={self.degree})"

    def power(self, n: int) -> AlphabetSeries:
        assert n >= 0, f"power must be nonnegative, got {n}"
        out = AlphabetSeries.one(self.alphabets, self.degree)
        for _ in range(n):
            out = out * self
        return out

    def reciprocal(self) -> AlphabetSeries:
        """
        Formal inverse, as (1/c0) sum_n h^n with self = c0 (1 - h).

        Raises
        ------
        ZeroDivisionError
            If the constant term vanishes.
        """
        c0 = self.constant_term()
        if c0 == 0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        h = 1 - self / c0
        out = AlphabetSeries.one(self.alphabets, self.degree)
        power = out
        while True:
            power = power * h
            if power.is_zero():
                break
            out = out + power
        return out / c0

    def exp(self) -> AlphabetSeries:
        """Formal exponential of a series without constant term."""
        assert self.constant_term() == 0, "exp needs a series without constant term"
        out = AlphabetSeries.one(self.alphabets, self.degree)
        power = out
        n = 0
        while True:
            n += 1
            power = power * self / n
            if power.is_zero():
                break
            out = out + power
        return out

    def scale_alphabet(self, name: str, c: Fraction | int) -> AlphabetSeries:
        """Substitute p_k(A) -> c^k p_k(A) for A = name."""
        if name not in self.alphabets:
            return self
        i = self.alphabets.index(name)
        c = Fraction(c)
        return AlphabetSeries(
            self.alphabets,
            {key: coef * c ** key[i].size for key, coef in self.terms.items()},
            self.degree,
        )

    def rename(self, mapping: Mapping[str, str]) -> AlphabetSeries:
        """
        Rename alphabets. Two alphabets renamed to the same name are identified.
        """
        targets = tuple(mapping.get(name, name) for name in self.alphabets)
        names = tuple(dict.fromkeys(targets))
        slot = [names.index(target) for target in targets]
        out: defaultdict[Key, Fraction] = defaultdict(Fraction)
        for key, c in self.terms.items():
            merged = [EMPTY] * len(names)
            for lam, j in zip(key, slot, strict=True):
                merged[j] = merge_parts(merged[j], lam)
            out[tuple(merged)] += c
        return AlphabetSeries(names, out, self.degree)

    def split_alphabet(self, name: str, into: tuple[str, str]) -> AlphabetSeries:
        """
        Substitute p_k(A) -> p_k(X) + p_k(Y), i.e. read A as the union of X and Y.

        Parameters
        ----------
        name : str
            Alphabet to split.
        into : tuple of str
            The two new alphabet names; neither may already be present.
        """
        first, second = into
        assert first not in self.alphabets and second not in self.alphabets, (
            f"split targets {into} collide with {self.alphabets}"
        )
        if name not in self.alphabets:
            return self.reindex((*self.alphabets, first, second))
        i = self.alphabets.index(name)
        names = (*self.alphabets[:i], first, second, *self.alphabets[i + 1 :])
        out: defaultdict[Key, Fraction] = defaultdict(Fraction)
        for key, c in self.terms.items():
            for alpha, beta, mult in _split_partition(key[i]):
                out[(*key[:i], alpha, beta, *key[i + 1 :])] += c * mult
        return AlphabetSeries(names, out, self.degree)

    def project(self, name: str, lam: Partition) -> AlphabetSeries:
        """The coefficient of p_lam(name), as a series in the remaining alphabets."""
        if name not in self.alphabets:
            return self if not lam.parts else AlphabetSeries(self.alphabets, {}, self.degree)
        i = self.alphabets.index(name)
        names = self.alphabets[:i] + self.alphabets[i + 1 :]
        return AlphabetSeries(
            names,
            {key[:i] + key[i + 1 :]: c for key, c in self.terms.items() if key[i] == lam},
            self.degree,
        )

    def homogeneous(self, d: int) -> AlphabetSeries:
        return AlphabetSeries(
            self.alphabets, {k: c for k, c in self.terms.items() if _weight(k) == d}, self.degree
        )


@functools.cache
def _split_partition(lam: Partition) -> tuple[tuple[Partition, Partition, int], ...]:
    """All ways of sending the parts of lam to two alphabets, with binomial multiplicities."""
    choices = []
    for part, mult in sorted(lam.multiplicities().items(), reverse=True):
        choices.append([(part, j, mult - j, math.comb(mult, j)) for j in range(mult + 1)])
    out = []
    for combo in itertools.product(*choices):
        left: list[int] = []
        right: list[int] = []
        weight = 1
        for part, j, rest, binom in combo:
            left.extend([part] * j)
            right.extend([part] * rest)
            weight *= binom
        out.append((Partition.trusted(tuple(left)), Partition.trusted(tuple(right)), weight))
    return tuple(out)


def tensor(f: SymFunc, f_name: str, g: SymFunc, g_name: str, degree: int | None = None) -> AlphabetSeries:
    """
    The product f(X) g(Y) over two distinct alphabets.

    Parameters
    ----------
    f, g : SymFunc
        Factors.
    f_name, g_name : str
        Their alphabets.
    degree : int, optional
        Truncation order, by default the smaller of the two.

    Returns
    -------
    AlphabetSeries
        Series over (f_name, g_name).
    """
    assert f_name != g_name, "tensor needs distinct alphabets"
    degree = min(f.degree, g.degree) if degree is None else degree
    terms = {
        (lam, mu): c * d
        for lam, c in f.terms.items()
        for mu, d in g.terms.items()
        if lam.size + mu.size <= degree
    }
    return AlphabetSeries((f_name, g_name), terms, degree)


def coproduct(f: SymFunc, alphabets: tuple[str, str] = ("X", "Y")) -> AlphabetSeries:
    """
    The image of f under p_k -> p_k(X) + p_k(Y).

    Parameters
    ----------
    f : SymFunc
        Function to split.
    alphabets : tuple of str, optional
        The names X and Y.

    Returns
    -------
    AlphabetSeries
        Series over the two alphabets, truncated at f's order.
    """
    out: defaultdict[Key, Fraction] = defaultdict(Fraction)
    for lam, c in f.terms.items():
        for alpha, beta, mult in _split_partition(lam):
            out[(alpha, beta)] += c * mult
    return AlphabetSeries(alphabets, out, f.degree)


def macdonald_pair(f: SymFunc, g: SymFunc, params: Params) -> Fraction:
    """
    The Macdonald scalar product, with <p_lambda, p_mu> = delta z_factor(lambda).

    Parameters
    ----------
    f, g : SymFunc
        Arguments.
    params : Params
        Macdonald parameters.

    Returns
    -------
    Fraction
        The pairing.
    """
    small, large = (f, g) if len(f.terms) <= len(g.terms) else (g, f)
    return sum(
        (c * large.terms[lam] * z_factor(lam, params) for lam, c in small.terms.items() if lam in large.terms),
        Fraction(0),
    )


def _pair_vectors(f: Mapping[Partition, Fraction], g: Mapping[Partition, Fraction], q: Fraction, t: Fraction) -> Fraction:
    return sum((c * g[lam] * power_sum_norm(lam, q, t) for lam, c in f.items() if lam in g), Fraction(0))


@functools.cache
def _assignment_count(parts: tuple[int, ...], capacities: tuple[int, ...]) -> int:
    """Number of maps from the parts to the capacity rows filling every row exactly."""
    if not parts:
        return int(all(c == 0 for c in capacities))
    first, rest = parts[0], parts[1:]
    total = 0
    for i, c in enumerate(capacities):
        if c >= first:
            reduced = tuple(sorted(capacities[:i] + (c - first,) + capacities[i + 1 :]))
            total += _assignment_count(rest, reduced)
    return total


def _to_fraction(value: sympy.Expr) -> Fraction:
    rational = sympy.Rational(value)
    return Fraction(int(rational.p), int(rational.q))


@dataclass(frozen=True, slots=True)
class MonomialTable:
    """
    Transition matrices between monomial and power-sum bases in one degree.

    Attributes
    ----------
    degree : int
        The degree d.
    partitions : tuple of Partition
        Partitions of d in increasing lexicographic order, a linear extension of dominance.
    p_to_m : tuple of tuple of Fraction
        Row lambda expresses p_lambda in the monomial basis.
    m_to_p : tuple of tuple of Fraction
        Row lambda expresses m_lambda in the power-sum basis.
    """

    degree: int
    partitions: tuple[Partition, ...]
    p_to_m: tuple[tuple[Fraction, ...], ...]
    m_to_p: tuple[tuple[Fraction, ...], ...]

    def index(self, lam: Partition) -> int:
        return self.partitions.index(lam)

    def monomial_in_power_sums(self, lam: Partition) -> dict[Partition, Fraction]:
        row = self.m_to_p[self.index(lam)]
        return {mu: c for mu, c in zip(self.partitions, row, strict=True) if c}

    def power_sum_in_monomials(self, lam: Partition) -> dict[Partition, Fraction]:
        row = self.p_to_m[self.index(lam)]
        return {mu: c for mu, c in zip(self.partitions, row, strict=True) if c}

    def to_monomial_basis(self, f: SymFunc) -> dict[Partition, Fraction]:
        """Coordinates of the degree-d part of f in the monomial basis."""
        out: defaultdict[Partition, Fraction] = defaultdict(Fraction)
        for lam, c in f.terms.items():
            if lam.size == self.degree:
                for mu, d in self.power_sum_in_monomials(lam).items():
                    out[mu] += c * d
        return {mu: c for mu, c in out.items() if c}


@functools.cache
def monomial_table(degree: int) -> MonomialTable:
    """
    Build (and cache) the monomial/power-sum transition table for one degree.

    Parameters
    ----------
    degree : int
        Nonnegative degree.

    Returns
    -------
    MonomialTable
        The table; its two matrices are mutual inverses.
    """
    partitions = tuple(sorted(partitions_of_size(degree), key=lambda lam: lam.parts))
    p_to_m = tuple(
        tuple(Fraction(_assignment_count(lam.parts, tuple(sorted(mu.parts)))) for mu in partitions)
        for lam in partitions
    )
    matrix = sympy.Matrix([[sympy.Rational(c.numerator, c.denominator) for c in row] for row in p_to_m])
    inverse = matrix.inv()
    m_to_p = tuple(
        tuple(_to_fraction(inverse[i, j]) for j in range(len(partitions))) for i in range(len(partitions))
    )
    logger.debug("built monomial table for degree %d (%d partitions)", degree, len(partitions))
    return MonomialTable(degree, partitions, p_to_m, m_to_p)


@functools.cache
def _gram_schmidt(
    degree: int, q: Fraction, t: Fraction
) -> tuple[dict[Partition, dict[Partition, Fraction]], dict[Partition, Fraction]]:
    table = monomial_table(degree)
    vectors: dict[Partition, dict[Partition, Fraction]] = {}
    norms: dict[Partition, Fraction] = {}
    for lam in table.partitions:
        m_lam = table.monomial_in_power_sums(lam)
        vec: defaultdict[Partition, Fraction] = defaultdict(Fraction, m_lam)
        for mu in vectors:
            projection = _pair_vectors(m_lam, vectors[mu], q, t) / norms[mu]
            if projection:
                for nu, c in vectors[mu].items():
                    vec[nu] -= projection * c
        clean = {nu: c for nu, c in vec.items() if c}
        norm = _pair_vectors(clean, clean, q, t)
        if norm == 0:
            raise ParameterDegeneracyError(f"Gram-Schmidt pivot for {lam} vanishes at q={q}, t={t}")
        vectors[lam] = clean
        norms[lam] = norm
    return vectors, norms


def gram_schmidt_basis(degree: int, q: Fraction, t: Fraction) -> dict[Partition, SymFunc]:
    """
    Macdonald P functions of one degree for arbitrary rational (q, t).

    Unlike `macdonald_P` this accepts parameters outside (0, 1), e.g. (1/q, 1/t).

    Parameters
    ----------
    degree : int
        The degree.
    q, t : Fraction
        Parameters; only nonvanishing denominators are required.

    Returns
    -------
    dict
        Map from partition to P_lambda.

    Raises
    ------
    ParameterDegeneracyError
        If a pivot or a denominator 1 - t^k vanishes.
    """
    vectors, _ = _gram_schmidt(degree, Fraction(q), Fraction(t))
    return {lam: SymFunc(vec, degree) for lam, vec in vectors.items()}


def macdonald_norm(lam: Partition, params: Params) -> Fraction:
    """<P_lambda, P_lambda>."""
    _, norms = _gram_schmidt(lam.size, params.q, params.t)
    return norms[lam]


def macdonald_P(lam: Partition, params: Params, degree: int) -> SymFunc:
    """
    The Macdonald function P_lambda in the power-sum basis.

    Parameters
    ----------
    lam : Partition
        Index, with |lam| <= degree.
    params : Params
        Macdonald parameters.
    degree : int
        Truncation order of the returned SymFunc.

    Returns
    -------
    SymFunc
        P_lambda, homogeneous of degree |lam|.
    """
    assert lam.size <= degree, f"|{lam}| exceeds truncation order {degree}"
    vectors, _ = _gram_schmidt(lam.size, params.q, params.t)
    return SymFunc(vectors[lam], degree)


def macdonald_Q(lam: Partition, params: Params, degree: int) -> SymFunc:
    """The dual function Q_lambda = P_lambda / <P_lambda, P_lambda>."""
    return macdonald_P(lam, params, degree) / macdonald_norm(lam, params)


@functools.cache
def _skew(lam: Partition, mu: Partition, q: Fraction, t: Fraction, dual: bool) -> tuple[tuple[Partition, Fraction], ...]:
    if mu.size > lam.size:
        return ()
    vectors, norms = _gram_schmidt(lam.size, q, t)
    top = vectors[lam]
    scale_top = 1 / norms[lam] if dual else Fraction(1)
    lower_vectors, lower_norms = _gram_schmidt(mu.size, q, t)
    bottom = lower_vectors[mu]
    # skew P pairs with Q_mu, skew Q with P_mu
    scale_bottom = Fraction(1) if dual else 1 / lower_norms[mu]
    out: defaultdict[Partition, Fraction] = defaultdict(Fraction)
    for nu, c in top.items():
        for alpha, beta, mult in _split_partition(nu):
            if beta in bottom:
                out[alpha] += c * mult * bottom[beta] * power_sum_norm(beta, q, t)
    factor = scale_top * scale_bottom
    return tuple((alpha, c * factor) for alpha, c in out.items() if c)


def skew_P(lam: Partition, mu: Partition, params: Params, degree: int) -> SymFunc:
    """
    The skew function P_{lambda/mu}(X) = <P_lambda(X, Y), Q_mu(Y)>_Y.

    Parameters
    ----------
    lam, mu : Partition
        Outer and inner shapes.
    params : Params
        Macdonald parameters.
    degree : int
        Truncation order.

    Returns
    -------
    SymFunc
        Homogeneous of degree |lam| - |mu|; zero unless mu is contained in lam.
    """
    return SymFunc(dict(_skew(lam, mu, params.q, params.t, False)), degree)


def skew_Q(lam: Partition, mu: Partition, params: Params, degree: int) -> SymFunc:
    """The skew function Q_{lambda/mu}(X) = <Q_lambda(X, Y), P_mu(Y)>_Y."""
    return SymFunc(dict(_skew(lam, mu, params.q, params.t, True)), degree)


def kernel_coefficient(kind: KernelKind, k: int, params: Params) -> Fraction:
    """
    The coefficient c_k in log K = sum_k c_k p_k(X) p_k(Y) / k.

    Parameters
    ----------
    kind : {"Pi", "Pi_inverse", "H", "H_inverse", "W"}
        Kernel name.
    k : int
        Power-sum index.
    params : Params
        Macdonald parameters.

    Returns
    -------
    Fraction
        (1-t^k)/(1-q^k) for Pi, 1-t^k for H, (1-t^k)(1-q^k) for W, negated for inverses.
    """
    q, t = params.q, params.t
    if kind in ("Pi", "Pi_inverse"):
        c = (1 - t**k) / (1 - q**k)
    elif kind in ("H", "H_inverse"):
        c = 1 - t**k
    elif kind == "W":
        c = (1 - t**k) * (1 - q**k)
    else:
        raise ValueError(f"unknown kernel kind {kind!r}")
    return -c if kind.endswith("_inverse") else c


def _kernel_weight(kind: KernelKind, lam: Partition, params: Params) -> Fraction:
    out = Fraction(1, z_lambda(lam))
    for part in lam.parts:
        out *= kernel_coefficient(kind, part, params)
    return out


def kernel_series(kind: KernelKind, alphabets: tuple[str, str], params: Params, degree: int) -> AlphabetSeries:
    """
    The kernel exp(sum_k c_k p_k(X) p_k(Y) / k), truncated at total degree D.

    Expanded in closed form as sum_lambda (prod_i c_{lambda_i}) / z_lambda p_lambda(X) p_lambda(Y).

    Parameters
    ----------
    kind : {"Pi", "Pi_inverse", "H", "H_inverse", "W"}
        Kernel name, see `kernel_coefficient`.
    alphabets : tuple of str
        The alphabets X and Y.
    params : Params
        Macdonald parameters.
    degree : int
        Truncation order.

    Returns
    -------
    AlphabetSeries
        The truncated kernel.
    """
    terms = {(lam, lam): _kernel_weight(kind, lam, params) for lam in enumerate_partitions(degree // 2)}
    return AlphabetSeries(alphabets, terms, degree)


def kernel_in_variable(kind: KernelKind, alphabet: str, params: Params, degree: int) -> list[AlphabetSeries]:
    """
    Coefficients g_n of K(u; X) = sum_n u^n g_n(X) where u is a single variable.

    Parameters
    ----------
    kind : {"Pi", "Pi_inverse", "H", "H_inverse", "W"}
        Kernel name.
    alphabet : str
        The alphabet X.
    params : Params
        Macdonald parameters.
    degree : int
        Largest n, also the truncation order of each g_n.

    Returns
    -------
    list of AlphabetSeries
        g_0, ..., g_degree.
    """
    return [
        AlphabetSeries(
            (alphabet,),
            {(lam,): _kernel_weight(kind, lam, params) for lam in partitions_of_size(n)},
            degree,
        )
        for n in range(degree + 1)
    ]


def cauchy_sum(params: Params, degree: int, alphabets: tuple[str, str] = ("X", "Y")) -> AlphabetSeries:
    """The Cauchy sum sum_{|lambda| <= D/2} P_lambda(X) Q_lambda(Y)."""
    out = AlphabetSeries.constant(0, alphabets, degree)
    for lam in enumerate_partitions(degree // 2):
        out = out + tensor(
            macdonald_P(lam, params, degree), alphabets[0], macdonald_Q(lam, params, degree), alphabets[1], degree
        )
    return out


@dataclass(frozen=True, slots=True)
class TruncatedExponential:
    """
    A series exp(sum_k a_k p_k(Y) / k) kept in factored form.

    Attributes
    ----------
    alphabet : str
        The alphabet Y carrying the power sums.
    weights : mapping of int to AlphabetSeries
        The coefficients a_k, series in other alphabets.
    degree : int
        Truncation order.
    """

    alphabet: str
    weights: Mapping[int, AlphabetSeries] = field(default_factory=dict)
    degree: int = 0

    def exponent(self) -> AlphabetSeries:
        out = AlphabetSeries.constant(0, (self.alphabet,), self.degree)
        for k, a_k in sorted(self.weights.items()):
            out = out + a_k.with_degree(min(a_k.degree, self.degree)) * AlphabetSeries.power_sum(
                self.alphabet, k, self.degree
            ) / k
        return out

    def expand(self) -> AlphabetSeries:
        return self.exponent().exp()


def pair_exponentials(f: TruncatedExponential, g: TruncatedExponential, params: Params) -> AlphabetSeries:
    """
    Closed-form pairing of two exponentials in the same alphabet.

    <exp sum a_k p_k / k, exp sum b_k p_k / k> = exp sum (1-q^k)/(1-t^k) a_k b_k / k.
    """
    assert f.alphabet == g.alphabet, f"alphabets differ: {f.alphabet} vs {g.alphabet}"
    degree = min(f.degree, g.degree)
    out = AlphabetSeries.constant(0, (), degree)
    for k in sorted(set(f.weights) & set(g.weights)):
        ratio = (1 - params.q**k) / (1 - params.t**k)
        out = out + f.weights[k] * g.weights[k] * (ratio / k)
    return out.with_degree(min(out.degree, degree)).exp()


def alphabet_pair(
    f: AlphabetSeries | TruncatedExponential,
    g: AlphabetSeries | TruncatedExponential,
    over: str,
    params: Params,
) -> AlphabetSeries:
    """
    The Macdonald pairing over one shared alphabet.

    Two `TruncatedExponential` arguments take the closed-form path; anything else is
    expanded and paired term by term.

    Parameters
    ----------
    f, g : AlphabetSeries or TruncatedExponential
        Arguments; both must contain `over`.
    over : str
        The alphabet paired away.
    params : Params
        Macdonald parameters.

    Returns
    -------
    AlphabetSeries
        Series over the remaining alphabets of f followed by those of g.

    Raises
    ------
    ValueError
        If `over` is missing from an argument.
    """
    if isinstance(f, TruncatedExponential) and isinstance(g, TruncatedExponential):
        if f.alphabet != over or g.alphabet != over:
            raise ValueError(f"alphabet {over!r} is not the exponential alphabet")
        return pair_exponentials(f, g, params)
    left = f.expand() if isinstance(f, TruncatedExponential) else f
    right = g.expand() if isinstance(g, TruncatedExponential) else g
    if over not in left.alphabets or over not in right.alphabets:
        raise ValueError(f"alphabet {over!r} missing from {left.alphabets} or {right.alphabets}")
    i = left.alphabets.index(over)
    j = right.alphabets.index(over)
    left_rest = left.alphabets[:i] + left.alphabets[i + 1 :]
    right_rest = right.alphabets[:j] + right.alphabets[j + 1 :]
    names = _union(left_rest, right_rest)
    slot_left = [names.index(n) for n in left_rest]
    slot_right = [names.index(n) for n in right_rest]
    by_shape: defaultdict[Partition, list[tuple[Key, Fraction]]] = defaultdict(list)
    for key, c in right.terms.items():
        by_shape[key[j]].append((key[:j] + key[j + 1 :], c))
    degree = min(left.degree, right.degree)
    out: defaultdict[Key, Fraction] = defaultdict(Fraction)
    for key, c in left.terms.items():
        lam = key[i]
        partners = by_shape.get(lam)
        if not partners:
            continue
        weight = c * z_factor(lam, params)
        rest = key[:i] + key[i + 1 :]
        for other_rest, d in partners:
            merged = [EMPTY] * len(names)
            for part, s in zip(rest, slot_left, strict=True):
                merged[s] = part
            for part, s in zip(other_rest, slot_right, strict=True):
                merged[s] = merge_parts(merged[s], part)
            out[tuple(merged)] += weight * d
    return AlphabetSeries(names, out, degree)


class RhoConfig(TypedDict, total=False):
    """Serialized form of `SpecializationRho`."""

    kind: str
    b: list[str]
    gamma: str
    R: str


RhoKind = Literal["finite", "plancherel", "zero"]


@dataclass(frozen=True, slots=True)
class SpecializationRho:
    """
    A specialization of symmetric functions, fixed by its power-sum values.

    Attributes
    ----------
    kind : {"finite", "plancherel", "zero"}
        Finite alphabet b, Plancherel p_1 = gamma, or the zero specialization.
    b : tuple of Fraction
        Alphabet for the finite kind.
    gamma : Fraction
        Plancherel parameter.
    radius : Fraction or None
        Certified radius R with |p_k| <= R^k; derived when omitted.
    """

    kind: RhoKind
    b: tuple[Fraction, ...] = ()
    gamma: Fraction = Fraction(0)
    radius: Fraction | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "b", tuple(Fraction(x) for x in self.b))
        object.__setattr__(self, "gamma", Fraction(self.gamma))
        if self.kind not in ("finite", "plancherel", "zero"):
            raise ValueError(f"unknown specialization kind {self.kind!r}")
        if self.radius is None:
            if self.kind == "finite":
                derived = sum((abs(x) for x in self.b), Fraction(0))
            elif self.kind == "plancherel":
                derived = abs(self.gamma)
            else:
                derived = Fraction(0)
            object.__setattr__(self, "radius", derived)
        radius = Fraction(self.radius)  # type: ignore[arg-type]
        object.__setattr__(self, "radius", radius)
        floor = max((abs(x) for x in self.b), default=Fraction(0)) if self.kind == "finite" else abs(self.gamma)
        if radius < floor:
            raise RadiusViolationError("R", f"radius {radius} is below |p_1| bound {floor}")
        if radius >= 1:
            raise RadiusViolationError("R", f"radius {radius} must be below 1")

    @classmethod
    def finite(cls, b: Iterable[Fraction | int], radius: Fraction | None = None) -> Self:
        return cls("finite", tuple(Fraction(x) for x in b), Fraction(0), radius)

    @classmethod
    def plancherel(cls, gamma: Fraction | int, radius: Fraction | None = None) -> Self:
        return cls("plancherel", (), Fraction(gamma), radius)

    @classmethod
    def zero(cls) -> Self:
        return cls("zero")

    @property
    def is_exact(self) -> bool:
        """Whether ratios of Pi(x; rho) are rational."""
        return self.kind != "plancherel"

    def power_sum(self, k: int) -> Fraction:
        assert k >= 1, f"power sums start at k = 1, got {k}"
        if self.kind == "finite":
            return sum((x**k for x in self.b), Fraction(0))
        if self.kind == "plancherel":
            return self.gamma if k == 1 else Fraction(0)
        return Fraction(0)

    def shift_ratio(self, x: object, params: Params) -> object:
        """
        Pi(q x; rho) / Pi(x; rho) for a single variable x.

        Exact for finite and zero kinds; the Plancherel kind returns a complex value.

        Raises
        ------
        PoleCollisionError
            If 1 - t x b vanishes.
        """
        if self.kind == "zero":
            return 1
        if self.kind == "plancherel":
            return complex(np.exp(-(1 - float(params.t)) * float(self.gamma) * complex(x)))  # type: ignore[arg-type]
        out: object = 1
        for b in self.b:
            denominator = 1 - params.t * x * b  # type: ignore[operator]
            if denominator == 0:
                raise PoleCollisionError(f"1 - t x b vanishes at x = {x}, b = {b}")
            out = out * (1 - x * b) / denominator  # type: ignore[operator]
        return out

    def get_config(self) -> RhoConfig:
        config: RhoConfig = {"kind": self.kind, "R": str(self.radius)}
        if self.kind == "finite":
            config["b"] = [str(x) for x in self.b]
        elif self.kind == "plancherel":
            config["gamma"] = str(self.gamma)
        return config

    @classmethod
    def from_config(cls, config: RhoConfig) -> Self:
        kind = config.get("kind", "zero")
        radius = parse_scalar(config["R"]) if "R" in config else None
        if kind == "finite":
            return cls.finite([parse_scalar(x) for x in config.get("b", [])], radius)
        if kind == "plancherel":
            return cls.plancherel(parse_scalar(config.get("gamma", "0")), radius)
        if kind == "zero":
            return cls.zero()
        raise ValueError(f"unknown specialization kind {kind!r}")


def specialize(series: AlphabetSeries, alphabet: str, rho: SpecializationRho) -> AlphabetSeries:
    """
    Substitute p_k(alphabet) -> rho(p_k) and remove the alphabet.

    Parameters
    ----------
    series : AlphabetSeries
        Series to specialize.
    alphabet : str
        Alphabet to remove.
    rho : SpecializationRho
        Specialization supplying the power sums.

    Returns
    -------
    AlphabetSeries
        Series over the remaining alphabets.
    """
    if alphabet not in series.alphabets:
        return series
    i = series.alphabets.index(alphabet)
    names = series.alphabets[:i] + series.alphabets[i + 1 :]
    values: dict[int, Fraction] = {}
    out: defaultdict[Key, Fraction] = defaultdict(Fraction)
    for key, c in series.terms.items():
        value = c
        for part in key[i].parts:
            if part not in values:
                values[part] = rho.power_sum(part)
            value *= values[part]
            if not value:
                break
        if value:
            out[key[:i] + key[i + 1 :]] += value
    return AlphabetSeries(names, out, series.degree)


def evaluate(f: SymFunc, point: Sequence[Fraction | int]) -> Fraction:
    """
    Evaluate f at finitely many variables, p_k -> sum_i x_i^k.

    Parameters
    ----------
    f : SymFunc
        Function to evaluate.
    point : sequence of Fraction
        The variables x_1, ..., x_n.

    Returns
    -------
    Fraction
        The value.
    """
    xs = [Fraction(x) for x in point]
    sums: dict[int, Fraction] = {}
    total = Fraction(0)
    for lam, c in f.terms.items():
        value = c
        for part in lam.parts:
            if part not in sums:
                sums[part] = sum((x**part for x in xs), Fraction(0))
            value *= sums[part]
        total += value
    return total


def restrict_to_vars(f: SymFunc, n: int) -> sympy.Poly:
    """
    The symmetric polynomial obtained from f in n variables.

    Parameters
    ----------
    f : SymFunc
        Function to restrict.
    n : int
        Number of variables, at least 1.

    Returns
    -------
    sympy.Poly
        Exact polynomial in x1, ..., xn over QQ.
    """
    assert n >= 1, f"need at least one variable, got {n}"
    xs = sympy.symbols(f"x1:{n + 1}")
    power_sums = {}
    expr = sympy.Integer(0)
    for lam, c in f.terms.items():
        term: sympy.Expr = sympy.Rational(c.numerator, c.denominator)
        for part in lam.parts:
            if part not in power_sums:
                power_sums[part] = sum(x**part for x in xs)
            term = term * power_sums[part]
        expr += term
    return sympy.Poly(sympy.expand(expr), *xs, domain="QQ")


def format_polynomial(poly: sympy.Poly) -> str:
    """Print a polynomial with its monomials in lexicographic order."""
    return sympy.sstr(poly.as_expr(), order="lex")


def schur_jacobi_trudi(lam: Partition, degree: int) -> SymFunc:
    """
    The Schur function s_lambda = det[h_{lambda_i - i + j}] in the power-sum basis.

    An independent oracle for P_lambda at q = t.

    Parameters
    ----------
    lam : Partition
        Index.
    degree : int
        Truncation order.

    Returns
    -------
    SymFunc
        s_lambda.
    """
    if not lam.parts:
        return SymFunc.one(degree)
    size = lam.size
    p = sympy.symbols(f"p1:{size + 1}")

    def h(k: int) -> sympy.Expr:
        if k < 0:
            return sympy.Integer(0)
        total: sympy.Expr = sympy.Integer(0)
        for mu in partitions_of_size(k):
            term: sympy.Expr = sympy.Rational(1, z_lambda(mu))
            for part in mu.parts:
                term = term * p[part - 1]
            total += term
        return total

    ell = lam.length
    matrix = sympy.Matrix(ell, ell, lambda i, j: h(lam.parts[i] - i + j))
    det = sympy.Poly(sympy.expand(matrix.det(method="berkowitz")), *p, domain="QQ")
    terms: dict[Partition, Fraction] = {}
    for exponents, coeff in det.terms():
        parts = tuple(k + 1 for k in reversed(range(size)) for _ in range(exponents[k]))
        terms[Partition.trusted(parts)] = _to_fraction(coeff)
    return SymFunc(terms, degree)


def generic_evaluator(f: SymFunc) -> Callable[[Sequence[object]], object]:
    """
    Return x -> f(x) for generic arithmetic (Fraction or complex) points.
    """

    def evaluate_generic(point: Sequence[object]) -> object:
        sums: dict[int, object] = {}
        total: object = 0
        for lam, c in f.terms.items():
            value: object = c
            for part in lam.parts:
                if part not in sums:
                    sums[part] = sum(x**part for x in point)  # type: ignore[operator]
                value = value * sums[part]  # type: ignore[operator]
            total = total + value  # type: ignore[operator]
        return total

    return evaluate_generic
