"""
Formal Macdonald measures and processes.

The weight of a sequence lambda^1, ..., lambda^N is an `AlphabetSeries` in the
alphabets A^1..A^N, B^1..B^N:

    P_{lambda^1}(A^1) prod_k Psi_{lambda^k, lambda^{k-1}}(A^k; B^{k-1}) Q_{lambda^N}(B^N)
    / prod_{alpha <= beta} Pi(A^alpha; B^beta)

Every weight of total degree <= D comes from sequences with max |lambda^k| <= D // 2,
which makes all sums over sequences finite.
"""

from __future__ import annotations

import functools
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Literal, TypedDict

from maclab.core import Params, Partition, elementary_symmetric, enumerate_partitions
from maclab.errors import ConfigError
from maclab.symfunc import (
    AlphabetSeries,
    SpecializationRho,
    alphabet_pair,
    coproduct,
    kernel_series,
    macdonald_P,
    macdonald_Q,
    skew_P,
    skew_Q,
    specialize,
    tensor,
)

if TYPE_CHECKING:
    from collections.abc import Iterator, Sequence
    from typing import Self

__all__ = [
    "ObservableEntry",
    "ObservablePlan",
    "ProcessSpec",
    "constant_term_projection",
    "drop_level",
    "expectation_lhs",
    "merge_levels",
    "merged_weight",
    "mm_weight",
    "mp_numerator",
    "mp_weight",
    "mp_weight_via_pairing",
    "observable_O",
    "observable_O_finite",
    "observable_Ohat1",
    "psi",
    "psi_via_pairing",
]

logger = logging.getLogger(__name__)

Sequence_ = tuple[Partition, ...]


class ProcessSpecConfig(TypedDict):
    """Serialized form of `ProcessSpec`."""

    N: int
    D: int
    q: str
    t: str


@dataclass(frozen=True, slots=True)
class ProcessSpec:
    """
    Shape of a formal Macdonald process.

    Attributes
    ----------
    N : int
        Number of levels.
    params : Params
        Macdonald parameters.
    degree : int
        Truncation order D.
    a_names, b_names : tuple of str
        Alphabet names, A1..AN and B1..BN when left empty.
    """

    N: int
    params: Params
    degree: int
    a_names: tuple[str, ...] = ()
    b_names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        assert self.N >= 1, f"a process needs at least one level, got N={self.N}"
        assert self.degree >= 0, f"truncation order must be nonnegative, got {self.degree}"
        if not self.a_names:
            object.__setattr__(self, "a_names", tuple(f"A{i}" for i in range(1, self.N + 1)))
        if not self.b_names:
            object.__setattr__(self, "b_names", tuple(f"B{i}" for i in range(1, self.N + 1)))
        assert len(self.a_names) == self.N and len(self.b_names) == self.N, "one A and one B alphabet per level"

    @property
    def alphabets(self) -> tuple[str, ...]:
        return self.a_names + self.b_names

    @property
    def enumeration_bound(self) -> int:
        return self.degree // 2

    def sequences(self, bound: int | None = None) -> Iterator[Sequence_]:
        """Every sequence of N partitions with sizes at most `bound` (default D // 2)."""
        shapes = enumerate_partitions(self.enumeration_bound if bound is None else bound)
        return itertools.product(shapes, repeat=self.N)

    def get_config(self) -> ProcessSpecConfig:
        return {"N": self.N, "D": self.degree, **self.params.get_config()}  # type: ignore[typeddict-item]

    @classmethod
    def from_config(cls, config: ProcessSpecConfig) -> Self:
        return cls(N=config["N"], params=Params.from_config(config), degree=config["D"])  # type: ignore[arg-type]


def observable_O_finite(r: int, lam: Partition, params: Params, variables: int) -> Fraction:
    """
    e_r(q^{-lambda_1}, q^{-lambda_2} t, ..., q^{-lambda_M} t^{M-1}) with M = `variables`.

    O_r is the limit of this quantity as M grows.
    """
    assert variables >= lam.length, f"need at least {lam.length} variables, got {variables}"
    values = [params.q ** (-lam.part(i)) * params.t**i for i in range(variables)]
    return Fraction(elementary_symmetric(values, r))


def observable_O(r: int, lam: Partition, params: Params) -> Fraction:
    """
    The observable O_r(lambda).

    O_r = sum_j e_{r-j}(q^{-lambda_i} t^{i-1}, i <= l(lambda)) tau_j(l(lambda)), where
    tau_j(l) = t^{j l + j(j-1)/2} / prod_{i<=j} (1 - t^i) is e_j of t^l, t^{l+1}, ...

    Parameters
    ----------
    r : int
        Nonnegative order.
    lam : Partition
        Argument.
    params : Params
        Macdonald parameters; t > 0 is required for r >= 1.

    Returns
    -------
    Fraction
        O_r(lambda).

    Raises
    ------
    ParameterError
        If t = 0 and r >= 1.
    """
    assert r >= 0, f"r must be nonnegative, got {r}"
    if r == 0:
        return Fraction(1)
    params.require_positive_t("O_r")
    q, t = params.q, params.t
    ell = lam.length
    finite = [q ** (-part) * t**i for i, part in enumerate(lam.parts)]
    total = Fraction(0)
    for j in range(r + 1):
        tail = t ** (j * ell + j * (j - 1) // 2)
        for i in range(1, j + 1):
            tail /= 1 - t**i
        total += Fraction(elementary_symmetric(finite, r - j)) * tail
    return total


def observable_Ohat1(lam: Partition, params: Params) -> Fraction:
    """
    The observable 1 + (1 - t) sum_j (1 - q^{lambda_j}) t^{-j}.

    Raises
    ------
    ParameterError
        If t = 0.
    """
    params.require_positive_t("O_hat_1")
    q, t = params.q, params.t
    return 1 + (1 - t) * sum(
        ((1 - q**part) * t ** (-(j + 1)) for j, part in enumerate(lam.parts)), Fraction(0)
    )


ObservableKind = Literal["O", "O_hat_1"]


@dataclass(frozen=True, slots=True)
class ObservableEntry:
    """One factor O_r(lambda^level)^multiplicity (or the hatted O_hat_1) of a plan."""

    level: int
    r: int = 1
    kind: ObservableKind = "O"
    multiplicity: int = 1

    def value(self, lam: Partition, params: Params) -> Fraction:
        base = observable_Ohat1(lam, params) if self.kind == "O_hat_1" else observable_O(self.r, lam, params)
        return base**self.multiplicity


@dataclass(frozen=True, slots=True)
class ObservablePlan:
    """
    A product of single-level observables, with optional scale constants c_1..c_N.

    With scales, each sequence is also weighted by prod_i c_i^{|lambda^i|}.
    """

    entries: tuple[ObservableEntry, ...] = ()
    scales: tuple[Fraction, ...] | None = field(default=None)

    @classmethod
    def from_levels(cls, rs: Sequence[int], kind: ObservableKind = "O") -> Self:
        """One O_{r_i} per level i = 1..len(rs), skipping r_i = 0."""
        if kind == "O_hat_1":
            return cls(tuple(ObservableEntry(level=i + 1, kind=kind) for i, r in enumerate(rs) if r))
        return cls(tuple(ObservableEntry(level=i + 1, r=r) for i, r in enumerate(rs) if r))

    def validate(self, N: int) -> None:
        """
        Raises
        ------
        ConfigError
            If an entry does not fit an N-level process.
        """
        for entry in self.entries:
            if not 1 <= entry.level <= N:
                raise ConfigError("levels", f"observable level {entry.level} outside 1..{N}")
            if entry.multiplicity < 1:
                raise ConfigError("plan", f"multiplicity must be positive, got {entry.multiplicity}")
        if self.scales is not None and len(self.scales) != N:
            raise ConfigError("c", f"expected {N} scale constants, got {len(self.scales)}")

    def value(self, sequence: Sequence_, params: Params) -> Fraction:
        out = Fraction(1)
        for entry in self.entries:
            out *= entry.value(sequence[entry.level - 1], params)
        if self.scales is not None:
            for c, lam in zip(self.scales, sequence, strict=True):
                out *= Fraction(c) ** lam.size
        return out


def psi(lam: Partition, mu: Partition, a: str, b: str, params: Params, degree: int) -> AlphabetSeries:
    """
    Psi_{lambda, mu}(A; B) = sum_nu P_{lambda/nu}(A) Q_{mu/nu}(B).

    The sum runs over nu contained in both lambda and mu.

    Parameters
    ----------
    lam, mu : Partition
        Upper and lower shapes.
    a, b : str
        Alphabet names.
    params : Params
        Macdonald parameters.
    degree : int
        Truncation order.

    Returns
    -------
    AlphabetSeries
        Series over (a, b).
    """
    out = AlphabetSeries.constant(0, (a, b), degree)
    for nu in enumerate_partitions(min(lam.size, mu.size)):
        if lam.contains(nu) and mu.contains(nu):
            out = out + tensor(skew_P(lam, nu, params, degree), a, skew_Q(mu, nu, params, degree), b, degree)
    return out


def psi_via_pairing(lam: Partition, mu: Partition, a: str, b: str, params: Params, degree: int) -> AlphabetSeries:
    """Psi computed as <P_lambda(A, Y), Q_mu(Y, B)>_Y."""
    left = coproduct(macdonald_P(lam, params, degree), (a, "_Y"))
    right = coproduct(macdonald_Q(mu, params, degree), ("_Y", b))
    return alphabet_pair(left, right, "_Y", params)


def _numerator(sequence: Sequence_, spec: ProcessSpec, *, via_pairing: bool = False) -> AlphabetSeries:
    assert len(sequence) == spec.N, f"expected {spec.N} partitions, got {len(sequence)}"
    params, degree = spec.params, spec.degree
    link = psi_via_pairing if via_pairing else psi
    out = macdonald_P(sequence[0], params, degree).as_series(spec.a_names[0])
    for k in range(1, spec.N):
        out = out * link(sequence[k], sequence[k - 1], spec.a_names[k], spec.b_names[k - 1], params, degree)
    out = out * macdonald_Q(sequence[-1], params, degree).as_series(spec.b_names[-1])
    return out.reindex(spec.alphabets)


def mp_numerator(sequence: Sequence_, spec: ProcessSpec) -> AlphabetSeries:
    """The weight of a sequence before dividing by the Pi normalization."""
    return _numerator(sequence, spec)


@functools.cache
def inverse_normalization(spec: ProcessSpec) -> AlphabetSeries:
    """prod_{alpha <= beta} Pi(A^alpha; B^beta)^{-1}, truncated at D."""
    out = AlphabetSeries.one(spec.alphabets, spec.degree)
    for alpha in range(spec.N):
        for beta in range(alpha, spec.N):
            out = out * kernel_series(
                "Pi_inverse", (spec.a_names[alpha], spec.b_names[beta]), spec.params, spec.degree
            )
    return out


def mp_weight(sequence: Sequence_, spec: ProcessSpec) -> AlphabetSeries:
    """
    The formal Macdonald process weight of a sequence.

    Parameters
    ----------
    sequence : tuple of Partition
        lambda^1, ..., lambda^N.
    spec : ProcessSpec
        Process shape.

    Returns
    -------
    AlphabetSeries
        The weight, exact in degrees <= D.
    """
    return mp_numerator(sequence, spec) * inverse_normalization(spec)


def mp_weight_via_pairing(sequence: Sequence_, spec: ProcessSpec) -> AlphabetSeries:
    """The same weight, with each Psi computed through the Macdonald pairing."""
    return _numerator(sequence, spec, via_pairing=True) * inverse_normalization(spec)


def mm_weight(lam: Partition, params: Params, degree: int, alphabets: tuple[str, str] = ("X", "Y")) -> AlphabetSeries:
    """The formal Macdonald measure P_lambda(X) Q_lambda(Y) / Pi(X; Y)."""
    spec = ProcessSpec(1, params, degree, (alphabets[0],), (alphabets[1],))
    return mp_weight((lam,), spec)


def expectation_lhs(plan: ObservablePlan, spec: ProcessSpec, *, bound: int | None = None) -> AlphabetSeries:
    """
    Sum over sequences of the plan's observables times the process weight.

    Parameters
    ----------
    plan : ObservablePlan
        Observables and optional scale constants.
    spec : ProcessSpec
        Process shape.
    bound : int, optional
        Largest partition size enumerated, by default D // 2. Larger bounds give the same result.

    Returns
    -------
    AlphabetSeries
        The expectation, exact in degrees <= D.
    """
    plan.validate(spec.N)
    total = AlphabetSeries.constant(0, spec.alphabets, spec.degree)
    count = 0
    for sequence in spec.sequences(bound):
        weight = plan.value(sequence, spec.params)
        if weight:
            total = total + mp_numerator(sequence, spec) * weight
            count += 1
    logger.debug("summed %d sequences for N=%d, D=%d", count, spec.N, spec.degree)
    return total * inverse_normalization(spec)


def drop_level(spec: ProcessSpec, i: int) -> ProcessSpec:
    """The (N-1)-level shape with A^{i+1} and B^i removed."""
    assert 1 <= i < spec.N, f"level {i} outside 1..{spec.N - 1}"
    return ProcessSpec(
        spec.N - 1,
        spec.params,
        spec.degree,
        spec.a_names[:i] + spec.a_names[i + 1 :],
        spec.b_names[: i - 1] + spec.b_names[i:],
    )


def constant_term_projection(sequence: Sequence_, spec: ProcessSpec, i: int) -> AlphabetSeries:
    """
    Apply the zero specialization to A^{i+1} and B^i of a weight.

    Nonzero only when lambda^i = lambda^{i+1}; the surviving weights form the process
    described by `drop_level(spec, i)`.
    """
    assert 1 <= i < spec.N, f"level {i} outside 1..{spec.N - 1}"
    zero = SpecializationRho.zero()
    weight = mp_weight(sequence, spec)
    weight = specialize(weight, spec.a_names[i], zero)
    return specialize(weight, spec.b_names[i - 1], zero)


def _union_name(first: str, second: str) -> str:
    return f"{first}|{second}"


def merge_levels(rest: Sequence_, spec: ProcessSpec, i: int) -> AlphabetSeries:
    """
    Sum the weights over lambda^i with the other levels fixed to `rest`.

    Parameters
    ----------
    rest : tuple of Partition
        The N - 1 remaining partitions in order.
    spec : ProcessSpec
        Process shape.
    i : int
        Level summed out, 1 <= i <= N.

    Returns
    -------
    AlphabetSeries
        The marginal weight.
    """
    assert 1 <= i <= spec.N, f"level {i} outside 1..{spec.N}"
    assert len(rest) == spec.N - 1, f"expected {spec.N - 1} partitions, got {len(rest)}"
    total = AlphabetSeries.constant(0, spec.alphabets, spec.degree)
    for lam in enumerate_partitions(spec.enumeration_bound):
        total = total + mp_numerator((*rest[: i - 1], lam, *rest[i - 1 :]), spec)
    return total * inverse_normalization(spec)


def merged_weight(rest: Sequence_, spec: ProcessSpec, i: int) -> AlphabetSeries:
    """
    The (N-1)-level weight with A^i, A^{i+1} and B^{i-1}, B^i united, split back into the originals.

    For i = 1 the alphabet B^1 disappears; for i = N the alphabet A^N disappears.
    """
    assert spec.N >= 2, "merging needs at least two levels"
    a, b = spec.a_names, spec.b_names
    splits: list[tuple[str, tuple[str, str]]] = []
    if i < spec.N:
        united_a = _union_name(a[i - 1], a[i])
        a_names = (*a[: i - 1], united_a, *a[i + 1 :])
        splits.append((united_a, (a[i - 1], a[i])))
    else:
        a_names = a[:-1]
    if i > 1:
        united_b = _union_name(b[i - 2], b[i - 1])
        b_names = (*b[: i - 2], united_b, *b[i:])
        splits.append((united_b, (b[i - 2], b[i - 1])))
    else:
        b_names = b[1:]
    reduced = ProcessSpec(spec.N - 1, spec.params, spec.degree, a_names, b_names)
    weight = mp_weight(tuple(rest), reduced)
    for united, pair in splits:
        weight = weight.split_alphabet(united, pair)
    return weight
