"""
Integrands of the contour-integral identities.

Every builder returns an `Integrand`: a rational part in the contour variables, an
optional formal part (a Laurent polynomial whose coefficients are truncated
`AlphabetSeries`, coming from the H kernels), an optional formal prefactor, and the
contours with their integration order.

Formal integrands run over circles centered at the origin. Integrands of ascending
processes run over unions of small disks around the points q^k a_j, sized from the
distances between every point a pole may sit at.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import TYPE_CHECKING, Any

import numpy as np

from maclab.ascending import AscendingConfig, AscendingObservable
from maclab.contour import (
    Circle,
    ContourScheme,
    LaurentSeries,
    Location,
    RadiusConstraint,
    RationalExpr,
    ResiduePlan,
    cauchy_determinant,
    integrate_series,
    iterated_residue_integral,
)
from maclab.core import Params
from maclab.errors import ConfigError, ContourError
from maclab.process import ProcessSpec
from maclab.symfunc import AlphabetSeries, KernelKind, SpecializationRho, kernel_in_variable, kernel_series, specialize

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Mapping, Sequence

__all__ = [
    "ExponentialFactor",
    "Integrand",
    "appendix_integrand",
    "ascending_integrand",
    "block_integrand",
    "build_integrand",
    "disk_contours",
    "fredholm_ek_integrand",
    "fredholm_qt_integrand",
    "hatted_integrand",
    "multilevel_integrand",
    "q_whittaker_integrand",
    "scaled_integrand",
    "single_level_integrand",
    "specialize_all",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExponentialFactor:
    """
    The factor exp(sum_v c_v z_v), left over by Plancherel shift ratios.

    Only the numeric oracle can integrate it.
    """

    coefficients: Mapping[str, Fraction] = field(default_factory=dict)

    def __call__(self, values: Mapping[str, Any]) -> Any:
        out: Any = 1.0
        for v, c in self.coefficients.items():
            out = out * np.exp(float(c) * values[v])
        return out


@dataclass(frozen=True)
class Integrand:
    """
    A contour integrand and its contours.

    Attributes
    ----------
    rational : RationalExpr
        Rational part.
    scheme : ContourScheme
        Contours and integration order.
    series : LaurentSeries or None
        Formal part; the integral is then an AlphabetSeries.
    prefactor : AlphabetSeries or None
        Formal factor multiplying the integral.
    numeric_factor : ExponentialFactor or None
        Transcendental factor; forces the numeric path.
    description : str
        Short label for logs and reports.
    """

    rational: RationalExpr
    scheme: ContourScheme
    series: LaurentSeries | None = None
    prefactor: AlphabetSeries | None = None
    numeric_factor: ExponentialFactor | None = None
    description: str = ""

    @property
    def variables(self) -> tuple[str, ...]:
        return self.scheme.order

    @property
    def is_formal(self) -> bool:
        return self.series is not None or self.prefactor is not None

    def evaluate(self, *, plan: ResiduePlan | None = None, allow_higher_order: bool = False) -> AlphabetSeries | Fraction:
        """
        Exact value of the integral.

        Parameters
        ----------
        plan : ResiduePlan, optional
            Receives the pole classifications.
        allow_higher_order : bool, optional
            Accept non-simple poles away from the origin (scalar integrands only).

        Returns
        -------
        AlphabetSeries or Fraction
            A series for formal integrands, a scalar otherwise.

        Raises
        ------
        ConfigError
            If the integrand carries a transcendental factor.
        """
        if self.numeric_factor is not None:
            raise ConfigError("rho", "exact evaluation needs a finite or zero specialization")
        if self.series is None:
            value = iterated_residue_integral(
                self.rational, self.scheme, plan=plan, allow_higher_order=allow_higher_order
            )
            if self.prefactor is None:
                return value
            return self.prefactor * value
        total = integrate_series(self.series, self.rational, self.scheme, plan=plan)
        if self.prefactor is not None:
            total = total * self.prefactor
        logger.info("integrated %s: %d terms", self.description or "integrand", len(total.terms))
        return total

    def specialize(self, substitution: Mapping[str, SpecializationRho]) -> Integrand:
        """
        Specialize every alphabet, leaving a scalar integrand over the same contours.

        Raises
        ------
        ConfigError
            If an alphabet of the integrand has no specialization.
        """
        rational = self.rational
        if self.series is not None:
            laurent = RationalExpr()
            for exponents, coefficient in self.series.terms.items():
                value = specialize_all(coefficient, substitution)
                if value:
                    laurent = laurent + RationalExpr.monomial(
                        value, dict(zip(self.series.variables, exponents, strict=True))
                    )
            rational = rational * laurent
        if self.prefactor is not None:
            rational = rational * specialize_all(self.prefactor, substitution)
        return replace(self, rational=rational, series=None, prefactor=None)

    def numeric(self) -> Callable[[Mapping[str, Any]], Any]:
        """The integrand as a function of numpy arrays of contour points."""
        assert not self.is_formal, "specialize a formal integrand before numeric evaluation"
        rational, factor = self.rational, self.numeric_factor

        def integrand(values: Mapping[str, Any]) -> Any:
            out = rational.evaluate_numeric(values)
            if factor is not None:
                out = out * factor(values)
            return out

        return integrand


def specialize_all(series: AlphabetSeries, substitution: Mapping[str, SpecializationRho]) -> Fraction:
    """Specialize every alphabet of a series, returning the scalar left over."""
    for name in series.alphabets:
        if name not in substitution:
            raise ConfigError(name, f"no specialization given for alphabet {name}")
        series = specialize(series, name, substitution[name])
    return series.constant_term()


# ---------------------------------------------------------------- factor helpers


def _kernel_factor(
    variables: Sequence[str],
    var: str,
    kind: KernelKind,
    alphabet: str,
    params: Params,
    degree: int,
    *,
    scale: Fraction = Fraction(1),
    inverse: bool = False,
) -> LaurentSeries:
    """K(scale * var; alphabet), or K(scale / var; alphabet) when inverse."""
    sign = -1 if inverse else 1
    coefficients = kernel_in_variable(kind, alphabet, params, degree)
    return LaurentSeries.in_variable(
        variables, var, {sign * n: g * scale**n for n, g in enumerate(coefficients)}, degree
    )


def _cross(x: str, y: str, zeros: Sequence[Fraction], poles: Sequence[Fraction]) -> RationalExpr:
    """prod_{c in zeros} (x - c y) / prod_{c in poles} (x - c y)."""
    out = RationalExpr.constant(1)
    for c in zeros:
        out = out * RationalExpr.linear(x, Location(c, y))
    for c in poles:
        out = out * RationalExpr.pole(x, Location(c, y))
    return out


def _one_minus(z: str, c: Fraction, power: int = 1) -> RationalExpr:
    """(1 - c z)^power."""
    if c == 0:
        return RationalExpr.constant(1)
    # 1 - c z = -c (z - 1/c)
    return RationalExpr.pole(z, Location(1 / c), -power) * ((-c) ** power)


def _a_ratio(z: str, a: Sequence[Fraction], c: Fraction) -> RationalExpr:
    """prod_j (c z - a_j) / (z - a_j)."""
    out = RationalExpr.constant(1)
    for x in a:
        out = out * RationalExpr.linear(z, Location(x / c)) * c * RationalExpr.pole(z, Location(x))
    return out


def _shift_ratio(
    z: str, rho: SpecializationRho, params: Params, *, scale: Fraction = Fraction(1), inverse: bool = False
) -> tuple[RationalExpr, Fraction]:
    """
    h(scale * z)^{+-1} with h(x) = Pi(q x; rho) / Pi(x; rho).

    Returns the rational part and the coefficient of z in the exponential part; finite
    alphabets give prod_b (1 - b x) / (1 - t b x), Plancherel gives exp(-(1 - t) gamma x).
    """
    power = -1 if inverse else 1
    if rho.kind == "plancherel":
        return RationalExpr.constant(1), power * -(1 - params.t) * rho.gamma * scale
    out = RationalExpr.constant(1)
    for b in rho.b:
        out = out * _one_minus(z, b * scale, power) * _one_minus(z, params.t * b * scale, -power)
    return out, Fraction(0)


def _shift_points(rho: SpecializationRho, params: Params, scales: Iterable[Fraction]) -> set[Fraction]:
    """Zeros and poles of h(s z) for the given scales s."""
    points: set[Fraction] = set()
    for s in scales:
        for b in rho.b:
            if b:
                points.add(1 / (b * s))
                if params.t:
                    points.add(1 / (params.t * b * s))
    return points


def _constant_roots(expr: RationalExpr) -> set[Fraction]:
    roots: set[Fraction] = set()
    for mono, forms in expr.terms:
        if any(e < 0 for _, e in mono):
            roots.add(Fraction(0))
        roots.update(form.coef for form, _ in forms if not form.other)
    return roots


def disk_contours(
    centers: Sequence[Sequence[Fraction]],
    avoid: Iterable[Fraction],
    *,
    shrink: Fraction,
    growth: Fraction = Fraction(1),
    bound: Fraction | None = None,
) -> list[tuple[Circle, ...]]:
    """
    Unions of disjoint disks, one union per level.

    Level alpha (0-based, outermost first) gets disks of radius delta * growth^{m-1-alpha}
    around its centers, with delta = shrink / (8 growth^{m-1}) times the smallest distance
    between two distinct points among the centers and `avoid`.

    Parameters
    ----------
    centers : sequence of sequence of Fraction
        Centers per level.
    avoid : iterable of Fraction
        Points every disk must exclude.
    shrink : Fraction
        Extra factor on delta, at most 1; small enough that scaled images of the disks stay
        away from other points.
    growth : Fraction, optional
        Ratio between radii of consecutive levels.
    bound : Fraction, optional
        Every disk must lie inside |z| < bound.

    Returns
    -------
    list of tuple of Circle
        Contours per level.

    Raises
    ------
    ContourError
        If a center coincides with an avoided point or a disk leaves |z| < bound.
    """
    forbidden = set(avoid)
    everything = set(forbidden)
    for level in centers:
        clash = forbidden.intersection(level)
        if clash:
            raise ContourError(f"contour must enclose and exclude the same points {sorted(clash)}")
        everything.update(level)
    if len(everything) < 2:
        distance = max((abs(x) for x in everything), default=Fraction(1)) or Fraction(1)
    else:
        ordered = sorted(everything)
        distance = min(b - a for a, b in itertools.pairwise(ordered))
    m = len(centers)
    delta = distance * shrink / (8 * growth ** max(m - 1, 0))
    out = []
    for alpha, level in enumerate(centers):
        radius = delta * growth ** (m - 1 - alpha)
        for c in level:
            if bound is not None and abs(c) + radius >= bound:
                raise ContourError(f"disk around {c} leaves the disk |z| < {bound}")
        out.append(tuple(Circle(c, radius) for c in sorted(set(level))))
    return out


def _override(contours: Sequence[Sequence[Circle]] | None, m: int) -> list[tuple[Circle, ...]] | None:
    if contours is None:
        return None
    if len(contours) != m:
        raise ConfigError("contours", f"expected contours for {m} levels, got {len(contours)}")
    return [tuple(level) for level in contours]


def _centered_radii(names: Sequence[Sequence[str]], first: Fraction, ratio: Fraction) -> dict[str, Fraction]:
    return {v: first * ratio**m for m, level in enumerate(names) for v in level}


def _nested_constraints(names: Sequence[Sequence[str]], factor: Fraction) -> list[RadiusConstraint]:
    return [
        RadiusConstraint(inner=y, outer=x, factor=factor)
        for outer, inner in itertools.combinations(range(len(names)), 2)
        for x in names[outer]
        for y in names[inner]
    ]


def _inner_first(names: Sequence[Sequence[str]]) -> list[str]:
    return [v for level in reversed(names) for v in level]


# ---------------------------------------------------------------- formal integrands


def block_integrand(
    spec: ProcessSpec,
    blocks: Sequence[tuple[int, int]],
    *,
    scales: Sequence[Fraction] | None = None,
    radius: Fraction = Fraction(1),
) -> Integrand:
    """
    The multilevel integrand for products of O_{r_m}(lambda^{k_m}).

    Parameters
    ----------
    spec : ProcessSpec
        Process shape.
    blocks : sequence of (int, int)
        Pairs (k_m, r_m) with k_1 <= k_2 <= ... <= k_M; levels may repeat.
    scales : sequence of Fraction, optional
        Constants c_1..c_N weighting lambda^i by c_i^{|lambda^i|}.
    radius : Fraction, optional
        Radius of the outermost circles.

    Returns
    -------
    Integrand
        Formal integrand; its value equals the expectation of the observables.

    Raises
    ------
    ConfigError
        If the levels are out of range or not weakly increasing.
    """
    N, params, degree = spec.N, spec.params, spec.degree
    q, t = params.q, params.t
    if any(not 1 <= k <= N or r < 0 for k, r in blocks):
        raise ConfigError("levels", f"blocks {list(blocks)} outside levels 1..{N}")
    if any(k1 > k2 for (k1, _), (k2, _) in itertools.pairwise(blocks)):
        raise ConfigError("levels", f"block levels must be weakly increasing, got {list(blocks)}")
    if scales is not None and len(scales) != N:
        raise ConfigError("c", f"expected {N} scale constants, got {len(scales)}")
    active = [(k, r) for k, r in blocks if r]
    # d_i = c_i ... c_N, d_{N+1} = 1
    d = [Fraction(1)] * (N + 2)
    if scales is not None:
        for i in range(N, 0, -1):
            d[i] = d[i + 1] * Fraction(scales[i - 1])
    names = [[f"v{m}_{i}" for i in range(1, r + 1)] for m, (_, r) in enumerate(active, start=1)]
    variables = _inner_first(names)
    series = LaurentSeries.one(variables, degree)
    rational = RationalExpr.constant(1)
    for (k, r), level in zip(active, names, strict=True):
        rational = rational * cauchy_determinant(level, 1, t) * Fraction(1, math.factorial(r))
        for v in level:
            for beta in range(k, N + 1):
                series = series * _kernel_factor(
                    variables, v, "H", spec.b_names[beta - 1], params, degree, scale=1 / (q * d[beta + 1]), inverse=True
                )
            for alpha in range(1, k + 1):
                series = series * _kernel_factor(variables, v, "H", spec.a_names[alpha - 1], params, degree, scale=d[alpha])
    for outer, inner in itertools.combinations(range(len(names)), 2):
        for x in names[outer]:
            for y in names[inner]:
                rational = rational * _cross(x, y, (t / q, Fraction(1)), (1 / q, t))
    prefactor = None
    if scales is not None:
        prefactor = AlphabetSeries.one(spec.alphabets, degree)
        for alpha in range(1, N + 1):
            for beta in range(alpha, N + 1):
                pair = (spec.a_names[alpha - 1], spec.b_names[beta - 1])
                scaled = kernel_series("Pi", pair, params, degree)
                scaled = scaled.scale_alphabet(pair[0], d[alpha]).scale_alphabet(pair[1], 1 / d[beta + 1])
                prefactor = prefactor * scaled * kernel_series("Pi_inverse", pair, params, degree)
    scheme = ContourScheme.centered(
        _centered_radii(names, Fraction(radius), q / 2),
        variables,
        _nested_constraints(names, q),
    )
    return Integrand(rational, scheme, series, prefactor, description=f"blocks {active}")


def single_level_integrand(
    r: int,
    params: Params,
    degree: int,
    *,
    alphabets: tuple[str, str] = ("X", "Y"),
    radius: Fraction = Fraction(1),
) -> Integrand:
    """
    E[O_r] under the formal Macdonald measure MM(X; Y).

    The integrand is (1/r!) det[1/(w_k - t w_l)] prod_j H(w_j; X) H((q w_j)^{-1}; Y), all
    variables on the circle |w| = radius.
    """
    spec = ProcessSpec(1, params, degree, (alphabets[0],), (alphabets[1],))
    return block_integrand(spec, [(1, r)], radius=radius)


def multilevel_integrand(spec: ProcessSpec, rs: Sequence[int]) -> Integrand:
    """E[prod_m O_{r_m}(lambda^m)], one block per level."""
    if len(rs) != spec.N:
        raise ConfigError("r", f"expected {spec.N} orders, got {len(rs)}")
    return block_integrand(spec, [(m, r) for m, r in enumerate(rs, start=1)])


def scaled_integrand(spec: ProcessSpec, rs: Sequence[int], scales: Sequence[Fraction]) -> Integrand:
    """E[prod_m O_{r_m}(lambda^m) c_m^{|lambda^m|}]."""
    if len(rs) != spec.N:
        raise ConfigError("r", f"expected {spec.N} orders, got {len(rs)}")
    return block_integrand(spec, [(m, r) for m, r in enumerate(rs, start=1)], scales=scales)


def appendix_integrand(spec: ProcessSpec) -> Integrand:
    """
    E[prod_alpha O_hat_1(lambda^alpha)], one variable per level.

    The circles satisfy R_beta < t R_alpha for alpha < beta.
    """
    N, params, degree = spec.N, spec.params, spec.degree
    params.require_positive_t("the O_hat_1 integral")
    q, t = params.q, params.t
    names = [[f"v{alpha}"] for alpha in range(1, N + 1)]
    variables = _inner_first(names)
    series = LaurentSeries.one(variables, degree)
    rational = RationalExpr.constant(1)
    for alpha in range(1, N + 1):
        v = f"v{alpha}"
        rational = rational * RationalExpr.monomial(1, {v: -1})
        for beta in range(alpha, N + 1):
            series = series * _kernel_factor(
                variables, v, "H_inverse", spec.b_names[beta - 1], params, degree, scale=1 / t, inverse=True
            )
        for a_level in range(1, alpha + 1):
            series = series * _kernel_factor(variables, v, "H_inverse", spec.a_names[a_level - 1], params, degree)
    for alpha, beta in itertools.combinations(range(1, N + 1), 2):
        rational = rational * _cross(f"v{alpha}", f"v{beta}", (Fraction(1), q / t), (1 / t, q))
    scheme = ContourScheme.centered(
        _centered_radii(names, Fraction(1), t / 2),
        variables,
        _nested_constraints(names, t),
    )
    return Integrand(rational, scheme, series, description="O_hat_1 at every level")


# ---------------------------------------------------------------- ascending integrands


def _level_avoid(
    a: Sequence[Fraction], q: Fraction, t: Fraction, span: int, centers: Sequence[Sequence[Fraction]]
) -> set[Fraction]:
    """Points q^k a_j off the centers, and t^{+-1} q^k a_j, for |k| <= span."""
    inside = {x for level in centers for x in level}
    plain = {q**k * x for k in range(-span, span + 1) for x in a} - inside
    if not t:
        return plain
    return plain | {c * q**k * x for c in (t, 1 / t) for k in range(-span, span + 1) for x in a}


def ascending_integrand(
    config: AscendingConfig,
    levels: Sequence[int],
    rs: Sequence[int],
    *,
    hatted: bool = False,
    contours: Sequence[Sequence[Circle]] | None = None,
) -> Integrand:
    """
    E[prod_i e_{r_i}(spectrum of lambda^{n_i})] under the ascending process.

    The spectrum is q^{lambda_j} t^{n-j}, or q^{-lambda_j} t^{j-n} when hatted; levels with
    r_i = 0 are dropped. Level alpha runs over disks around q^{+-k} a_j, k = 0..m-alpha,
    and is integrated after every deeper level.

    Parameters
    ----------
    config : AscendingConfig
        Process parameters; t > 0.
    levels, rs : sequence of int
        n_1 >= ... >= n_m and 0 <= r_i <= n_i.
    hatted : bool, optional
        Inverted observables, under |a_i| R < q^m.
    contours : sequence of sequence of Circle, optional
        Explicit contours per active level, outermost first.

    Returns
    -------
    Integrand
        Scalar integrand; numeric only for Plancherel specializations.

    Raises
    ------
    ConfigError
        If the observable is malformed.
    RadiusViolationError
        If the hatted radius condition fails.
    ContourError
        If no disk contours separate the required points.
    """
    AscendingObservable(tuple(levels), tuple(rs), hatted).validate(config.N)
    params, rho = config.params, config.rho
    params.require_positive_t("the ascending contour integrals")
    q, t = params.q, params.t
    active = [(n, r) for n, r in zip(levels, rs, strict=True) if r]
    m = len(active)
    if hatted:
        config.require_hatted_radius(m)
    c = 1 / t if hatted else t
    shift = 1 / q if hatted else Fraction(1)
    names = [[f"z{alpha}_{i}" for i in range(1, r + 1)] for alpha, (_, r) in enumerate(active, start=1)]
    rational = RationalExpr.constant(1)
    exponents: dict[str, Fraction] = {}
    for (n, r), level in zip(active, names, strict=True):
        rational = rational * cauchy_determinant(level, c, 1) * Fraction(1, math.factorial(r))
        for z in level:
            ratio, exponent = _shift_ratio(z, rho, params, scale=shift, inverse=hatted)
            rational = rational * _a_ratio(z, config.a[:n], c) * ratio
            if exponent:
                exponents[z] = exponent
    zeros, poles = ((t / q, Fraction(1)), (1 / q, t)) if hatted else ((q / t, Fraction(1)), (q, 1 / t))
    for outer, inner in itertools.combinations(range(m), 2):
        for x in names[outer]:
            for y in names[inner]:
                rational = rational * _cross(x, y, zeros, poles)
    circles = _override(contours, m)
    if circles is None:
        direction = -1 if hatted else 1
        centers = [[q ** (direction * k) * x for k in range(m - alpha) for x in config.a] for alpha in range(m)]
        avoid = _level_avoid(config.a, q, t, m + 1, centers) | _shift_points(rho, params, [shift]) | {Fraction(0)}
        bound = None if config.radius == 0 else (q if hatted else 1) / config.radius
        circles = disk_contours(
            centers, avoid, shrink=min(q, t), growth=2 / q if hatted else Fraction(1), bound=bound
        )
    scheme = ContourScheme(
        tuple(_inner_first(names)),
        {v: circles[alpha] for alpha, level in enumerate(names) for v in level},
    )
    label = "hatted" if hatted else "ascending"
    factor = ExponentialFactor(exponents) if exponents else None
    return Integrand(rational, scheme, numeric_factor=factor, description=f"{label} n={list(levels)} r={list(rs)}")


def hatted_integrand(
    config: AscendingConfig,
    levels: Sequence[int],
    rs: Sequence[int],
    *,
    contours: Sequence[Sequence[Circle]] | None = None,
) -> Integrand:
    """The inverted-observable integrand; see `ascending_integrand`."""
    return ascending_integrand(config, levels, rs, hatted=True, contours=contours)


def q_whittaker_integrand(
    config: AscendingConfig,
    levels: Sequence[int],
    *,
    contours: Sequence[Sequence[Circle]] | None = None,
) -> Integrand:
    """
    E[prod_alpha q^{lambda^{n_alpha}_{n_alpha}}] under the t = 0 ascending process.

    The integrand is (-1)^m q^{m(m-1)/2} prod_{alpha<beta} (z_alpha - z_beta)/(z_alpha - q z_beta)
    prod_alpha prod_{i <= n_alpha} a_i/(a_i - z_alpha) h(z_alpha)/z_alpha.

    Raises
    ------
    ConfigError
        If t != 0 or the levels are not weakly decreasing within 1..N.
    """
    params, rho = config.params, config.rho
    if params.t != 0:
        raise ConfigError("t", "the q-Whittaker integral needs t = 0")
    AscendingObservable(tuple(levels), (1,) * len(levels)).validate(config.N)
    q = params.q
    m = len(levels)
    names = [[f"z{alpha}"] for alpha in range(1, m + 1)]
    rational = RationalExpr.constant((-1) ** m * q ** (m * (m - 1) // 2))
    exponents: dict[str, Fraction] = {}
    for n, (z,) in zip(levels, names, strict=True):
        rational = rational * RationalExpr.monomial(1, {z: -1})
        for x in config.a[:n]:
            # a / (a - z) = -a / (z - a)
            rational = rational * RationalExpr.pole(z, Location(x)) * (-x)
        ratio, exponent = _shift_ratio(z, rho, params)
        rational = rational * ratio
        if exponent:
            exponents[z] = exponent
    for (x,), (y,) in itertools.combinations(names, 2):
        rational = rational * _cross(x, y, (Fraction(1),), (q,))
    circles = _override(contours, m)
    if circles is None:
        centers = [[q**k * x for k in range(m - alpha) for x in config.a] for alpha in range(m)]
        avoid = _level_avoid(config.a, q, Fraction(0), m + 1, centers) | _shift_points(rho, params, [Fraction(1)])
        avoid.add(Fraction(0))
        bound = None if config.radius == 0 else 1 / config.radius
        circles = disk_contours(centers, avoid, shrink=q, bound=bound)
    scheme = ContourScheme(tuple(_inner_first(names)), {level[0]: circles[i] for i, level in enumerate(names)})
    factor = ExponentialFactor(exponents) if exponents else None
    return Integrand(rational, scheme, numeric_factor=factor, description=f"q-Whittaker n={list(levels)}")


# ---------------------------------------------------------------- Fredholm integrands


def _g_factor(w: str, v: int, config: AscendingConfig) -> tuple[RationalExpr, Fraction]:
    """
    G(w) / G(q^v w) = prod_{s<v} h(q^s w) prod_j (t w/a_j; q)_v / (w/a_j; q)_v.
    """
    params, rho = config.params, config.rho
    q, t = params.q, params.t
    out = RationalExpr.constant(1)
    exponent = Fraction(0)
    for s in range(v):
        ratio, e = _shift_ratio(w, rho, params, scale=q**s)
        out = out * ratio
        exponent += e
        for x in config.a:
            out = out * _one_minus(w, t * q**s / x) * _one_minus(w, q**s / x, -1)
    return out, exponent


def fredholm_qt_integrand(
    v: Sequence[int],
    config: AscendingConfig,
    *,
    contours: Sequence[Circle] | None = None,
) -> Integrand:
    """
    The k-fold integral of det[K'(v_i, w_i, w_j)] at u^{|v|}, for v_1..v_k >= 1.

    K'(v, w, w') = G(w) / (G(q^v w) (q^v w - w')); every w_i runs over disks around the a_j.
    """
    if not v or any(x < 1 for x in v):
        raise ConfigError("r", f"compositions need positive parts, got {list(v)}")
    params, rho = config.params, config.rho
    q, t = params.q, params.t
    r = sum(v)
    names = [f"w{i}" for i in range(1, len(v) + 1)]
    rational = cauchy_determinant(names, [q**x for x in v], 1)
    exponents: dict[str, Fraction] = {}
    for w, x in zip(names, v, strict=True):
        g, e = _g_factor(w, x, config)
        rational = rational * g
        if e:
            exponents[w] = e
    if contours is None:
        centers = set(config.a)
        avoid = {q**k * x for k in range(-r - 1, r + 2) if k for x in config.a}
        avoid |= {t * q**s * x for s in range(r + 2) for x in config.a} - {Fraction(0)}
        avoid |= _shift_points(rho, params, [q**s for s in range(r)])
        avoid |= _constant_roots(rational) - centers
        avoid.add(Fraction(0))
        bound = None if config.radius == 0 else 1 / config.radius
        shrink = q**r * t if t else q**r
        (circles,) = disk_contours([sorted(centers)], avoid, shrink=shrink, bound=bound)
    else:
        circles = tuple(contours)
    scheme = ContourScheme(tuple(reversed(names)), dict.fromkeys(names, circles))
    factor = ExponentialFactor(exponents) if exponents else None
    return Integrand(rational, scheme, numeric_factor=factor, description=f"Fredholm qt v={list(v)}")


def fredholm_ek_integrand(
    r: int,
    config: AscendingConfig,
    *,
    contours: Sequence[Circle] | None = None,
) -> Integrand:
    """
    The u^r coefficient of det(I - u J) as an r-fold integral.

    With J(w, w') = F(w) / (t w' - w) and F(w) = prod_m (t w - a_m)/(w - a_m) h(w), the
    coefficient is (1/r!) times the integral of det[1/(w_i - t w_j)] prod_i F(w_i).
    """
    if r < 0:
        raise ConfigError("r", f"order must be nonnegative, got {r}")
    params, rho = config.params, config.rho
    params.require_positive_t("the e_r Fredholm kernel")
    q, t = params.q, params.t
    names = [f"w{i}" for i in range(1, r + 1)]
    rational = cauchy_determinant(names, 1, t) * Fraction(1, math.factorial(r))
    exponents: dict[str, Fraction] = {}
    for w in names:
        ratio, e = _shift_ratio(w, rho, params)
        rational = rational * _a_ratio(w, config.a, t) * ratio
        if e:
            exponents[w] = e
    if contours is None:
        centers = set(config.a)
        avoid = {t * x for x in config.a} | {x / t for x in config.a} | _shift_points(rho, params, [Fraction(1)])
        avoid.add(Fraction(0))
        bound = None if config.radius == 0 else 1 / config.radius
        (circles,) = disk_contours([sorted(centers)], avoid - centers, shrink=t, bound=bound)
    else:
        circles = tuple(contours)
    scheme = ContourScheme(tuple(reversed(names)), dict.fromkeys(names, circles))
    factor = ExponentialFactor(exponents) if exponents else None
    return Integrand(rational, scheme, numeric_factor=factor, description=f"Fredholm e_{r}")


_BUILDERS: dict[str, Callable[..., Integrand]] = {
    "prop-3.4": single_level_integrand,
    "thm-3.3": multilevel_integrand,
    "cor-3.6": block_integrand,
    "cor-3.7": scaled_integrand,
    "thm-B.1": appendix_integrand,
    "thm-4.2": ascending_integrand,
    "thm-4.3": hatted_integrand,
    "cor-4.7": q_whittaker_integrand,
    "thm-4.10": fredholm_qt_integrand,
    "thm-4.14": fredholm_ek_integrand,
}


def build_integrand(identity_id: str, /, *args: Any, **options: Any) -> Integrand:
    """
    Build the integrand of a registered contour identity.

    Parameters
    ----------
    identity_id : str
        One of the ids with a contour-integral side.
    *args, **options
        Passed to the identity's builder.

    Returns
    -------
    Integrand
        The integrand and its contours.

    Raises
    ------
    ValueError
        If the id has no integrand.
    """
    try:
        builder = _BUILDERS[identity_id]
    except KeyError:
        raise ValueError(
            f"no contour integrand for identity {identity_id!r}; expected one of {sorted(_BUILDERS)}"
        ) from None
    integrand = builder(*args, **options)
    logger.debug("built %s over %s", integrand.description, integrand.variables)
    return integrand
