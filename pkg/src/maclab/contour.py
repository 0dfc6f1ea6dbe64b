"""
Exact contour integration by iterated residues.

A `RationalExpr` is a finite sum of terms

    c * prod_v v^{e_v} * prod_f f^{-m_f}

where every f is a linear form v - c w or v - c. A multiplicity m_f may be negative,
in which case the form is a numerator factor; zeros that cancel poles are handled by
adding multiplicities, so cancelled poles never produce residues.

Integrals are normalized as (2 pi i)^{-1} times the contour integral. Variables are
integrated one at a time in the order of a `ContourScheme`; the residue at an inside
pole is substituted back, leaving a `RationalExpr` in the remaining variables.
"""

from __future__ import annotations

import graphlib
import hashlib
import itertools
import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Any, Literal

from maclab.errors import ContourError, HigherOrderPoleError, PoleCollisionError
from maclab.symfunc import AlphabetSeries

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Mapping, Sequence

__all__ = [
    "Circle",
    "ContourScheme",
    "LaurentSeries",
    "LinearForm",
    "Location",
    "RadiusConstraint",
    "RationalExpr",
    "ResiduePlan",
    "cauchy_determinant",
    "classify_pole",
    "integrate_series",
    "iterated_residue_integral",
]

logger = logging.getLogger(__name__)

Verdict = Literal["inside", "outside"]


@dataclass(frozen=True, slots=True, order=True)
class LinearForm:
    """The form var - coef * other, or var - coef when other is empty."""

    var: str
    coef: Fraction
    other: str = ""

    def __str__(self) -> str:
        target = f"{self.coef}*{self.other}" if self.other else f"{self.coef}"
        return f"({self.var} - {target})"


@dataclass(frozen=True, slots=True)
class Location:
    """The point coef * var, or the constant coef when var is empty."""

    coef: Fraction
    var: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "coef", Fraction(self.coef))
        if self.coef == 0:
            object.__setattr__(self, "var", "")

    def scaled(self, c: Fraction) -> Location:
        return Location(self.coef * c, self.var)

    def __str__(self) -> str:
        return f"{self.coef}*{self.var}" if self.var else str(self.coef)


Monomial = tuple[tuple[str, int], ...]
Factors = tuple[tuple[LinearForm, int], ...]
TermKey = tuple[Monomial, Factors]

_ONE_KEY: TermKey = ((), ())


def _merge(left: tuple[tuple[Any, int], ...], right: tuple[tuple[Any, int], ...]) -> tuple[tuple[Any, int], ...]:
    if not left:
        return right
    if not right:
        return left
    counts: dict[Any, int] = dict(left)
    for item, n in right:
        counts[item] = counts.get(item, 0) + n
    return tuple(sorted((item, n) for item, n in counts.items() if n))


class RationalExpr:
    """
    A sum of monomials times products of powers of linear forms.

    Parameters
    ----------
    terms : mapping, optional
        Map from (monomial, factors) keys to coefficients.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[TermKey, Fraction | int] | None = None) -> None:
        self.terms: dict[TermKey, Fraction] = {k: Fraction(c) for k, c in (terms or {}).items() if c}

    @classmethod
    def constant(cls, value: Fraction | int) -> RationalExpr:
        return cls({_ONE_KEY: value})

    @classmethod
    def monomial(cls, coef: Fraction | int, exponents: Mapping[str, int]) -> RationalExpr:
        mono = tuple(sorted((v, e) for v, e in exponents.items() if e))
        return cls({(mono, ()): coef})

    @classmethod
    def variable(cls, name: str) -> RationalExpr:
        return cls.monomial(1, {name: 1})

    @classmethod
    def pole(cls, x: str, location: Location, mult: int = 1) -> RationalExpr:
        """
        The factor (x - location)^{-mult}, written in canonical form.

        Raises
        ------
        PoleCollisionError
            If the factor is identically zero with mult > 0.
        """
        if mult == 0:
            return cls.constant(1)
        c, y = location.coef, location.var
        if c == 0:
            return cls.monomial(1, {x: -mult})
        if y == x:
            if c == 1:
                if mult > 0:
                    raise PoleCollisionError(f"factor {x} - {x} vanishes identically")
                return cls.constant(0)
            return cls.monomial((1 - c) ** (-mult), {x: -mult})
        if not y or x < y:
            return cls({((), ((LinearForm(x, c, y), mult),)): 1})
        # x - c y = -c (y - x / c)
        return cls({((), ((LinearForm(y, 1 / c, x), mult),)): (-c) ** (-mult)})

    @classmethod
    def linear(cls, x: str, location: Location) -> RationalExpr:
        """The numerator factor x - location."""
        return cls.pole(x, location, -1)

    def is_zero(self) -> bool:
        return not self.terms

    def variables(self) -> set[str]:
        out: set[str] = set()
        for mono, forms in self.terms:
            out.update(v for v, _ in mono)
            for form, _ in forms:
                out.add(form.var)
                if form.other:
                    out.add(form.other)
        return out

    def as_scalar(self) -> Fraction:
        """The value of an expression without variables."""
        leftover = [key for key in self.terms if key != _ONE_KEY]
        assert not leftover, f"expression still depends on {sorted(self.variables())}"
        return self.terms.get(_ONE_KEY, Fraction(0))

    def __add__(self, other: RationalExpr | Fraction | int) -> RationalExpr:
        if isinstance(other, (int, Fraction)):
            other = RationalExpr.constant(other)
        out = defaultdict(Fraction, self.terms)
        for key, c in other.terms.items():
            out[key] += c
        return RationalExpr(out)

    __radd__ = __add__

    def __neg__(self) -> RationalExpr:
        return RationalExpr({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: RationalExpr | Fraction | int) -> RationalExpr:
        return self + (-other)

    def __mul__(self, other: RationalExpr | Fraction | int) -> RationalExpr:
        if isinstance(other, (int, Fraction)):
            return RationalExpr({k: c * other for k, c in self.terms.items()})
        if not isinstance(other, RationalExpr):
            return NotImplemented
        out: defaultdict[TermKey, Fraction] = defaultdict(Fraction)
        for (m1, f1), c1 in self.terms.items():
            for (m2, f2), c2 in other.terms.items():
                out[(_merge(m1, m2), _merge(f1, f2))] += c1 * c2
        return RationalExpr(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> RationalExpr:
        assert n >= 0, f"power must be nonnegative, got {n}"
        out = RationalExpr.constant(1)
        for _ in range(n):
            out = out * self
        return out

    def __repr__(self) -> str:
        return f"RationalExpr({len(self.terms)} terms, vars={sorted(self.variables())})"

    def evaluate(self, values: Mapping[str, Fraction]) -> Fraction:
        """
        Exact value at a rational point.

        Raises
        ------
        PoleCollisionError
            If a denominator vanishes.
        """
        total = Fraction(0)
        for (mono, forms), c in self.terms.items():
            value = c
            for v, e in mono:
                if values[v] == 0 and e < 0:
                    raise PoleCollisionError(f"{v} = 0 is a pole")
                value *= Fraction(values[v]) ** e
            for form, m in forms:
                base = values[form.var] - form.coef * (values[form.other] if form.other else 1)
                if base == 0 and m > 0:
                    raise PoleCollisionError(f"{form} vanishes")
                value *= Fraction(base) ** (-m)
            total += value
        return total

    def evaluate_numeric(self, values: Mapping[str, Any]) -> Any:
        """Floating-point value; `values` may hold numpy arrays that broadcast together."""
        total: Any = 0
        for (mono, forms), c in self.terms.items():
            value: Any = float(c)
            for v, e in mono:
                value = value * values[v] ** e
            for form, m in forms:
                other = values[form.other] if form.other else 1.0
                value = value * (values[form.var] - float(form.coef) * other) ** (-m)
            total = total + value
        return total


@dataclass(frozen=True, slots=True)
class Circle:
    """A positively oriented circle |z - center| = radius with a real rational center."""

    center: Fraction
    radius: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", Fraction(self.center))
        object.__setattr__(self, "radius", Fraction(self.radius))
        if self.radius <= 0:
            raise ContourError(f"circle radius must be positive, got {self.radius}")


@dataclass(frozen=True, slots=True)
class RadiusConstraint:
    """The condition radius(inner) < factor * radius(outer)."""

    inner: str
    outer: str
    factor: Fraction = Fraction(1)


@dataclass(frozen=True)
class ContourScheme:
    """
    Contours for each integration variable and the order of integration.

    Attributes
    ----------
    order : tuple of str
        Variables, integrated first to last.
    contours : mapping of str to tuple of Circle
        Each variable runs over the union of its (disjoint) circles.
    constraints : tuple of RadiusConstraint
        Radius inequalities the circles must satisfy; checked on construction.
    """

    order: tuple[str, ...]
    contours: Mapping[str, tuple[Circle, ...]]
    constraints: tuple[RadiusConstraint, ...] = ()

    def __post_init__(self) -> None:
        for v in self.order:
            if not self.contours.get(v):
                raise ContourError(f"no contour given for variable {v}")
        for v, circles in self.contours.items():
            for first, second in itertools.combinations(circles, 2):
                gap = abs(first.center - second.center)
                if gap <= first.radius + second.radius:
                    raise ContourError(f"circles of {v} around {first.center} and {second.center} overlap")
        sorter: graphlib.TopologicalSorter[str] = graphlib.TopologicalSorter()
        for constraint in self.constraints:
            sorter.add(constraint.outer, constraint.inner)
            inner = self.contours[constraint.inner]
            outer = self.contours[constraint.outer]
            if len(inner) != 1 or len(outer) != 1:
                raise ContourError("radius constraints apply to single circles only")
            if not inner[0].radius < constraint.factor * outer[0].radius:
                raise ContourError(
                    f"radius of {constraint.inner} must be below {constraint.factor} times that of {constraint.outer}"
                )
        try:
            sorter.prepare()
        except graphlib.CycleError as exc:
            raise ContourError(f"radius constraints are cyclic: {exc.args[1]}") from exc

    @classmethod
    def centered(
        cls,
        radii: Mapping[str, Fraction],
        order: Sequence[str],
        constraints: Iterable[RadiusConstraint] = (),
    ) -> ContourScheme:
        """One circle around the origin per variable."""
        return cls(
            tuple(order),
            {v: (Circle(Fraction(0), Fraction(r)),) for v, r in radii.items()},
            tuple(constraints),
        )


@dataclass
class ResiduePlan:
    """
    Record of the pole classifications made during an integration.

    Attributes
    ----------
    order : tuple of str
        Integration order.
    decisions : set
        (variable, pole, verdict) triples; verdict "cancelled" marks poles removed by
        matching zeros.
    """

    order: tuple[str, ...] = ()
    decisions: set[tuple[str, str, str]] = field(default_factory=set)

    def record(self, variable: str, location: Location, verdict: str) -> None:
        self.decisions.add((variable, str(location), verdict))

    def digest(self) -> str:
        payload = json.dumps({"order": list(self.order), "decisions": sorted(self.decisions)})
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def summary(self) -> dict[str, int]:
        counts: defaultdict[str, int] = defaultdict(int)
        for _, _, verdict in self.decisions:
            counts[verdict] += 1
        return dict(counts)


def classify_pole(circle: Circle, location: Location, circles: Mapping[str, Circle]) -> Verdict:
    """
    Decide whether a pole lies inside a circle.

    A moving pole c * v traces the circle of v scaled by c; it is inside when that image
    lies in the open disk, outside when the image is disjoint from the disk or encloses it.

    Parameters
    ----------
    circle : Circle
        Contour of the integration variable.
    location : Location
        The pole.
    circles : mapping of str to Circle
        Current contours of the variables the pole may depend on.

    Returns
    -------
    {"inside", "outside"}
        The verdict.

    Raises
    ------
    ContourError
        If the pole meets the contour for some position of the other variables.
    """
    if not location.var:
        distance = abs(location.coef - circle.center)
        if distance == circle.radius:
            raise ContourError(f"pole {location} lies on the circle |z - {circle.center}| = {circle.radius}")
        return "inside" if distance < circle.radius else "outside"
    if location.var not in circles:
        raise ContourError(f"pole {location} depends on {location.var}, which has no contour yet")
    source = circles[location.var]
    image_radius = abs(location.coef) * source.radius
    distance = abs(location.coef * source.center - circle.center)
    if distance + image_radius < circle.radius:
        return "inside"
    if distance > circle.radius + image_radius or image_radius > distance + circle.radius:
        return "outside"
    raise ContourError(f"moving pole {location} crosses the circle |z - {circle.center}| = {circle.radius}")


def _binomial(top: int, k: int) -> Fraction:
    out = Fraction(1)
    for i in range(k):
        out = out * (top - i) / (i + 1)
    return out


def _difference_power(p: Location, pf: Location, s: int) -> RationalExpr:
    """(p - pf)^s as a RationalExpr in the remaining variables."""
    if p.var:
        # c_p (v - pf / c_p)
        return RationalExpr.pole(p.var, pf.scaled(1 / p.coef), -s) * (p.coef**s)
    if pf.var:
        # c_p - c_f w = -c_f (w - c_p / c_f)
        return RationalExpr.pole(pf.var, Location(p.coef / pf.coef), -s) * ((-pf.coef) ** s)
    difference = p.coef - pf.coef
    if difference == 0 and s < 0:
        raise PoleCollisionError(f"poles {p} and {pf} coincide")
    return RationalExpr.constant(difference**s)


def _x_factors(key: TermKey, x: str) -> tuple[list[tuple[Location, int, Fraction]], TermKey]:
    """Split a term into (root, multiplicity, kappa) triples for x and the x-free rest."""
    mono, forms = key
    found: list[tuple[Location, int, Fraction]] = []
    rest_mono = []
    for v, e in mono:
        if v == x:
            found.append((Location(Fraction(0)), -e, Fraction(1)))
        else:
            rest_mono.append((v, e))
    rest_forms = []
    for form, m in forms:
        if form.var == x:
            found.append((Location(form.coef, form.other), m, Fraction(1)))
        elif form.other == x:
            # var - c x = -c (x - var / c)
            found.append((Location(1 / form.coef, form.var), m, -form.coef))
        else:
            rest_forms.append((form, m))
    return found, (tuple(rest_mono), tuple(rest_forms))


class _Integrator:
    def __init__(
        self,
        circles: Mapping[str, Circle],
        plan: ResiduePlan | None,
        allow_higher_order: bool,
    ) -> None:
        self.circles = circles
        self.plan = plan
        self.allow_higher_order = allow_higher_order
        self._verdicts: dict[tuple[str, Location], Verdict] = {}

    def verdict(self, x: str, location: Location) -> Verdict:
        key = (x, location)
        if key not in self._verdicts:
            self._verdicts[key] = classify_pole(self.circles[x], location, self.circles)
            if self.plan is not None:
                self.plan.record(x, location, self._verdicts[key])
            logger.debug("pole %s of %s: %s", location, x, self._verdicts[key])
        return self._verdicts[key]

    def integrate(self, expr: RationalExpr, x: str) -> RationalExpr:
        out = RationalExpr()
        for key, coef in expr.terms.items():
            factors, rest = _x_factors(key, x)
            if not factors:
                # no dependence on x: the integral over a closed contour vanishes
                continue
            orders: defaultdict[Location, int] = defaultdict(int)
            for root, m, _ in factors:
                orders[root] += m
            scale = coef
            for _, m, kappa in factors:
                scale *= kappa ** (-m)
            rest_expr = RationalExpr({rest: scale})
            for root, n in orders.items():
                if n <= 0:
                    if self.plan is not None and any(r == root and m > 0 for r, m, _ in factors):
                        self.plan.record(x, root, "cancelled")
                    continue
                if self.verdict(x, root) != "inside":
                    continue
                if n > 1 and root.coef != 0 and not self.allow_higher_order:
                    raise HigherOrderPoleError(f"pole of order {n} at {x} = {root}")
                residue = self._residue(root, n, [(r, m) for r, m, _ in factors if r != root])
                out = out + residue * rest_expr
        return out

    @staticmethod
    def _residue(root: Location, n: int, others: Sequence[tuple[Location, int]]) -> RationalExpr:
        """[y^{n-1}] prod_f (a_f + y)^{-m_f} with a_f = root - p_f."""
        if n == 1:
            out = RationalExpr.constant(1)
            for pf, m in others:
                out = out * _difference_power(root, pf, -m)
            return out
        series: list[RationalExpr] = [RationalExpr.constant(1)] + [RationalExpr() for _ in range(n - 1)]
        for pf, m in others:
            expansion = []
            for k in range(n):
                binom = _binomial(-m, k)
                expansion.append(_difference_power(root, pf, -m - k) * binom if binom else RationalExpr())
            series = [
                sum((series[d - k] * expansion[k] for k in range(d + 1) if not expansion[k].is_zero()), RationalExpr())
                for d in range(n)
            ]
        return series[n - 1]


def iterated_residue_integral(
    expr: RationalExpr,
    scheme: ContourScheme,
    *,
    plan: ResiduePlan | None = None,
    allow_higher_order: bool = False,
) -> Fraction:
    """
    Evaluate prod (2 pi i)^{-1} oint ... oint expr exactly.

    Parameters
    ----------
    expr : RationalExpr
        Integrand in the scheme's variables.
    scheme : ContourScheme
        Contours and integration order.
    plan : ResiduePlan, optional
        Receives the pole classifications.
    allow_higher_order : bool, optional
        Accept poles of order > 1 away from the origin.

    Returns
    -------
    Fraction
        The integral. With no variables this is the expression itself.

    Raises
    ------
    ContourError
        If a pole cannot be classified.
    HigherOrderPoleError
        If a non-simple pole away from the origin is met.
    """
    unknown = expr.variables() - set(scheme.order)
    if unknown:
        raise ContourError(f"no contour for variables {sorted(unknown)}")
    if plan is not None:
        plan.order = scheme.order
    total = Fraction(0)
    components = [range(len(scheme.contours[v])) for v in scheme.order]
    for choice in itertools.product(*components):
        circles = {v: scheme.contours[v][j] for v, j in zip(scheme.order, choice, strict=True)}
        integrator = _Integrator(circles, plan, allow_higher_order)
        current = expr
        for v in scheme.order:
            current = integrator.integrate(current, v)
            if current.is_zero():
                break
        total += current.as_scalar()
    return total


def cauchy_determinant(
    variables: Sequence[str],
    u: Fraction | int | Sequence[Fraction | int],
    v: Fraction | int,
    *,
    expanded: bool = False,
) -> RationalExpr:
    """
    det[1 / (u_i x_i - v x_j)] over the given variables.

    Parameters
    ----------
    variables : sequence of str
        x_1, ..., x_r.
    u : Fraction or sequence of Fraction
        Row coefficients, one per variable or a single shared value; u_i != v.
    v : Fraction
        Column coefficient.
    expanded : bool, optional
        Sum over permutations instead of the product formula
        prod_{i<j} (u_i x_i - u_j x_j)(v x_j - v x_i) / prod_{i,j} (u_i x_i - v x_j).

    Returns
    -------
    RationalExpr
        The determinant; 1 for no variables.
    """
    xs = list(variables)
    us = [Fraction(c) for c in u] if isinstance(u, (list, tuple)) else [Fraction(u)] * len(xs)
    assert len(us) == len(xs), f"{len(us)} row coefficients for {len(xs)} variables"
    v = Fraction(v)
    if expanded:
        return determinant(len(xs), lambda i, j: _cauchy_entry(xs[i], xs[j], us[i], v))
    out = RationalExpr.constant(1)
    for i, j in itertools.combinations(range(len(xs)), 2):
        out = out * RationalExpr.linear(xs[i], Location(us[j] / us[i], xs[j])) * (-us[i] * v)
        out = out * RationalExpr.linear(xs[i], Location(Fraction(1), xs[j]))
    for i in range(len(xs)):
        for j in range(len(xs)):
            out = out * _cauchy_entry(xs[i], xs[j], us[i], v)
    return out


def _cauchy_entry(xi: str, xj: str, u: Fraction, v: Fraction) -> RationalExpr:
    """1 / (u x_i - v x_j)."""
    if xi == xj:
        if u == v:
            raise PoleCollisionError(f"diagonal entry 1 / ({u} - {v}) {xi} is singular")
        return RationalExpr.monomial(1 / (u - v), {xi: -1})
    return RationalExpr.pole(xi, Location(v / u, xj)) * (1 / u)


def determinant(size: int, entry: Callable[[int, int], RationalExpr]) -> RationalExpr:
    """The determinant of a matrix of RationalExpr entries by permutation expansion."""
    out = RationalExpr()
    cache: dict[tuple[int, int], RationalExpr] = {}
    for perm in itertools.permutations(range(size)):
        inversions = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
        term = RationalExpr.constant(-1 if inversions % 2 else 1)
        for i, j in enumerate(perm):
            if (i, j) not in cache:
                cache[(i, j)] = entry(i, j)
            term = term * cache[(i, j)]
        out = out + term
    return out


class LaurentSeries:
    """
    A Laurent polynomial in contour variables with AlphabetSeries coefficients.

    Parameters
    ----------
    variables : sequence of str
        Contour variables.
    terms : mapping, optional
        Map from exponent vectors to coefficients.
    degree : int, optional
        Truncation order of the coefficients.
    """

    __slots__ = ("degree", "terms", "variables")

    def __init__(
        self,
        variables: Sequence[str],
        terms: Mapping[tuple[int, ...], AlphabetSeries] | None = None,
        degree: int = 0,
    ) -> None:
        self.variables = tuple(variables)
        self.degree = degree
        self.terms: dict[tuple[int, ...], AlphabetSeries] = {
            e: s for e, s in (terms or {}).items() if not s.is_zero()
        }
        for e in self.terms:
            assert len(e) == len(self.variables), f"exponent {e} does not match {self.variables}"
            assert all(abs(x) <= degree for x in e), f"exponent {e} exceeds truncation order {degree}"

    @classmethod
    def one(cls, variables: Sequence[str], degree: int) -> LaurentSeries:
        return cls(variables, {(0,) * len(variables): AlphabetSeries.one((), degree)}, degree)

    @classmethod
    def in_variable(
        cls,
        variables: Sequence[str],
        var: str,
        coefficients: Mapping[int, AlphabetSeries],
        degree: int,
    ) -> LaurentSeries:
        """sum_n coefficients[n] var^n."""
        i = list(variables).index(var)
        terms = {}
        for n, series in coefficients.items():
            e = [0] * len(variables)
            e[i] = n
            terms[tuple(e)] = series
        return cls(variables, terms, degree)

    def __mul__(self, other: LaurentSeries) -> LaurentSeries:
        assert self.variables == other.variables, "Laurent series over different variables"
        degree = min(self.degree, other.degree)
        out: dict[tuple[int, ...], AlphabetSeries] = {}
        for e1, s1 in self.terms.items():
            for e2, s2 in other.terms.items():
                product = s1 * s2
                if product.is_zero():
                    continue
                e = tuple(a + b for a, b in zip(e1, e2, strict=True))
                out[e] = out[e] + product if e in out else product
        return LaurentSeries(self.variables, out, degree)

    def __len__(self) -> int:
        return len(self.terms)


def integrate_series(
    series: LaurentSeries,
    rational: RationalExpr,
    scheme: ContourScheme,
    *,
    plan: ResiduePlan | None = None,
) -> AlphabetSeries:
    """
    Integrate sum_e S_e v^e * rational termwise.

    Parameters
    ----------
    series : LaurentSeries
        Formal part of the integrand.
    rational : RationalExpr
        Rational part of the integrand.
    scheme : ContourScheme
        Contours; its order must cover `series.variables`.
    plan : ResiduePlan, optional
        Receives the pole classifications.

    Returns
    -------
    AlphabetSeries
        sum_e S_e I(e), where I(e) is the integral of v^e * rational.
    """
    total = AlphabetSeries.constant(0, (), series.degree)
    for e, coefficient in series.terms.items():
        monomial = RationalExpr.monomial(1, dict(zip(series.variables, e, strict=True)))
        value = iterated_residue_integral(rational * monomial, scheme, plan=plan)
        if value:
            total = total + coefficient * value
    logger.debug("integrated %d exponent vectors", len(series))
    return total

