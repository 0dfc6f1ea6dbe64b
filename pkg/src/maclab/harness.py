"""
Identity checks: the registry, configuration parsing, execution and the run log.

Every registered identity compares two independently computed sides. Exact checks pass
when their defect is exactly zero, bounded checks when the certified interval contains
the other side, and contour checks are also compared against numeric quadrature.
"""

from __future__ import annotations

import json
import logging
import math
import os
import threading
import time
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import TYPE_CHECKING, Any, Literal, TypedDict

import numpy as np

from maclab.ascending import (
    AscendingConfig,
    AscendingObservable,
    operator_chain_expectation,
    operator_eigen_defect,
    spectrum,
    truncated_expectation_lhs,
)
from maclab.contour import Circle, ResiduePlan
from maclab.core import Params, Partition, enumerate_partitions, parse_scalar
from maclab.errors import (
    ConfigError,
    ContourError,
    ConvergenceError,
    HigherOrderPoleError,
    MaclabError,
    ParameterDegeneracyError,
    ParameterError,
    PoleCollisionError,
)
from maclab.fredholm import (
    compositions,
    fredholm_ek_coefficient,
    fredholm_qt_coefficient,
    noumi_coefficient,
    noumi_eigen_defect,
    noumi_eigenvalue,
)
from maclab.integrands import (
    Integrand,
    appendix_integrand,
    ascending_integrand,
    block_integrand,
    fredholm_ek_integrand,
    fredholm_qt_integrand,
    multilevel_integrand,
    q_whittaker_integrand,
    scaled_integrand,
    single_level_integrand,
    specialize_all,
)
from maclab.process import (
    ObservableEntry,
    ObservablePlan,
    ProcessSpec,
    constant_term_projection,
    drop_level,
    expectation_lhs,
    merge_levels,
    merged_weight,
    mp_weight,
)
from maclab.quadrature import numeric_quadrature_oracle
from maclab.symfunc import (
    AlphabetSeries,
    SpecializationRho,
    SymFunc,
    TruncatedExponential,
    alphabet_pair,
    cauchy_sum,
    evaluate,
    kernel_series,
    macdonald_P,
    macdonald_Q,
    schur_jacobi_trudi,
    specialize,
)

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Mapping, Sequence

__all__ = [
    "CONFIG_KEYS",
    "CheckConfig",
    "CheckReport",
    "IdentityCheck",
    "Outcome",
    "RunLog",
    "get_identity",
    "list_identities",
    "parse_config",
    "resolve_config",
    "run_check",
]

logger = logging.getLogger(__name__)

Status = Literal["pass", "fail", "undecidable-contour", "degenerate-params"]

CONFIG_KEYS = frozenset(
    {"q", "t", "D", "N", "a", "rho", "R", "r", "levels", "plan", "c", "L", "tolerance", "seed", "grid", "contours", "partitions", "points"}
)
DEFAULT_GRID: tuple[tuple[Fraction, Fraction], ...] = (
    (Fraction(1, 3), Fraction(1, 5)),
    (Fraction(2, 7), Fraction(1, 2)),
    (Fraction(1, 2), Fraction(1, 3)),
)
DEFAULT_A = (Fraction(1, 10), Fraction(1, 11), Fraction(1, 12))
DEFAULT_LOG = "maclab-runs.jsonl"
ORACLE_TOLERANCE = 1e-8
# rationals wider than this are reported as a decimal upper bound
EXACT_TEXT_BITS = 4096
PAIRING_INSTANCES = 50


class ReportDict(TypedDict):
    """Serialized form of `CheckReport`, one line of the run log."""

    id: str
    parameters: dict[str, Any]
    status: Status
    max_defect: str
    runtime_ms: float
    engine: dict[str, Any]
    details: list[dict[str, Any]]


# ---------------------------------------------------------------- configuration


def _scalar(key: str, value: object) -> Fraction:
    try:
        return parse_scalar(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(key, f"malformed rational {value!r}") from exc


def _scalars(key: str, value: object) -> tuple[Fraction, ...]:
    if not isinstance(value, list):
        raise ConfigError(key, f"expected a list of rationals, got {value!r}")
    return tuple(_scalar(key, x) for x in value)


def _integer(key: str, value: object, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(key, f"expected an integer >= {minimum}, got {value!r}")
    return value


def _integers(key: str, value: object) -> tuple[int, ...]:
    if not isinstance(value, list):
        raise ConfigError(key, f"expected a list of integers, got {value!r}")
    return tuple(_integer(key, x) for x in value)


def _circle(value: object) -> Circle:
    if not isinstance(value, dict) or set(value) != {"center", "radius"}:
        raise ConfigError("contours", f"expected {{'center': ..., 'radius': ...}}, got {value!r}")
    try:
        return Circle(_scalar("contours", value["center"]), _scalar("contours", value["radius"]))
    except ContourError as exc:
        raise ConfigError("contours", str(exc)) from exc


def _partition(value: object) -> Partition:
    try:
        if isinstance(value, str):
            return Partition.from_string(value)
        if isinstance(value, list):
            return Partition(tuple(_integers("partitions", value)))
    except (ValueError, AssertionError) as exc:
        raise ConfigError("partitions", f"malformed partition {value!r}") from exc
    raise ConfigError("partitions", f"malformed partition {value!r}")


def _rho(value: object, radius: Fraction | None) -> SpecializationRho:
    if not isinstance(value, dict) or "kind" not in value:
        raise ConfigError("rho", f"expected an object with a 'kind', got {value!r}")
    kind = value["kind"]
    if kind == "finite":
        return SpecializationRho.finite(_scalars("rho", value.get("b", [])), radius)
    if kind == "plancherel":
        return SpecializationRho.plancherel(_scalar("rho", value.get("gamma", 0)), radius)
    if kind == "zero":
        return SpecializationRho("zero", radius=radius)
    raise ConfigError("rho", f"unknown specialization kind {kind!r}")


def _entry(value: object) -> ObservableEntry:
    if not isinstance(value, dict) or "level" not in value:
        raise ConfigError("plan", f"expected an object with a 'level', got {value!r}")
    kind = value.get("kind", "O")
    if kind not in ("O", "O_hat_1"):
        raise ConfigError("plan", f"unknown observable kind {kind!r}")
    return ObservableEntry(
        level=_integer("plan", value["level"], 1),
        r=_integer("plan", value.get("r", 1)),
        kind=kind,
        multiplicity=_integer("plan", value.get("multiplicity", 1), 1),
    )


@dataclass(frozen=True)
class CheckConfig:
    """
    A validated check configuration.

    Only `D`, `seed`, `tolerance` and `grid` have defaults; checks fill in the rest.
    """

    q: Fraction | None = None
    t: Fraction | None = None
    D: int = 4
    N: int | None = None
    a: tuple[Fraction, ...] | None = None
    rho: SpecializationRho | None = None
    r: tuple[int, ...] | None = None
    levels: tuple[int, ...] | None = None
    plan: tuple[ObservableEntry, ...] | None = None
    c: tuple[Fraction, ...] | None = None
    L: int | None = None
    tolerance: Fraction = Fraction(1, 10**12)
    seed: int = 0
    grid: tuple[tuple[Fraction, Fraction], ...] = DEFAULT_GRID
    contours: tuple[tuple[Circle, ...], ...] | None = None
    partitions: tuple[Partition, ...] | None = None
    points: tuple[tuple[Fraction, ...], ...] | None = None

    def pairs(self) -> list[tuple[Fraction, Fraction]]:
        """The (q, t) pairs to run on: the explicit pair if given, the grid otherwise."""
        if self.q is not None and self.t is not None:
            return [(self.q, self.t)]
        return list(self.grid)

    def get_config(self) -> dict[str, Any]:
        """The configuration as JSON-ready data; `parse_config` reproduces it."""
        out: dict[str, Any] = {
            "D": self.D,
            "seed": self.seed,
            "tolerance": str(self.tolerance),
            "grid": [[str(q), str(t)] for q, t in self.grid],
        }
        if self.q is not None:
            out["q"] = str(self.q)
        if self.t is not None:
            out["t"] = str(self.t)
        for key in ("N", "L"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        for key in ("r", "levels"):
            if getattr(self, key) is not None:
                out[key] = list(getattr(self, key))
        for key in ("a", "c"):
            if getattr(self, key) is not None:
                out[key] = [str(x) for x in getattr(self, key)]
        if self.rho is not None:
            rho = dict(self.rho.get_config())
            out["R"] = rho.pop("R")
            out["rho"] = rho
        if self.plan is not None:
            out["plan"] = [
                {"level": e.level, "r": e.r, "kind": e.kind, "multiplicity": e.multiplicity} for e in self.plan
            ]
        if self.contours is not None:
            out["contours"] = [[{"center": str(c.center), "radius": str(c.radius)} for c in level] for level in self.contours]
        if self.partitions is not None:
            out["partitions"] = [",".join(map(str, lam.parts)) for lam in self.partitions]
        if self.points is not None:
            out["points"] = [[str(x) for x in point] for point in self.points]
        return out


def parse_config(source: str | os.PathLike[str] | Mapping[str, Any]) -> CheckConfig:
    """
    Read and validate a check configuration.

    Parameters
    ----------
    source : path or mapping
        A UTF-8 JSON file, or its already-decoded content. Rationals are "num/den" strings.

    Returns
    -------
    CheckConfig
        The validated configuration with defaults filled in.

    Raises
    ------
    ConfigError
        On an unknown key, a malformed value or a violated radius condition; the error
        names the offending key.
    """
    if isinstance(source, (str, os.PathLike)):
        path = Path(source)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"{path} is not valid JSON: {exc}") from exc
    else:
        raw = dict(source)
    if not isinstance(raw, dict):
        raise ConfigError("config", "the configuration must be a JSON object")
    unknown = sorted(set(raw) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(unknown[0], f"unknown configuration key {unknown[0]!r}")
    values: dict[str, Any] = {}
    for key in ("q", "t", "tolerance"):
        if key in raw:
            values[key] = _scalar(key, raw[key])
    for key in ("D", "seed", "L"):
        if key in raw:
            values[key] = _integer(key, raw[key])
    if "N" in raw:
        values["N"] = _integer("N", raw["N"], 1)
    for key in ("a", "c"):
        if key in raw:
            values[key] = _scalars(key, raw[key])
    for key in ("r", "levels"):
        if key in raw:
            values[key] = _integers(key, raw[key])
    if "grid" in raw:
        if not isinstance(raw["grid"], list) or not all(isinstance(p, list) and len(p) == 2 for p in raw["grid"]):
            raise ConfigError("grid", "expected a list of [q, t] pairs")
        values["grid"] = tuple((_scalar("grid", q), _scalar("grid", t)) for q, t in raw["grid"])
    radius = _scalar("R", raw["R"]) if "R" in raw else None
    if "rho" in raw:
        values["rho"] = _rho(raw["rho"], radius)
    elif radius is not None:
        raise ConfigError("R", "a radius certificate needs a specialization 'rho'")
    if "plan" in raw:
        if not isinstance(raw["plan"], list):
            raise ConfigError("plan", "expected a list of observable entries")
        values["plan"] = tuple(_entry(e) for e in raw["plan"])
    if "contours" in raw:
        if not isinstance(raw["contours"], list):
            raise ConfigError("contours", "expected one entry per level")
        values["contours"] = tuple(
            tuple(_circle(c) for c in level) if isinstance(level, list) else (_circle(level),)
            for level in raw["contours"]
        )
    if "partitions" in raw:
        if not isinstance(raw["partitions"], list):
            raise ConfigError("partitions", "expected a list of partitions")
        values["partitions"] = tuple(_partition(p) for p in raw["partitions"])
    if "points" in raw:
        if not isinstance(raw["points"], list):
            raise ConfigError("points", "expected a list of points")
        values["points"] = tuple(_scalars("points", p) for p in raw["points"])
    config = CheckConfig(**values)
    if config.a is not None:
        if config.N is not None and config.N != len(config.a):
            raise ConfigError("N", f"N = {config.N} but {len(config.a)} variables a_i are given")
        rho = config.rho or SpecializationRho.zero()
        # the ascending radius condition |a_i| R < 1, checked without (q, t)
        AscendingConfig(config.a, rho, Params(Fraction(1, 2), Fraction(0)))
    return config


# ---------------------------------------------------------------- outcomes and reports


@dataclass
class Outcome:
    """
    Result of one check on one (q, t) pair.

    Attributes
    ----------
    defect : Fraction
        Largest exact discrepancy, or interval width for bounded checks.
    contained : bool or None
        Interval containment for bounded checks; None for exact checks.
    oracle_defect : float
        Largest distance to a numeric quadrature.
    details : dict
        Values worth reporting.
    """

    defect: Fraction = Fraction(0)
    contained: bool | None = None
    oracle_defect: float = 0.0
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        exact = self.defect == 0 if self.contained is None else self.contained
        return exact and self.oracle_defect <= ORACLE_TOLERANCE


@dataclass(frozen=True)
class CheckReport:
    """
    The record of one check run, written as one line of the run log.

    Attributes
    ----------
    id : str
        Identity id.
    parameters : dict
        The full configuration; parsing it back replays the run.
    status : {"pass", "fail", "undecidable-contour", "degenerate-params"}
        Outcome.
    max_defect : str
        Exact discrepancy, or interval width for bounded checks.
    runtime_ms : float
        Wall time.
    engine : dict
        Residue plan digest and pole counts, largest oracle distance.
    details : list of dict
        Per (q, t) values.
    """

    id: str
    parameters: dict[str, Any]
    status: Status
    max_defect: str
    runtime_ms: float
    engine: dict[str, Any] = field(default_factory=dict)
    details: list[dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> ReportDict:
        return asdict(self)  # type: ignore[return-value]

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


class RunLog:
    """
    An append-only JSON-lines file of check reports.

    Writes from all threads of the process are serialized.
    """

    _lock = threading.Lock()

    def __init__(self, path: str | os.PathLike[str] | None = None) -> None:
        self.path = Path(path if path is not None else os.environ.get("MACLAB_LOG", DEFAULT_LOG))

    def append(self, report: CheckReport) -> None:
        line = report.to_json()
        with self._lock, self.path.open("a", encoding="utf-8") as f:
            f.write(line + "\n")

    def read(self) -> list[ReportDict]:
        if not self.path.exists():
            return []
        with self.path.open(encoding="utf-8") as f:
            return [json.loads(line) for line in f if line.strip()]


# ---------------------------------------------------------------- helpers shared by executors


def _rng(config: CheckConfig) -> np.random.Generator:
    return np.random.default_rng(config.seed)


def _random_substitution(alphabets: Iterable[str], config: CheckConfig) -> dict[str, SpecializationRho]:
    rng = _rng(config)
    return {
        name: SpecializationRho.finite([Fraction(int(rng.integers(1, 6)), 20), Fraction(int(rng.integers(1, 6)), 23)])
        for name in alphabets
    }


def _generic_points(n: int, count: int, config: CheckConfig) -> list[tuple[Fraction, ...]]:
    if config.points is not None:
        return [p for p in config.points if len(p) == n] or list(config.points)
    rng = _rng(config)
    points = []
    while len(points) < count:
        point = tuple(Fraction(int(rng.integers(2, 60)), 61) for _ in range(n))
        if len(set(point)) == n:
            points.append(point)
    return points


def _series_defect(left: AlphabetSeries, right: AlphabetSeries) -> Fraction:
    return (left - right).max_abs_coefficient()


def _symfunc_defect(left: SymFunc, right: SymFunc) -> Fraction:
    diff = left - right
    return max((abs(c) for c in diff.terms.values()), default=Fraction(0))


def _quadrature(integrand: Integrand) -> complex:
    return numeric_quadrature_oracle(integrand.numeric(), integrand.scheme, tolerance=1e-12)


def _scalar_oracle(integrand: Integrand, value: Fraction | complex) -> float:
    return abs(_quadrature(integrand) - complex(value))


def _formal_check(
    lhs: AlphabetSeries, integrand: Integrand, spec: ProcessSpec, config: CheckConfig, plan: ResiduePlan
) -> Outcome:
    """
    Compare a formal integral with its left side, and its specialization with quadrature.

    The quadrature sees the prefactor specialized before truncation, so the oracle compares
    against the integral without prefactor times the specialized prefactor.
    """
    integral = replace(integrand, prefactor=None).evaluate(plan=plan)
    assert isinstance(integral, AlphabetSeries)
    rhs = integral if integrand.prefactor is None else integral * integrand.prefactor
    substitution = _random_substitution(spec.alphabets, config)
    expected = specialize_all(integral, substitution)
    if integrand.prefactor is not None:
        expected *= specialize_all(integrand.prefactor, substitution)
    oracle = _scalar_oracle(integrand.specialize(substitution), expected)
    return Outcome(_series_defect(lhs, rhs), oracle_defect=oracle, details={"terms": len(rhs.terms)})


def _require_exact(rho: SpecializationRho, check: str) -> None:
    if not rho.is_exact:
        raise ConfigError("rho", f"{check} needs a finite or zero specialization")


def _ascending(config: CheckConfig, params: Params, N: int = 2) -> AscendingConfig:
    a = config.a if config.a is not None else DEFAULT_A[: config.N or N]
    rho = config.rho if config.rho is not None else SpecializationRho.finite([Fraction(1, 10)])
    return AscendingConfig(a, rho, params)


def _observable(config: CheckConfig, N: int, levels: Sequence[int], rs: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    levels = tuple(config.levels) if config.levels is not None else tuple(levels)
    rs = tuple(config.r) if config.r is not None else tuple(rs)
    AscendingObservable(levels, rs).validate(N)
    return levels, rs


def _max(values: Iterable[Fraction]) -> Fraction:
    return max(values, default=Fraction(0))


def _rational_text(x: Fraction) -> str:
    """
    Exact "num/den" text, or for very long rationals the nearest float above |x|.

    Widths of certified partial sums can exceed the integer-to-string conversion limit.
    """
    if max(x.numerator.bit_length(), x.denominator.bit_length()) <= EXACT_TEXT_BITS:
        return str(x)
    bound = math.nextafter(float(abs(x)), math.inf)
    return repr(bound if x >= 0 else -bound)


# ---------------------------------------------------------------- executors


def _mass_one(config: CheckConfig, params: Params, plan: ResiduePlan) -> Outcome:
    spec = ProcessSpec(config.N or 2, params, config.D)
    total = expectation_lhs(ObservablePlan(), spec)
    return Outcome((total - 1).max_abs_coefficient())


def _single_level(config: CheckConfig, params: Params, plan: ResiduePlan) -> Outcome:
    spec = ProcessSpec(1, params, config.D, ("X",), ("Y",))
    defect, oracle = Fraction(0), 0.0
    for r in config.r or (1, 2):
        lhs = expectation_lhs(ObservablePlan((ObservableEntry(1, r),)), spec)
        integrand = single_level_integrand(r, params, config.D)
        outcome = _formal_check(lhs, integrand, spec, config, plan)
        deformed = single_level_integrand(r, params, config.D, radius=Fraction(3, 5)).evaluate()
        swapped = lhs.rename({"X": "Y", "Y": "X"})
        defect = _max([defect, outcome.defect, _series_defect(lhs, deformed), _series_defect(lhs, swapped)])
        oracle = max(oracle, outcome.oracle_defect)
    return Outcome(defect, oracle_defect=oracle)


def _multilevel(config: CheckConfig, params: Params, plan: ResiduePlan) -> Outcome:
    orders: list[tuple[int, ...]] = [config.r] if config.r is not None else [(1, 0), (0, 1), (1, 1)]
    defect, oracle = Fraction(0), 0.0
    for rs in orders:
        spec = ProcessSpec(len(rs), params, config.D)
        lhs = expectation_lhs(ObservablePlan.from_levels(rs), spec)
        outcome = _formal_check(lhs, multilevel_integrand(spec, rs), spec, config, plan)
        defect, oracle = max(defect, outcome.defect), max(oracle, outcome.oracle_defect)
    return Outcome(defect, oracle_defect=oracle, details={"orders": [list(rs) for rs in orders]})


def _widened_blocks(spec: ProcessSpec, blocks: Sequence[tuple[int, int]], plan: ResiduePlan) -> AlphabetSeries:
    """
    A block integral rebuilt from a process with one extra level per block.

    Block (k, r) becomes a level with order r right after level k; every other level has
    order zero. The zero specialization of A^{i+1} and B^i then collapses each added level
    onto the one below it, and the surviving alphabets are renamed back.
    """
    rs: list[int] = []
    previous = 0
    for k, r in blocks:
        rs.extend([0] * (k - previous))
        rs.append(r)
        previous = k
    rs.extend([0] * (spec.N - previous))
    wide = ProcessSpec(len(rs), spec.params, spec.degree)
    series = multilevel_integrand(wide, rs).evaluate(plan=plan)
    assert isinstance(series, AlphabetSeries)
    zero = SpecializationRho.zero()
    for i in reversed([i for i, r in enumerate(rs, start=1) if r]):
        series = specialize(series, wide.a_names[i - 1], zero)
        series = specialize(series, wide.b_names[i - 2], zero)
        wide = drop_level(wide, i - 1)
    logger.debug("collapsed %d added levels onto %d", len(blocks), wide.N)
    return series.rename(dict(zip(wide.alphabets, spec.alphabets, strict=True))).reindex(spec.alphabets)


def _repeated_levels(config: CheckConfig, params: Params, plan: ResiduePlan) -> Outcome:
    if config.plan is not None:
        blocks = [(e.level, e.r) for e in sorted(config.plan, key=lambda e: e.level) for _ in range(e.multiplicity)]
    else:
        levels = config.levels or (1, 1)
        blocks = list(zip(levels, config.r or (1,) * len(levels), strict=True))
    spec = ProcessSpec(config.N or max(k for k, _ in blocks), params, config.D)
    lhs = expectation_lhs(ObservablePlan(tuple(ObservableEntry(k, r) for k, r in blocks if r)), spec)
    outcome = _formal_check(lhs, block_integrand(spec, blocks), spec, config, plan)
    active = [(k, r) for k, r in blocks if r]
    if active:
        widened = _widened_blocks(spec, active, plan)
        outcome.defect = max(outcome.defect, _series_defect(lhs, widened))
    return outcome


def _scaled(config: CheckConfig, params: Params, plan: ResiduePlan) -> Outcome:
    rs = config.r or (1, 1)
    scales = config.c or (Fraction(1, 2), Fraction(2, 3))[: len(rs)]
    if len(scales) != len(rs):
        raise ConfigError("c", f"{len(scales)} scale constants given for {len(rs)} levels")
    spec = ProcessSpec(len(rs), params, config.D)
    lhs = expectation_lhs(ObservablePlan(ObservablePlan.from_levels(rs).entries, tuple(scales)), spec)
    return _formal_check(lhs, scaled_integrand(spec, rs, scales), spec, config, plan)


def _appendix(config: CheckConfig, params: Params, plan: ResiduePlan) -> Outcome:
    spec = ProcessSpec(config.N or 2, params, config.D)
    lhs = expectation_lhs(ObservablePlan.from_levels([1] * spec.N, kind="O_hat_1"), spec)
    return _formal_check(lhs, appendix_integrand(spec), spec, config, plan)


def _bridge(config: CheckConfig, params: Params, plan: ResiduePlan) -> Outcome:
    asc = _ascending(config, params)
    _require_exact(asc.rho, "the truncated partition sum")
    levels, rs = _observable(config, asc.N, (asc.N,), (1,))
    chain = operator_chain_expectation(levels, rs, asc)
    interval, tail = truncated_expectation_lhs(
        AscendingObservable(levels, rs), asc, config.L, tolerance=config.tolerance
    )
    assert isinstance(chain, Fraction)
    return Outcome(
        interval.width,
        contained=interval.contains(chain),
        details={"chain": _rational_text(chain), "L": tail.L, "tail": float(tail.bound)},
    )


def _ascending_route(config: CheckConfig, params: Params, plan: ResiduePlan, *, hatted: bool) -> Outcome:
    asc = _ascending(config, params)
    levels, rs = _observable(config, asc.N, (asc.N, asc.N - 1 or 1), (1, 1))
    chain = operator_chain_expectation(levels, rs, asc, hatted=hatted)
    integrand = ascending_integrand(asc, levels, rs, hatted=hatted, contours=config.contours)
    if not asc.rho.is_exact:
        return Outcome(oracle_defect=_scalar_oracle(integrand, chain), details={"chain": str(chain)})
    value = integrand.evaluate(plan=plan)
    assert isinstance(value, Fraction) and isinstance(chain, Fraction)
    return Outcome(abs(value - chain), oracle_defect=_scalar_oracle(integrand, value), details={"value": _rational_text(value)})


def _thm_4_2(config: CheckConfig, params: Params, plan: ResiduePlan) -> Outcome:
    return _ascending_route(config, params, plan, hatted=False)


def _thm_4_3(config: CheckConfig, params: Params, plan: ResiduePlan) -> Outcome:
    return _ascending_route(config, params, plan, hatted=True)


def _q_whittaker(config: CheckConfig, params: Params, plan: ResiduePlan) -> Outcome:
    asc = _ascending(config, params)
    levels = tuple(config.levels) if config.levels is not None else (asc.N, asc.N - 1 or 1)
    chain = operator_chain_expectation(levels, (1,) * len(levels), asc)
    integrand = q_whittaker_integrand(asc, levels, contours=config.contours)
    if not asc.rho.is_exact:
        return Outcome(oracle_defect=_scalar_oracle(integrand, chain), details={"chain": str(chain)})
    value = integrand.evaluate(plan=plan)
    assert isinstance(value, Fraction) and isinstance(chain, Fraction)
    return Outcome(abs(value - chain), oracle_defect=_scalar_oracle(integrand, value), details={"value": _rational_text(value)})


def _partitions(config: CheckConfig, n: int, largest: int) -> list[Partition]:
    if config.partitions is not None:
        return [lam for lam in config.partitions if lam.length <= n]
    return [lam for lam in enumerate_partitions(largest) if lam.length <= n]


def _noumi_eigen(config: CheckConfig, params: Params, plan: ResiduePlan) -> Outcome:
    n = config.N or 2
    top = max(config.r or (2,))
    defects = []
    for lam in _partitions(config, n, 3):
        for r in range(top + 1):
            for point in _generic_points(n, 3, config):
                defects.append(abs(noumi_eigen_defect(lam, n, r, params, point)))
            q_value = evaluate(macdonald_Q(Partition((r,) if r else ()), params, r), spectrum(lam, n, params))
            defects.append(abs(q_value - noumi_eigenvalue(lam, n, r, params)))
    return Outcome(_max(defects), details={"instances": len(defects)})


def _operator_eigen(config: CheckConfig, params: Params, plan: ResiduePlan) -> Outcome:
    n = config.N or 2
    defects = []
    for lam in _partitions(config, n, 4):
        for r in range(n + 1):
            for point in _generic_points(n, 3, config):
                defects.append(abs(operator_eigen_defect(lam, n, r, params, point)))
    return Outcome(_max(defects), details={"instances": len(defects)})


def _qt_quadrature(r: int, asc: AscendingConfig) -> complex:
    """The u^r coefficient of the (q, t) Fredholm expansion with every integral done numerically."""
    return sum(
        (
            _quadrature(fredholm_qt_integrand(v, asc)) / math.factorial(k)
            for k in range(1, min(r, asc.N) + 1)
            for v in compositions(r, k)
        ),
        0j,
    )


def _qt_coefficients(config: CheckConfig, params: Params, plan: ResiduePlan) -> Outcome:
    asc = _ascending(config, params)
    _require_exact(asc.rho, "the (q, t) Fredholm expansion")
    top = max(config.r or (2,))
    coefficients, defects = [], []
    oracle = 0.0
    for r in range(top + 1):
        noumi = noumi_coefficient(r, asc)
        fredholm = fredholm_qt_coefficient(r, asc, plan=plan)
        coefficients.append(_rational_text(fredholm))
        defects.append(abs(Fraction(noumi) - fredholm))
        if r:
            oracle = max(oracle, abs(_qt_quadrature(r, asc) - complex(fredholm)))
    return Outcome(_max(defects), oracle_defect=oracle, details={"coefficients": coefficients})


def _qt_fredholm(config: CheckConfig, params: Params, plan: ResiduePlan) -> Outcome:
    outcome = _qt_coefficients(config, params, plan)
    asc = _ascending(config, params)
    top = max(config.r or (asc.N + 1,))
    extra = [
        abs(fredholm_qt_coefficient(r, asc, max_terms=r) - fredholm_qt_coefficient(r, asc))
        for r in range(asc.N + 1, top + 1)
    ]
    outcome.defect = _max([outcome.defect, *extra])
    return outcome


def _ek_fredholm(config: CheckConfig, params: Params, plan: ResiduePlan) -> Outcome:
    asc = _ascending(config, params)
    _require_exact(asc.rho, "the e_r Fredholm expansion")
    defects, coefficients = [], []
    oracle = 0.0
    for r in range(asc.N + 2):
        fredholm = fredholm_ek_coefficient(r, asc, plan=plan)
        coefficients.append(_rational_text(fredholm))
        if r <= asc.N:
            chain = operator_chain_expectation((asc.N,), (r,), asc)
            assert isinstance(chain, Fraction)
            defects.append(abs(fredholm - (-1) ** r * chain))
        else:
            defects.append(abs(fredholm))
        if 1 <= r <= asc.N:
            oracle = max(oracle, _scalar_oracle(fredholm_ek_integrand(r, asc), fredholm))
    return Outcome(_max(defects), oracle_defect=oracle, details={"coefficients": coefficients})


def _schur(config: CheckConfig, params: Params, plan: ResiduePlan) -> Outcome:
    equal = Params(params.q, params.q)
    defects = [
        _symfunc_defect(macdonald_P(lam, equal, lam.size), schur_jacobi_trudi(lam, lam.size))
        for lam in _partitions(config, config.D, config.D)
    ]
    return Outcome(_max(defects), details={"partitions": len(defects)})


def _pairing(config: CheckConfig, params: Params, plan: ResiduePlan) -> Outcome:
    rng = _rng(config)
    degree = config.D
    defects = []
    for _ in range(PAIRING_INSTANCES):
        exponentials = []
        for other in ("X", "Z"):
            weights = {
                k: AlphabetSeries.power_sum(other, k, degree) * Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 7)))
                for k in range(1, degree // 2 + 1)
            }
            exponentials.append(TruncatedExponential("Y", weights, degree))
        fast = alphabet_pair(exponentials[0], exponentials[1], "Y", params)
        slow = alphabet_pair(exponentials[0].expand(), exponentials[1].expand(), "Y", params)
        defects.append(_series_defect(fast, slow))
    return Outcome(_max(defects), details={"instances": len(defects)})


def _cauchy(config: CheckConfig, params: Params, plan: ResiduePlan) -> Outcome:
    return Outcome(_series_defect(cauchy_sum(params, config.D), kernel_series("Pi", ("X", "Y"), params, config.D)))


def _projection(config: CheckConfig, params: Params, plan: ResiduePlan) -> Outcome:
    spec = ProcessSpec(config.N or 2, params, config.D)
    defects = []
    for i in range(1, spec.N):
        reduced = drop_level(spec, i)
        for sequence in spec.sequences():
            projected = constant_term_projection(sequence, spec, i)
            if sequence[i - 1] == sequence[i]:
                expected = mp_weight(sequence[:i] + sequence[i + 1 :], reduced)
                defects.append(_series_defect(projected, expected))
            else:
                defects.append(projected.max_abs_coefficient())
    return Outcome(_max(defects), details={"sequences": len(defects)})


def _merging(config: CheckConfig, params: Params, plan: ResiduePlan) -> Outcome:
    spec = ProcessSpec(config.N or 2, params, config.D)
    if spec.N < 2:
        raise ConfigError("N", "merging needs at least two levels")
    shorter = ProcessSpec(spec.N - 1, params, config.D)
    defects = [
        _series_defect(merge_levels(rest, spec, i), merged_weight(rest, spec, i))
        for i in range(1, spec.N + 1)
        for rest in shorter.sequences()
    ]
    return Outcome(_max(defects), details={"instances": len(defects)})


# ---------------------------------------------------------------- registry


@dataclass(frozen=True)
class IdentityCheck:
    """
    A registered identity.

    Attributes
    ----------
    id : str
        Registry id.
    citation : str
        The statement checked.
    executor : callable
        Runs the check on one (q, t) pair.
    defaults : mapping
        Configuration used when none is given.
    """

    id: str
    citation: str
    executor: Callable[[CheckConfig, Params, ResiduePlan], Outcome]
    defaults: Mapping[str, Any] = field(default_factory=dict)


_ZERO_T_GRID = [["1/3", "0"], ["1/2", "0"]]
_DEFAULT_A_TEXT = [str(x) for x in DEFAULT_A]

_REGISTRY: dict[str, IdentityCheck] = {
    check.id: check
    for check in (
        IdentityCheck("mass-one", "formal Macdonald process weights sum to one", _mass_one, {"N": 2}),
        IdentityCheck(
            "prop-3.4", "E[O_r] under the formal Macdonald measure as a single-level contour integral", _single_level, {"r": [1, 2]}
        ),
        IdentityCheck(
            "thm-3.3", "E[prod O_{r_m}(lambda^m)] under the formal process as a nested contour integral", _multilevel, {"D": 4}
        ),
        IdentityCheck(
            "cor-3.6", "products of observables on repeated levels as a block contour integral", _repeated_levels, {"levels": [1, 1], "r": [1, 1], "D": 4}
        ),
        IdentityCheck(
            "cor-3.7", "observables weighted by c_i^{|lambda^i|} through scaled alphabets", _scaled, {"r": [1, 1], "c": ["1/2", "2/3"], "D": 4}
        ),
        IdentityCheck("thm-B.1", "E[prod O_hat_1(lambda^alpha)] as a nested contour integral", _appendix, {"N": 2, "D": 4}),
        IdentityCheck(
            "prop-4.1-bridge", "difference operators on Pi against the truncated partition sum with a certified tail", _bridge, {"levels": [2], "r": [1]}
        ),
        IdentityCheck(
            "thm-4.2", "ascending e_r(q^lambda t^{n-j}) moments as nested contour integrals", _thm_4_2, {"levels": [2, 1], "r": [1, 1]}
        ),
        IdentityCheck(
            "thm-4.3", "ascending e_r(q^{-lambda} t^{j-n}) moments as nested contour integrals", _thm_4_3, {"levels": [2, 1], "r": [1, 1]}
        ),
        IdentityCheck(
            "cor-4.7", "q-Whittaker moments E[prod q^{lambda_n}] as nested contour integrals", _q_whittaker, {"levels": [2, 1], "grid": _ZERO_T_GRID}
        ),
        IdentityCheck("prop-4.11", "Noumi q-integral operator eigenrelation, coefficientwise in u", _noumi_eigen, {"N": 3, "r": [3]}),
        IdentityCheck("prop-4.12", "Noumi operator on Pi equals the (q,t) Fredholm determinant", _qt_coefficients, {"a": _DEFAULT_A_TEXT, "r": [2]}),
        IdentityCheck(
            "thm-4.10", "(q,t) Fredholm determinant of the Macdonald measure, terminating after N terms", _qt_fredholm, {"a": _DEFAULT_A_TEXT, "r": [3]}
        ),
        IdentityCheck("thm-4.14", "e_r Fredholm determinant against the Macdonald difference operators", _ek_fredholm, {"a": _DEFAULT_A_TEXT}),
        IdentityCheck(
            "schur-degeneration", "P_lambda at q = t against the Jacobi-Trudi determinant", _schur, {"D": 5, "grid": [["1/3", "1/5"]]}
        ),
        IdentityCheck("pairing-prop-2.3", "closed-form pairing of exponentials against term-by-term pairing", _pairing, {"D": 4}),
        IdentityCheck("macdonald-operator-eigen", "Macdonald difference operator eigenrelation", _operator_eigen, {"N": 3}),
        IdentityCheck("cauchy-identity", "sum P_lambda(X) Q_lambda(Y) equals Pi(X; Y)", _cauchy, {"D": 4}),
        IdentityCheck("prop-3.6", "zero specialization of A^{i+1}, B^i drops a level", _projection, {"N": 2, "D": 4}),
        IdentityCheck("prop-3.7", "summing out a level unites neighbouring alphabets", _merging, {"N": 2, "D": 4}),
    )
}


def list_identities() -> list[IdentityCheck]:
    """Every registered identity, in registration order."""
    return list(_REGISTRY.values())


def get_identity(identity_id: str) -> IdentityCheck:
    """
    Raises
    ------
    ConfigError
        If the id is not registered.
    """
    try:
        return _REGISTRY[identity_id]
    except KeyError:
        raise ConfigError("id", f"unknown identity {identity_id!r}; see `maclab list`") from None


def resolve_config(identity_id: str, overrides: Mapping[str, Any] | None = None) -> CheckConfig:
    """The identity's default configuration updated by `overrides`."""
    return parse_config({**get_identity(identity_id).defaults, **(overrides or {})})


def run_check(identity_id: str, config: CheckConfig | None = None, *, log: RunLog | None = None) -> CheckReport:
    """
    Run one identity check on every (q, t) pair of its configuration.

    Parameters
    ----------
    identity_id : str
        Registry id.
    config : CheckConfig, optional
        Configuration; the identity's defaults when omitted.
    log : RunLog, optional
        Run log receiving the report.

    Returns
    -------
    CheckReport
        The report; precondition failures become statuses, never exceptions.

    Raises
    ------
    ConfigError
        If the id is unknown or the configuration does not fit the identity.
    """
    check = get_identity(identity_id)
    if config is None:
        config = resolve_config(identity_id)
    logger.info("running %s on %d parameter pairs", identity_id, len(config.pairs()))
    start = time.perf_counter()
    plan = ResiduePlan()
    status: Status = "pass"
    defect = Fraction(0)
    oracle = 0.0
    details: list[dict[str, Any]] = []
    try:
        for q, t in config.pairs():
            outcome = check.executor(config, Params(q, t), plan)
            defect = max(defect, outcome.defect)
            oracle = max(oracle, outcome.oracle_defect)
            details.append({"q": str(q), "t": str(t), "passed": outcome.passed, **outcome.details})
            if not outcome.passed:
                status = "fail"
    except ContourError as exc:
        status = "undecidable-contour"
        details.append({"error": str(exc)})
    except (ParameterError, ParameterDegeneracyError, PoleCollisionError, HigherOrderPoleError) as exc:
        status = "degenerate-params"
        details.append({"error": str(exc)})
    except ConvergenceError as exc:
        status = "fail"
        details.append({"error": str(exc)})
    except ConfigError:
        raise
    except MaclabError as exc:
        status = "fail"
        details.append({"error": str(exc)})
    engine: dict[str, Any] = {"oracle_defect": oracle}
    if plan.decisions:
        engine["residue_plan"] = plan.digest()
        engine["poles"] = plan.summary()
    report = CheckReport(
        id=identity_id,
        parameters=config.get_config(),
        status=status,
        max_defect=_rational_text(defect),
        runtime_ms=round((time.perf_counter() - start) * 1000, 3),
        engine=engine,
        details=details,
    )
    logger.info("%s: %s (max defect %s)", identity_id, status, report.max_defect)
    if log is not None:
        log.append(report)
    return report
