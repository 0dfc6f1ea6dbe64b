from __future__ import annotations

import json
from fractions import Fraction
from typing import TYPE_CHECKING, Any

import pytest

from maclab import harness
from maclab.contour import ResiduePlan
from maclab.errors import ConfigError, RadiusViolationError
from maclab.harness import (
    DEFAULT_GRID,
    CheckReport,
    RunLog,
    _rational_text,
    _widened_blocks,
    get_identity,
    list_identities,
    parse_config,
    resolve_config,
    run_check,
)
from maclab.process import ObservableEntry, ObservablePlan, ProcessSpec, expectation_lhs
from maclab.quadrature import numeric_quadrature_oracle

if TYPE_CHECKING:
    from pathlib import Path

    from maclab.core import Params

SINGLE = [["1/3", "1/5"]]


def test_parse_rationals() -> None:
    config = parse_config({"q": "1/3", "t": "1/5", "a": ["1/10", "1/11"]})
    assert config.pairs() == [(Fraction(1, 3), Fraction(1, 5))]
    assert config.a == (Fraction(1, 10), Fraction(1, 11))
    assert config.D == 4


def test_grid_is_default() -> None:
    assert parse_config({}).pairs() == list(DEFAULT_GRID)


def test_parse_file(tmp_path: Path) -> None:
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"D": 3, "rho": {"kind": "finite", "b": ["1/7"]}}), encoding="utf-8")
    config = parse_config(path)
    assert config.D == 3
    assert config.rho is not None
    assert config.rho.radius == Fraction(1, 7)


@pytest.mark.parametrize(
    ("raw", "key"),
    [
        ({"bogus": 1}, "bogus"),
        ({"q": "0.5"}, "q"),
        ({"q": 0.5}, "q"),
        ({"D": -1}, "D"),
        ({"R": "1/2"}, "R"),
        ({"N": 3, "a": ["1/10"]}, "N"),
        ({"rho": {"kind": "gaussian"}}, "rho"),
        ({"contours": [[{"center": "0"}]]}, "contours"),
        ({"partitions": ["2,x"]}, "partitions"),
    ],
)
def test_config_errors_name_the_key(raw: dict[str, object], key: str) -> None:
    with pytest.raises(ConfigError, match=f"^{key}:"):
        parse_config(raw)


def test_config_radius_violation() -> None:
    with pytest.raises(RadiusViolationError):
        parse_config({"a": ["3"], "rho": {"kind": "finite", "b": ["1/2"]}})
    with pytest.raises(RadiusViolationError):
        parse_config({"rho": {"kind": "finite", "b": ["1/2"]}, "R": "1/3"})


def test_config_roundtrip() -> None:
    raw = {
        "q": "1/3",
        "t": "1/5",
        "a": ["1/10"],
        "rho": {"kind": "finite", "b": ["1/7"]},
        "levels": [1],
        "r": [1],
        "contours": [[{"center": "1/10", "radius": "1/100"}]],
        "partitions": ["2,1"],
    }
    config = parse_config(raw)
    assert parse_config(config.get_config()) == config


def test_registry() -> None:
    identities = list_identities()
    ids = [check.id for check in identities]
    assert len(identities) >= 15
    assert len(set(ids)) == len(ids)
    assert "thm-4.10" in ids
    assert all(check.citation for check in identities)
    with pytest.raises(ConfigError, match="^id:"):
        get_identity("thm-9.9")


def test_every_default_parses() -> None:
    for check in list_identities():
        resolve_config(check.id)


def test_mass_one_passes() -> None:
    report = run_check("mass-one")
    assert report.status == "pass"
    assert report.max_defect == "0"
    assert len(report.details) == len(DEFAULT_GRID)


def test_report_replays() -> None:
    report = run_check("cauchy-identity", resolve_config("cauchy-identity", {"D": 3, "grid": SINGLE}))
    decoded = json.loads(report.to_json())
    assert set(decoded) == {"id", "parameters", "status", "max_defect", "runtime_ms", "engine", "details"}
    replay = run_check(decoded["id"], parse_config(decoded["parameters"]))
    assert replay.status == report.status
    assert replay.max_defect == report.max_defect


def test_residue_plan_is_reported() -> None:
    config = resolve_config("thm-4.2", {"grid": SINGLE})
    report = run_check("thm-4.2", config)
    assert report.status == "pass", report.details
    assert report.engine["oracle_defect"] <= 1e-8
    assert len(report.engine["residue_plan"]) == 16
    assert report.engine["poles"]["inside"] > 0


def test_bridge_contains_chain() -> None:
    config = resolve_config("prop-4.1-bridge", {"grid": SINGLE, "tolerance": "1/1000000"})
    report = run_check("prop-4.1-bridge", config)
    assert report.passed
    assert "chain" in report.details[0]


def test_contradictory_contours_are_undecidable() -> None:
    config = resolve_config(
        "thm-4.2",
        {"a": ["1/10"], "levels": [1], "r": [1], "grid": SINGLE, "contours": [[{"center": "0", "radius": "1/10"}]]},
    )
    report = run_check("thm-4.2", config)
    assert report.status == "undecidable-contour"
    assert "error" in report.details[-1]


def test_zero_t_is_degenerate_for_inverted_operators() -> None:
    config = resolve_config("thm-4.3", {"grid": [["1/3", "0"]]})
    assert run_check("thm-4.3", config).status == "degenerate-params"


def test_mismatched_configuration_raises() -> None:
    with pytest.raises(ConfigError, match="^N:"):
        run_check("prop-3.7", resolve_config("prop-3.7", {"N": 1}))


def test_run_log(tmp_path: Path) -> None:
    log = RunLog(tmp_path / "runs.jsonl")
    assert log.read() == []
    config = resolve_config("cauchy-identity", {"D": 2, "grid": SINGLE})
    run_check("cauchy-identity", config, log=log)
    run_check("cauchy-identity", config, log=log)
    records = log.read()
    assert [r["id"] for r in records] == ["cauchy-identity", "cauchy-identity"]
    assert records[0]["status"] == "pass"


def test_run_log_environment(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("MACLAB_LOG", str(tmp_path / "env.jsonl"))
    assert RunLog().path == tmp_path / "env.jsonl"


def test_report_passed() -> None:
    report = CheckReport("x", {}, "undecidable-contour", "0", 1.0)
    assert not report.passed


def test_observable_level_beyond_process_is_a_config_error() -> None:
    config = resolve_config("cor-3.6", {"N": 1, "levels": [1, 2], "r": [1, 1], "grid": SINGLE})
    with pytest.raises(ConfigError, match="^levels:"):
        run_check("cor-3.6", config)


def test_widened_process_collapses_to_repeated_level(base_params: Params) -> None:
    spec = ProcessSpec(1, base_params, 3)
    squared = ObservablePlan((ObservableEntry(1, 1, multiplicity=2),))
    widened = _widened_blocks(spec, [(1, 1), (1, 1)], ResiduePlan())
    assert widened == expectation_lhs(squared, spec)


@pytest.mark.slow
def test_widened_process_with_a_level_between(base_params: Params) -> None:
    spec = ProcessSpec(2, base_params, 3)
    plan = ObservablePlan((ObservableEntry(1, 1),))
    assert _widened_blocks(spec, [(1, 1)], ResiduePlan()) == expectation_lhs(plan, spec)


def test_long_rationals_are_reported_as_bounds() -> None:
    assert _rational_text(Fraction(-2, 3)) == "-2/3"
    tiny = Fraction(1, 10**5000)
    text = _rational_text(tiny)
    assert "/" not in text
    assert float(text) > 0
    assert _rational_text(-tiny) == "-" + text
    wide = Fraction(3**7000 + 1, 3**7000)
    assert 1 <= float(_rational_text(wide)) < 1 + 1e-15


def test_fredholm_checks_run_quadrature(monkeypatch: pytest.MonkeyPatch) -> None:
    calls: list[Any] = []

    def counting(*args: Any, **kwargs: Any) -> complex:
        calls.append(args[1])
        return numeric_quadrature_oracle(*args, **kwargs)

    monkeypatch.setattr(harness, "numeric_quadrature_oracle", counting)
    two = {"a": ["1/10", "1/11"], "grid": SINGLE}
    assert run_check("prop-4.12", resolve_config("prop-4.12", {**two, "r": [2]})).passed
    # (1), then (2) and (1, 1)
    assert len(calls) == 3
    calls.clear()
    assert run_check("thm-4.14", resolve_config("thm-4.14", two)).passed
    # one e_r integral for each r = 1, 2
    assert len(calls) == 2


REDUCED = {
    "prop-3.4": {"D": 3},
    "thm-3.3": {"D": 3, "r": [1, 1]},
    "cor-3.6": {"D": 3},
    "cor-3.7": {"D": 3},
    "thm-B.1": {"D": 3},
    "cor-4.7": {"grid": [["1/3", "0"]]},
    "prop-4.11": {"N": 2, "r": [2]},
    "prop-4.12": {"a": ["1/10", "1/11"], "r": [2]},
    "thm-4.10": {"a": ["1/10", "1/11"], "r": [2]},
    "thm-4.14": {"a": ["1/10", "1/11"]},
    "schur-degeneration": {"D": 4},
    "pairing-prop-2.3": {"D": 3},
    "macdonald-operator-eigen": {"N": 2},
    "prop-3.6": {"D": 3},
}


@pytest.mark.parametrize("identity_id", sorted(REDUCED))
def test_reduced_checks_pass(identity_id: str) -> None:
    config = resolve_config(identity_id, {"grid": SINGLE, **REDUCED[identity_id]})
    report = run_check(identity_id, config)
    assert report.status == "pass", report.details
    assert report.engine["oracle_defect"] <= 1e-8


FAST = {"mass-one", "cauchy-identity", "schur-degeneration", "prop-3.6", "prop-3.7", "pairing-prop-2.3"}


@pytest.mark.parametrize(
    "identity_id",
    [
        pytest.param(check.id, marks=() if check.id in FAST else pytest.mark.slow)
        for check in list_identities()
    ],
)
def test_registered_defaults_pass(identity_id: str) -> None:
    report = run_check(identity_id)
    assert report.status == "pass", report.details
    json.loads(report.to_json())


@pytest.mark.slow
def test_bridge_at_full_size() -> None:
    overrides = {
        "a": ["1/10", "1/11", "1/12"],
        "levels": [3, 2],
        "r": [2, 1],
        "tolerance": "1/10000000000000",
        "grid": SINGLE,
    }
    report = run_check("prop-4.1-bridge", resolve_config("prop-4.1-bridge", overrides))
    assert report.status == "pass", report.details
    assert float(report.max_defect) < 1e-12
    assert json.loads(report.to_json())["max_defect"] == report.max_defect
