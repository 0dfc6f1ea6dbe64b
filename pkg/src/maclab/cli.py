"""
Command-line front end: ``maclab list``, ``maclab check`` and ``maclab compute``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import TYPE_CHECKING, Any

from maclab.core import Params, Partition, parse_scalar
from maclab.errors import ConfigError, MaclabError, ParameterError
from maclab.harness import RunLog, get_identity, list_identities, resolve_config, run_check
from maclab.symfunc import format_polynomial, macdonald_P, macdonald_Q, restrict_to_vars, skew_P, skew_Q

if TYPE_CHECKING:
    from collections.abc import Sequence

    from maclab.harness import CheckReport

__all__ = ["main"]

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_UNDECIDABLE = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="maclab", description="Exact checks of Macdonald process identities.")
    parser.add_argument("--verbose", action="store_true", help="Log residue decisions at DEBUG level.")
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("list", help="List registered identities with their citations and defaults.")

    check = commands.add_parser("check", help="Run identity checks and append reports to the run log.")
    target = check.add_mutually_exclusive_group(required=True)
    target.add_argument("--id", dest="identity", help="Identity id, see `maclab list`.")
    target.add_argument("--all", action="store_true", help="Run every registered identity on its defaults.")
    check.add_argument("--config", type=Path, help="JSON configuration; overrides the identity defaults.")
    check.add_argument("--degree", type=int, help="Truncation order D.")
    check.add_argument("--seed", type=int, help="Seed for random points and specializations.")
    check.add_argument("--log", type=Path, help="Run log path (default: $MACLAB_LOG or maclab-runs.jsonl).")

    compute = commands.add_parser("compute", help="Print a Macdonald polynomial in finitely many variables.")
    compute.add_argument("function", choices=["P", "Q", "skewP", "skewQ"])
    compute.add_argument("--partition", required=True, help='Partition such as "2,1".')
    compute.add_argument("--mu", default="", help="Inner partition of a skew function.")
    compute.add_argument("--vars", type=int, required=True, help="Number of variables.")
    compute.add_argument("--q", required=True, help='q as a rational such as "1/3".')
    compute.add_argument("--t", required=True, help='t as a rational such as "1/5".')
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    overrides: dict[str, Any] = {}
    if args.config is not None:
        try:
            loaded = json.loads(args.config.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError("config", f"cannot read {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"{args.config} is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config", "the configuration must be a JSON object")
        overrides.update(loaded)
    if args.degree is not None:
        overrides["D"] = args.degree
    if args.seed is not None:
        overrides["seed"] = args.seed
    return overrides


def exit_code(reports: Sequence[CheckReport]) -> int:
    """1 if any check failed or hit degenerate parameters, else 3 if any was undecidable, else 0."""
    statuses = {report.status for report in reports}
    if statuses & {"fail", "degenerate-params"}:
        return EXIT_FAIL
    if "undecidable-contour" in statuses:
        return EXIT_UNDECIDABLE
    return EXIT_PASS


def _list() -> int:
    for check in list_identities():
        defaults = json.dumps(dict(check.defaults), sort_keys=True)
        print(f"{check.id:26} {check.citation}")
        print(f"{'':26} defaults: {defaults}")
    return EXIT_PASS


def _check(args: argparse.Namespace) -> int:
    log = RunLog(args.log)
    overrides = _overrides(args)
    ids = [check.id for check in list_identities()] if args.all else [get_identity(args.identity).id]
    reports = []
    for identity_id in ids:
        report = run_check(identity_id, resolve_config(identity_id, overrides), log=log)
        reports.append(report)
        print(f"[{report.status}] {identity_id} max_defect={report.max_defect} ({report.runtime_ms:.0f} ms)")
    print(f"{sum(r.passed for r in reports)}/{len(reports)} passed; reports appended to {log.path}")
    return exit_code(reports)


def _compute(args: argparse.Namespace) -> int:
    try:
        params = Params(parse_scalar(args.q), parse_scalar(args.t))
    except (ValueError, ParameterError) as exc:
        raise ConfigError("q", str(exc)) from exc
    try:
        lam = Partition.from_string(args.partition)
        mu = Partition.from_string(args.mu)
    except ValueError as exc:
        raise ConfigError("partition", str(exc)) from exc
    if args.vars < 1:
        raise ConfigError("vars", f"need at least one variable, got {args.vars}")
    if args.function == "P":
        f = macdonald_P(lam, params, lam.size)
    elif args.function == "Q":
        f = macdonald_Q(lam, params, lam.size)
    elif args.function == "skewP":
        f = skew_P(lam, mu, params, lam.size)
    else:
        f = skew_Q(lam, mu, params, lam.size)
    print(format_polynomial(restrict_to_vars(f, args.vars)))
    return EXIT_PASS


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    try:
        if args.command == "list":
            return _list()
        if args.command == "check":
            return _check(args)
        return _compute(args)
    except ConfigError as exc:
        print(f"[error] {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MaclabError as exc:
        print(f"[error] {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
