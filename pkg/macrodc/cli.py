"""
Command-line driver.

Exit codes: 0 success, 1 validation error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import TYPE_CHECKING, NoReturn

import polars as pl
from pydantic import ValidationError

from macrodc.common_utils import (
    configure_logging,
    prepare_output_dir,
    settings,
    timed,
    write_model,
    write_run_info,
    write_table,
)
from macrodc.econ_model import downtime_reduction
from macrodc.errors import DomainError, MacroDCError, ScenarioError
from macrodc.fleet.simulation import compare_redundancy, run
from macrodc.fleet.trace import trace_frame, write_trace
from macrodc.reporting import (
    ArchitectureComparison,
    Report,
    SweepRow,
    metadata,
    render,
    tables,
)
from macrodc.scenario_file import (
    override,
    parse_scenario,
    scenario_schema,
    set_parameter,
)

if TYPE_CHECKING:
    from collections.abc import Sequence

    from macrodc.fleet.scenario import Scenario
    from settings import OutputFormat

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def _emit(report: Report, out: Path, fmt: OutputFormat) -> None:
    if not settings.report.include_series and report.metrics is not None:
        report = report.model_copy(
            update={"metrics": report.metrics.model_copy(update={"replications": ()})}
        )
    write_model(report, out / settings.paths.report_filename)
    for name, frame in tables(report).items():
        write_table(frame, out / f"{name}.csv")
    print(render(report, fmt, settings.report.table_rows))


def cmd_simulate(
    scenario: Scenario, out: Path, fmt: OutputFormat = "table"
) -> Report:
    """Run the fleet simulation and write report, tables and traces."""
    with timed(f"Simulate {scenario.name}") as timer:
        traces, metrics = run(
            scenario,
            workers=settings.run.workers,
            keep_traces=settings.run.write_traces,
        )
    if settings.run.write_traces:
        write_trace(
            trace_frame(sorted(traces.items())), out / settings.paths.trace_filename
        )
    write_table(metrics.frame(), out / "replications.csv")
    report = Report(metadata=metadata(scenario, "simulate"), metrics=metrics)
    _emit(report, out, fmt)
    write_run_info(out, "simulate", timer.took)
    return report


def cmd_compare(scenario: Scenario, out: Path, fmt: OutputFormat = "table") -> Report:
    """Conventional vs modular cost and downtime, plus both redundancy strategies."""
    with timed(f"Compare {scenario.name}") as timer:
        _, metrics = run(scenario, workers=settings.run.workers, keep_traces=False)
        redundancy = None
        if len(scenario.sites) >= 2:
            redundancy = compare_redundancy(scenario, workers=settings.run.workers)
        else:
            logger.info("single site: skipping the redundancy strategy comparison")

    conventional = metrics.tco["conventional"]
    modular = metrics.tco["modular"]
    theirs = conventional.model_dump()
    econ = scenario.econ
    architectures = ArchitectureComparison(
        conventional=conventional,
        modular=modular,
        delta={c: v - theirs[c] for c, v in modular.model_dump().items()},
        downtime_hours_per_year=dict(metrics.downtime_hours_per_year),
        downtime_reduction=downtime_reduction(
            econ.admin_error_share, econ.admin_error_elimination
        ),
        shortfall_hours={
            "conventional": metrics.mean("conventional_shortfall_hours"),
            "modular": metrics.mean("shortfall_hours"),
        },
        conventional_build_time=econ.conventional_build_time,
    )
    report = Report(
        metadata=metadata(scenario, "compare"),
        metrics=metrics,
        architectures=architectures,
        redundancy=redundancy,
    )
    _emit(report, out, fmt)
    write_run_info(out, "compare", timer.took)
    return report


def cmd_sweep(
    scenario: Scenario,
    parameter_path: str,
    values: Sequence[float],
    out: Path,
    fmt: OutputFormat = "table",
) -> Report:
    """One row per value of a numeric scenario field, on common random numbers."""
    if not values:
        msg = "a sweep needs at least one value"
        raise ScenarioError(msg, path="values")
    # Validate every row before spending time on any of them
    variants = [(v, set_parameter(scenario, parameter_path, v)) for v in values]
    rows = []
    series = []
    with timed(f"Sweep {parameter_path} over {len(values)} values") as timer:
        for value, variant in variants:
            _, metrics = run(variant, workers=settings.run.workers, keep_traces=False)
            rows.append(
                SweepRow(
                    value=value,
                    summary=metrics.summary,
                    tco_modular=metrics.tco["modular"].total,
                    tco_conventional=metrics.tco["conventional"].total,
                    stranded_cost=sum(
                        s.provisioning.stranded_cost for s in metrics.sites
                    ),
                    wasted_floor_cost=sum(
                        s.provisioning.wasted_floor_cost for s in metrics.sites
                    ),
                )
            )
            series.append(metrics.frame().with_columns(pl.lit(value).alias("value")))

    pl.concat(series).write_ndjson(out / "sweep_series.ndjson")
    report = Report(
        metadata=metadata(scenario, "sweep"),
        sweep_parameter=parameter_path,
        sweep=tuple(rows),
    )
    _emit(report, out, fmt)
    write_run_info(out, "sweep", timer.took)
    return report


def _parse_values(text: str) -> list[float]:
    """Comma separated numbers, or ``start:stop:count`` for an even grid."""
    if text.count(":") == 2:
        start, stop, count = text.split(":")
        n = int(count)
        if n < 1:
            msg = "a sweep grid needs at least one point"
            raise argparse.ArgumentTypeError(msg)
        if n == 1:
            return [float(start)]
        step = (float(stop) - float(start)) / (n - 1)
        return [float(start) + i * step for i in range(n)]
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        msg = f"cannot parse sweep values {text!r}"
        raise argparse.ArgumentTypeError(msg) from None
    if not values:
        msg = f"no sweep values in {text!r}"
        raise argparse.ArgumentTypeError(msg)
    return values


class _ArgumentParser(argparse.ArgumentParser):
    """Bad arguments are validation errors, not runtime errors."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="macrodc",
        description="Simulate and cost container-based data center fleets.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--scenario",
        type=Path,
        required=True,
        help="Scenario file (YAML)",
        metavar="<path>",
    )
    common.add_argument(
        "--seed",
        type=int,
        default=None,
        help="Override the scenario seed",
        metavar="<u64>",
    )
    common.add_argument(
        "--replications",
        type=int,
        default=settings.run.replications,
        help="Override the scenario replication count",
        metavar="<n>",
    )
    common.add_argument(
        "--out",
        type=Path,
        default=settings.paths.output,
        help="Output directory, created when missing",
        metavar="<dir>",
    )
    common.add_argument(
        "--format",
        choices=["table", "csv", "json-doc"],
        default=settings.report.format,
        help="Rendering printed to stdout",
    )

    commands.add_parser(
        "simulate",
        parents=[common],
        help="Run the fleet simulation",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    commands.add_parser(
        "compare",
        parents=[common],
        help="Compare architectures and redundancy strategies",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sweep = commands.add_parser(
        "sweep",
        parents=[common],
        help="Sweep one numeric scenario field",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sweep.add_argument(
        "--parameter",
        required=True,
        help="Dotted path of the field, e.g. module.system.annual_failure_prob",
        metavar="<path>",
    )
    sweep.add_argument(
        "--values",
        type=_parse_values,
        required=True,
        help="Comma separated values or start:stop:count",
        metavar="<values>",
    )
    commands.add_parser("schema", help="Print the scenario JSON schema")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging()

    if args.command == "schema":
        print(scenario_schema())
        return EXIT_OK

    try:
        scenario = override(
            parse_scenario(args.scenario),
            seed=args.seed,
            replications=args.replications,
        )
        out = prepare_output_dir(args.out)
        if args.command == "simulate":
            cmd_simulate(scenario, out, args.format)
        elif args.command == "compare":
            cmd_compare(scenario, out, args.format)
        else:
            cmd_sweep(scenario, args.parameter, args.values, out, args.format)
    except (ScenarioError, DomainError, ValidationError) as exc:
        logger.error("invalid input: %s", exc)  # noqa: TRY400
        return EXIT_VALIDATION
    except (MacroDCError, OSError) as exc:
        logger.error("run failed: %s", exc)  # noqa: TRY400
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
