"""
Report documents and the tables rendered from them.

Table builders only select and reshape fields that already exist on the
report models; every number they print is stored in the report document.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

import polars as pl
from pydantic import BaseModel, ConfigDict

import macrodc
from macrodc.econ_model import CAPEX_COMPONENTS, OPEX_COMPONENTS, CostBreakdown
from macrodc.failure_engine import RNG_IDENTITY
from macrodc.fleet.simulation import Metrics, RedundancyComparison, SummaryStat
from macrodc.power_floor import DensityPreset
from macrodc.scenario_file import scenario_document

if TYPE_CHECKING:
    from macrodc.fleet.scenario import Scenario
    from settings import OutputFormat

NOTES = (
    "Facility cost defaults to $10/W: an inferred pairing of a $150M facility "
    "with a typical 15 MW facility, not a stated figure.",
    "geo_failover migrates load instantaneously and without latency; "
    "latency tolerance is not modeled.",
    "Energy follows served system-hours; idle spare capacity draws no power.",
    DensityPreset.annotation(),
)


class ReportMetadata(BaseModel):
    model_config = ConfigDict(frozen=True)

    tool_version: str
    command: str
    seed: int
    replications: int
    rng: str
    scenario: dict[str, Any]
    notes: tuple[str, ...] = NOTES


class ArchitectureComparison(BaseModel):
    model_config = ConfigDict(frozen=True)

    conventional: CostBreakdown
    modular: CostBreakdown
    # modular minus conventional, per component and for the totals
    delta: dict[str, float]
    downtime_hours_per_year: dict[str, float]
    downtime_reduction: float
    # mean system-hours of unmet demand; conventional counts nothing served
    # before the facility is built
    shortfall_hours: dict[str, float]
    conventional_build_time: float


class SweepRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float
    summary: dict[str, SummaryStat]
    tco_modular: float
    tco_conventional: float
    stranded_cost: float
    wasted_floor_cost: float


class Report(BaseModel):
    model_config = ConfigDict(frozen=True)

    metadata: ReportMetadata
    metrics: Metrics | None = None
    architectures: ArchitectureComparison | None = None
    redundancy: RedundancyComparison | None = None
    sweep_parameter: str | None = None
    sweep: tuple[SweepRow, ...] = ()


def metadata(scenario: Scenario, command: str) -> ReportMetadata:
    return ReportMetadata(
        tool_version=macrodc.__version__,
        command=command,
        seed=scenario.seed,
        replications=scenario.replications,
        rng=RNG_IDENTITY,
        scenario=scenario_document(scenario),
    )


def summary_table(summary: dict[str, SummaryStat]) -> pl.DataFrame:
    return pl.DataFrame(
        {
            "metric": list(summary),
            "mean": [s.mean for s in summary.values()],
            "standard_error": [s.standard_error for s in summary.values()],
        },
        schema={"metric": pl.String, "mean": pl.Float64, "standard_error": pl.Float64},
    )


def tco_table(breakdowns: dict[str, CostBreakdown]) -> pl.DataFrame:
    rows = [*CAPEX_COMPONENTS, *OPEX_COMPONENTS, "capex", "opex", "total"]
    dumped = {name: b.model_dump() for name, b in breakdowns.items()}
    return pl.DataFrame(
        {
            "component": rows,
            **{name: [d[r] for r in rows] for name, d in dumped.items()},
        }
    )


def comparison_table(comparison: ArchitectureComparison) -> pl.DataFrame:
    frame = tco_table(
        {"conventional": comparison.conventional, "modular": comparison.modular}
    )
    return frame.with_columns(
        pl.Series("delta", [comparison.delta[c] for c in frame["component"]])
    )


def downtime_table(comparison: ArchitectureComparison) -> pl.DataFrame:
    architectures = list(comparison.downtime_hours_per_year)
    return pl.DataFrame(
        {
            "architecture": architectures,
            "downtime_hours_per_year": [
                comparison.downtime_hours_per_year[a] for a in architectures
            ],
            "shortfall_hours": [comparison.shortfall_hours[a] for a in architectures],
        }
    )


def sites_table(metrics: Metrics) -> pl.DataFrame:
    return pl.DataFrame(
        [
            {
                "site": s.name,
                "modules": s.modules,
                "yard_area": s.yard_area,
                "design_density": s.design_density,
                "realized_density": s.realized_density,
                **s.provisioning.model_dump(),
            }
            for s in metrics.sites
        ]
    )


def redundancy_table(comparison: RedundancyComparison) -> pl.DataFrame:
    strategies = {
        "onsite_generators": comparison.onsite_generators,
        "geo_failover": comparison.geo_failover,
    }
    return pl.DataFrame(
        {
            "strategy": list(strategies),
            "shortfall_hours": [m.mean("shortfall_hours") for m in strategies.values()],
            "availability": [m.mean("availability") for m in strategies.values()],
            "tco_modular": [m.tco["modular"].total for m in strategies.values()],
            "generators": [m.tco["modular"].generators for m in strategies.values()],
        }
    )


SWEEP_METRICS = (
    "delivered_system_hours",
    "shortfall_hours",
    "availability",
)


def sweep_table(report: Report) -> pl.DataFrame:
    rows = []
    for row in report.sweep:
        record: dict[str, float] = {"value": row.value}
        for name in SWEEP_METRICS:
            record[name] = row.summary[name].mean
            record[f"{name}_se"] = row.summary[name].standard_error
        record["tco_modular"] = row.tco_modular
        record["tco_conventional"] = row.tco_conventional
        record["stranded_cost"] = row.stranded_cost
        record["wasted_floor_cost"] = row.wasted_floor_cost
        rows.append(record)
    return pl.DataFrame(rows)


def tables(report: Report) -> dict[str, pl.DataFrame]:
    """Every table a report renders, keyed by file stem."""
    out: dict[str, pl.DataFrame] = {}
    if report.metrics is not None:
        out["summary"] = summary_table(report.metrics.summary)
        out["tco"] = tco_table(dict(report.metrics.tco))
        out["sites"] = sites_table(report.metrics)
    if report.architectures is not None:
        out["compare"] = comparison_table(report.architectures)
        out["downtime"] = downtime_table(report.architectures)
    if report.redundancy is not None:
        out["redundancy"] = redundancy_table(report.redundancy)
    if report.sweep:
        out["sweep"] = sweep_table(report)
    return out


def render(report: Report, fmt: OutputFormat, max_rows: int = 50) -> str:
    if fmt == "json-doc":
        return report.model_dump_json(indent=2)
    parts = []
    for name, frame in tables(report).items():
        if fmt == "csv":
            parts.append(f"# {name}\n{frame.write_csv()}")
        else:
            with pl.Config(tbl_rows=max_rows, tbl_cols=-1):
                parts.append(f"{name}\n{frame}")
    return "\n".join(parts)
