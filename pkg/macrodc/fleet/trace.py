"""
Fleet events and the metrics accumulator that replays them.

The trace is the source of truth: a replication's metrics are whatever
`replay` computes from its events, and the same function is applied to traces
read back from disk.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import asdict, dataclass
from typing import TYPE_CHECKING, Literal, TypeAlias

import polars as pl
from pydantic import BaseModel, ConfigDict

from macrodc.core_model import HOURS_PER_YEAR
from macrodc.errors import SimulationError

if TYPE_CHECKING:
    from collections.abc import Iterable
    from pathlib import Path

    from macrodc.fleet.scenario import DemandCurve

EventKind: TypeAlias = Literal[
    "module_deployed",
    "system_failed",
    "module_recycled",
    "dc_outage_start",
    "dc_outage_end",
    "load_migrated",
    "module_relocated",
]

TRACE_SCHEMA = {
    "replication": pl.Int64,
    "time": pl.Float64,
    "kind": pl.String,
    "site": pl.String,
    "module": pl.Int64,
    "generation": pl.Int64,
    "count": pl.Int64,
    "target_site": pl.String,
    "covered": pl.Boolean,
    "amount": pl.Float64,
    "phase": pl.String,
}


@dataclass(frozen=True, slots=True)
class FleetEvent:
    """
    One timestamped fleet event.

    Payload fields are used per kind:

    * ``module_deployed``: module, generation, count (design systems)
    * ``system_failed``: module, generation, count (systems lost)
    * ``module_recycled``: module, generation
    * ``dc_outage_start`` / ``dc_outage_end``: covered (generators carried it)
    * ``load_migrated``: amount (systems of load moved off `site`)
    * ``module_relocated``: module, target_site, phase (depart/arrive),
      amount (move cost, on depart)
    """

    time: float
    kind: EventKind
    site: str
    module: int | None = None
    generation: int | None = None
    count: int | None = None
    target_site: str | None = None
    covered: bool | None = None
    amount: float | None = None
    phase: Literal["depart", "arrive"] | None = None


class ReplicationMetrics(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    replication: int = 0
    delivered_system_hours: float = 0.0
    demanded_system_hours: float = 0.0
    served_system_hours: float = 0.0
    shortfall_hours: float = 0.0
    availability: float = 1.0
    system_failures: int = 0
    modules_deployed: int = 0
    modules_recycled: int = 0
    modules_relocated: int = 0
    outages: int = 0
    uncovered_outage_site_hours: float = 0.0
    migrated_systems: float = 0.0
    relocation_cost: float = 0.0


@dataclass(slots=True)
class _Accumulator:
    demand: DemandCurve
    healthy: dict[int, int]
    deployed: set[int]
    in_transit: Counter[int]
    site_of: dict[int, str]
    site_down: dict[str, int]
    now: float = 0.0
    delivered: float = 0.0
    demanded: float = 0.0
    served: float = 0.0
    shortfall: float = 0.0
    down_site_years: float = 0.0

    def available(self) -> int:
        return sum(
            self.healthy[m]
            for m in self.deployed
            if self.in_transit[m] == 0 and self.site_down.get(self.site_of[m], 0) == 0
        )

    def advance(self, t: float) -> None:
        if t < self.now:
            msg = f"trace is not time ordered: {t} after {self.now}"
            raise SimulationError(msg)
        if t == self.now:
            return
        capacity = self.available()
        down_sites = sum(1 for n in self.site_down.values() if n > 0)
        self.down_site_years += down_sites * (t - self.now)
        edges = [self.now, *self.demand.breakpoints(self.now, t), t]
        for start, end in zip(edges, edges[1:], strict=False):
            dt = end - start
            need = self.demand.value_at(start)
            self.delivered += capacity * dt
            self.demanded += need * dt
            self.served += min(capacity, need) * dt
            self.shortfall += max(0.0, need - capacity) * dt
        self.now = t


def replay(
    events: Iterable[FleetEvent],
    demand: DemandCurve,
    horizon: float,
    replication: int = 0,
) -> ReplicationMetrics:
    """Integrate capacity, demand and shortfall over a replication's trace."""
    acc = _Accumulator(
        demand=demand,
        healthy={},
        deployed=set(),
        in_transit=Counter(),
        site_of={},
        site_down={},
    )
    failures = deployed = recycled = relocated = outages = 0
    migrated = relocation_cost = 0.0

    for event in events:
        acc.advance(min(event.time, horizon))
        module = event.module
        if event.kind == "module_deployed" and module is not None:
            acc.healthy[module] = event.count or 0
            acc.site_of[module] = event.site
            acc.deployed.add(module)
            deployed += 1
        elif event.kind == "system_failed" and module is not None:
            acc.healthy[module] -= event.count or 0
            failures += event.count or 0
        elif event.kind == "module_recycled" and module is not None:
            acc.deployed.discard(module)
            acc.healthy[module] = 0
            recycled += 1
        elif event.kind == "dc_outage_start":
            outages += 1
            if not event.covered:
                acc.site_down[event.site] = acc.site_down.get(event.site, 0) + 1
        elif event.kind == "dc_outage_end":
            if not event.covered:
                acc.site_down[event.site] -= 1
        elif event.kind == "load_migrated":
            migrated += event.amount or 0.0
        elif event.kind == "module_relocated" and module is not None:
            if event.phase == "depart":
                acc.in_transit[module] += 1
                acc.site_of[module] = event.target_site or event.site
                relocation_cost += event.amount or 0.0
                relocated += 1
            else:
                acc.in_transit[module] -= 1
    acc.advance(horizon)

    demanded = acc.demanded * HOURS_PER_YEAR
    served = acc.served * HOURS_PER_YEAR
    return ReplicationMetrics(
        replication=replication,
        delivered_system_hours=acc.delivered * HOURS_PER_YEAR,
        demanded_system_hours=demanded,
        served_system_hours=served,
        shortfall_hours=acc.shortfall * HOURS_PER_YEAR,
        availability=served / demanded if demanded > 0 else 1.0,
        system_failures=failures,
        modules_deployed=deployed,
        modules_recycled=recycled,
        modules_relocated=relocated,
        outages=outages,
        uncovered_outage_site_hours=acc.down_site_years * HOURS_PER_YEAR,
        migrated_systems=migrated,
        relocation_cost=relocation_cost,
    )


def trace_frame(traces: Iterable[tuple[int, list[FleetEvent]]]) -> pl.DataFrame:
    """Flatten `(replication, events)` pairs into one table, one row per event."""
    rows = [
        {"replication": replication, **asdict(event)}
        for replication, events in traces
        for event in events
    ]
    return pl.DataFrame(rows, schema=TRACE_SCHEMA)


def write_trace(frame: pl.DataFrame, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.write_ndjson(path)


def read_trace(path: Path) -> dict[int, list[FleetEvent]]:
    """Read an ndjson trace back into per-replication event lists."""
    frame = pl.read_ndjson(path, schema=TRACE_SCHEMA)
    traces: dict[int, list[FleetEvent]] = {}
    for row in frame.iter_rows(named=True):
        replication = row.pop("replication")
        traces.setdefault(replication, []).append(FleetEvent(**row))
    return traces
