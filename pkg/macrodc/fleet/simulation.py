"""
Discrete-event simulation of a container fleet.

Each replication is a single-threaded event loop over its own state. Random
streams are addressed by purpose rather than by draw order:

* lifetimes of module `m` in generation `g`: ``(seed, replication, 0, m, g)``
* utility outages at site `i`: ``(seed, replication, 1, i)``

so changing the strategy, the failure probability or the overprovisioning
never shifts another stream. Base modules are numbered before overprovisioned
ones for the same reason.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, TypeAlias

import numpy as np
import polars as pl
from pydantic import BaseModel, ConfigDict

from macrodc.core_model import HOURS_PER_YEAR
from macrodc.econ_model import (
    Architecture,
    CostBreakdown,
    EconInputs,
    default_policy,
    downtime_model,
    facility_capex,
    tco,
)
from macrodc.errors import ScenarioError
from macrodc.failure_engine import RngStream, sample_lifetimes
from macrodc.fleet.scenario import Strategy
from macrodc.fleet.trace import FleetEvent, ReplicationMetrics, replay
from macrodc.fleet.yard import SiteState, relocate, site_power_density, site_yard_area
from macrodc.power_floor import ProvisioningOutcome, mismatch_cost, provisioning_mismatch

if TYPE_CHECKING:
    from macrodc.fleet.scenario import Scenario

logger = logging.getLogger(__name__)

FleetTrace: TypeAlias = list[FleetEvent]

_LIFETIMES = 0
_OUTAGES = 1


class SummaryStat(BaseModel):
    model_config = ConfigDict(frozen=True)

    mean: float
    standard_error: float


class ReplicationRecord(ReplicationMetrics):
    tco_modular: float = 0.0
    tco_conventional: float = 0.0
    # shortfall of a conventional facility holding the same systems, which
    # serves nothing until it is built
    conventional_shortfall_hours: float = 0.0


class SiteReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    modules: int
    yard_area: float
    design_density: float
    realized_density: float
    provisioning: ProvisioningOutcome


class Metrics(BaseModel):
    model_config = ConfigDict(frozen=True)

    strategy: Strategy
    replications: tuple[ReplicationRecord, ...]
    summary: dict[str, SummaryStat]
    tco: dict[Architecture, CostBreakdown]
    sites: tuple[SiteReport, ...]
    downtime_hours_per_year: dict[Architecture, float]

    def frame(self) -> pl.DataFrame:
        """One row per replication."""
        return pl.DataFrame([r.model_dump() for r in self.replications])

    def mean(self, name: str) -> float:
        return self.summary[name].mean


@dataclass(slots=True)
class _Module:
    id: int
    site: str
    deployed: bool = False
    generation: int = -1
    healthy: int = 0
    # moves still on the road; a module serves only once every move has landed
    in_transit: int = 0


class _Replication:
    def __init__(self, scenario: Scenario, replication: int) -> None:
        self.scenario = scenario
        self.spec = scenario.module
        self.horizon = scenario.horizon
        self.covered = scenario.strategy == "onsite_generators"
        self.rng = RngStream(scenario.seed, replication)
        self.trace: FleetTrace = []
        self.replacements = 0
        self._queue: list[tuple[float, int, tuple[Any, ...]]] = []
        self._seq = itertools.count()
        self.sites = {s.name: SiteState(s.name, s.module_slots) for s in scenario.sites}
        self.site_specs = {s.name: s for s in scenario.sites}
        self.site_down = {s.name: 0 for s in scenario.sites}
        self.modules: dict[int, _Module] = {}

        ids = itertools.count()
        for site in scenario.sites:
            for _ in range(site.modules):
                self._add_module(next(ids), site.name)
        if scenario.strategy == "geo_failover":
            for site in scenario.sites:
                for _ in range(site.overprovisioned(scenario.overprovision_fraction)):
                    self._add_module(next(ids), site.name)

    def _add_module(self, module_id: int, site: str) -> None:
        self.modules[module_id] = _Module(module_id, site)
        self.sites[site].modules.append(module_id)
        self._schedule(self.site_specs[site].initial_deploy_at, ("deploy", module_id))

    @property
    def module_count(self) -> int:
        return len(self.modules)

    def _schedule(self, t: float, action: tuple[Any, ...]) -> None:
        if t < self.horizon:
            heapq.heappush(self._queue, (t, next(self._seq), action))

    def _emit(self, event: FleetEvent) -> None:
        self.trace.append(event)

    def _available(self, site: str | None = None) -> int:
        return sum(
            m.healthy
            for m in self.modules.values()
            if m.deployed
            and m.in_transit == 0
            and self.site_down[m.site] == 0
            and (site is None or m.site == site)
        )

    def run(self) -> FleetTrace:
        for i, site in enumerate(self.scenario.sites):
            self._schedule_outages(i, site.name, site.utility_outage_rate)
            for t in site.scheduled_outages:
                self._schedule(t, ("outage_start", site.name))
        for i, relocation in enumerate(self.scenario.relocations):
            self._schedule(relocation.at, ("relocate", i))

        while self._queue:
            t, _, action = heapq.heappop(self._queue)
            kind, *args = action
            getattr(self, f"_on_{kind}")(t, *args)
        return self.trace

    def _schedule_outages(self, index: int, site: str, rate: float) -> None:
        if rate == 0:
            return
        generator = self.rng.child(_OUTAGES, index).generator()
        t = 0.0
        while True:
            t += -math.log1p(-generator.random()) / rate
            if t >= self.horizon:
                return
            self._schedule(t, ("outage_start", site))

    def _on_deploy(self, t: float, module_id: int) -> None:
        module = self.modules[module_id]
        module.generation += 1
        module.deployed = True
        module.healthy = self.spec.system_count
        self._emit(
            FleetEvent(
                time=t,
                kind="module_deployed",
                site=module.site,
                module=module_id,
                generation=module.generation,
                count=self.spec.system_count,
            )
        )
        system = self.spec.system
        lifetimes = sample_lifetimes(
            self.spec.system_count,
            system.annual_failure_prob,
            self.rng.child(_LIFETIMES, module_id, module.generation).generator(),
            system.weibull_shape,
        )
        life = self.spec.service_life
        for lifetime in np.sort(lifetimes[lifetimes < life]).tolist():
            self._schedule(t + lifetime, ("fail", module_id, module.generation))
        self._schedule(t + life, ("recycle", module_id, module.generation))

    def _on_fail(self, t: float, module_id: int, generation: int) -> None:
        module = self.modules[module_id]
        if not module.deployed or module.generation != generation:
            return
        module.healthy -= 1
        self._emit(
            FleetEvent(
                time=t,
                kind="system_failed",
                site=module.site,
                module=module_id,
                generation=generation,
                count=1,
            )
        )

    def _on_recycle(self, t: float, module_id: int, generation: int) -> None:
        module = self.modules[module_id]
        module.deployed = False
        module.healthy = 0
        self.replacements += 1
        self._emit(
            FleetEvent(
                time=t,
                kind="module_recycled",
                site=module.site,
                module=module_id,
                generation=generation,
            )
        )
        lead_time = self.site_specs[module.site].deployment_lead_time
        self._schedule(t + lead_time, ("deploy", module_id))

    def _on_outage_start(self, t: float, site: str) -> None:
        spec = self.site_specs[site]
        self._emit(
            FleetEvent(time=t, kind="dc_outage_start", site=site, covered=self.covered)
        )
        self._schedule(
            t + spec.outage_duration / HOURS_PER_YEAR, ("outage_end", site)
        )
        if self.covered:
            return

        total = self._available()
        at_site = self._available(site)
        self.site_down[site] += 1
        if at_site == 0:
            return
        served = min(self.scenario.demand.value_at(t), total)
        site_load = at_site * served / total
        spare_elsewhere = (total - at_site) - (served - site_load)
        self._emit(
            FleetEvent(
                time=t,
                kind="load_migrated",
                site=site,
                amount=min(site_load, max(spare_elsewhere, 0.0)),
            )
        )

    def _on_outage_end(self, t: float, site: str) -> None:
        if not self.covered:
            self.site_down[site] -= 1
        self._emit(
            FleetEvent(time=t, kind="dc_outage_end", site=site, covered=self.covered)
        )

    def _on_relocate(self, t: float, index: int) -> None:
        spec = self.scenario.relocations[index]
        source = self.sites[spec.source]
        destination = self.sites[spec.destination]
        if spec.modules > len(source.modules):
            msg = (
                f"cannot relocate {spec.modules} modules from {spec.source!r}, "
                f"it holds {len(source.modules)}"
            )
            raise ScenarioError(msg, path=f"relocations.{index}.modules")
        module_ids = sorted(source.modules)[: spec.modules]
        events = relocate(
            source,
            destination,
            module_ids,
            spec.cost_per_module,
            spec.downtime_hours,
            at=t,
        )
        for module_id in module_ids:
            source.modules.remove(module_id)
            destination.modules.append(module_id)
            self.modules[module_id].site = destination.name
            self.modules[module_id].in_transit += 1
        for event in events:
            if event.phase == "depart":
                self._emit(event)
            else:
                self._schedule(event.time, ("arrive", event))

    def _on_arrive(self, t: float, event: FleetEvent) -> None:
        if event.module is not None:
            self.modules[event.module].in_transit -= 1
        self._emit(event)


def econ_inputs(
    scenario: Scenario,
    architecture: Architecture,
    *,
    module_count: int,
    replacement_count: int = 0,
    served_system_years: float | None = None,
    relocation_cost: float = 0.0,
) -> EconInputs:
    """Assemble tco inputs for one architecture from a scenario's knobs."""
    econ = scenario.econ
    overhead = (
        scenario.module.cooling_overhead
        if architecture == "modular"
        else econ.conventional_cooling_overhead
    )
    return EconInputs(
        module=scenario.module,
        module_count=module_count,
        replacement_count=replacement_count,
        recycle_count=replacement_count,
        facilities=tuple(s.facility for s in scenario.sites),
        include_generators=scenario.strategy == "onsite_generators",
        maintenance=default_policy(architecture, econ.maintenance_rate),
        energy_price=econ.energy_price,
        cooling_overhead=overhead,
        served_system_years=served_system_years,
        admin_staff_per_year=sum(s.admin_staff_per_year for s in scenario.sites),
        recycle_cost_per_module=econ.recycle_cost_per_module,
        relocation_cost=relocation_cost,
        condition=econ.condition,
        replacement_condition=econ.replacement_condition,
        integration_fraction=econ.integration_fraction,
        discount_rate=econ.discount_rate,
    )


def _replicate(
    scenario: Scenario, replication: int
) -> tuple[FleetTrace, ReplicationRecord, dict[Architecture, CostBreakdown]]:
    sim = _Replication(scenario, replication)
    trace = sim.run()
    metrics = replay(trace, scenario.demand, scenario.horizon, replication)
    before_build = replay(
        trace,
        scenario.demand,
        min(scenario.econ.conventional_build_time, scenario.horizon),
        replication,
    )
    costs: dict[Architecture, CostBreakdown] = {
        architecture: tco(
            architecture,
            econ_inputs(
                scenario,
                architecture,
                module_count=sim.module_count,
                replacement_count=sim.replacements,
                served_system_years=metrics.served_system_hours / HOURS_PER_YEAR,
                relocation_cost=metrics.relocation_cost,
            ),
            scenario.horizon,
        )
        for architecture in ("modular", "conventional")
    }
    record = ReplicationRecord(
        **metrics.model_dump(),
        tco_modular=costs["modular"].total,
        tco_conventional=costs["conventional"].total,
        conventional_shortfall_hours=metrics.shortfall_hours
        + before_build.served_system_hours,
    )
    return trace, record, costs


def summarize(frame: pl.DataFrame) -> dict[str, SummaryStat]:
    """Mean and standard error of every numeric column but the replication index."""
    n = frame.height
    columns = [c for c in frame.columns if c != "replication"]
    means = frame.select(pl.col(columns).cast(pl.Float64).mean()).row(0, named=True)
    stds = frame.select(pl.col(columns).cast(pl.Float64).std()).row(0, named=True)
    return {
        c: SummaryStat(
            mean=means[c],
            standard_error=(stds[c] or 0.0) / math.sqrt(n),
        )
        for c in columns
    }


def site_reports(scenario: Scenario) -> tuple[SiteReport, ...]:
    """Yard area and priced provisioning outcome for every site as deployed."""
    reports = []
    for site in scenario.sites:
        count = site.modules
        if scenario.strategy == "geo_failover":
            count += site.overprovisioned(scenario.overprovision_fraction)
        realized = site_power_density(site, scenario.module, count)
        outcome = mismatch_cost(
            provisioning_mismatch(site.design_density, realized),
            facility_capex(site.facility),
        )
        reports.append(
            SiteReport(
                name=site.name,
                modules=count,
                yard_area=site_yard_area(site, scenario.module, count),
                design_density=site.design_density,
                realized_density=realized,
                provisioning=outcome,
            )
        )
    return tuple(reports)


def run(
    scenario: Scenario, *, workers: int = 1, keep_traces: bool = True
) -> tuple[dict[int, FleetTrace], Metrics]:
    """
    Simulate every replication of `scenario`.

    Returns the trace of each replication (empty when `keep_traces` is off)
    and the aggregate metrics. Identical scenarios give identical results.
    """
    logger.debug(
        "running %s: %d replications, strategy %s",
        scenario.name,
        scenario.replications,
        scenario.strategy,
    )
    indices = range(scenario.replications)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda i: _replicate(scenario, i), indices))
    else:
        results = [_replicate(scenario, i) for i in indices]

    traces = {i: r[0] for i, r in enumerate(results)} if keep_traces else {}
    records = tuple(r[1] for r in results)
    econ = scenario.econ
    metrics = Metrics(
        strategy=scenario.strategy,
        replications=records,
        summary=summarize(pl.DataFrame([r.model_dump() for r in records])),
        tco={
            architecture: CostBreakdown.mean([r[2][architecture] for r in results])
            for architecture in ("modular", "conventional")
        },
        sites=site_reports(scenario),
        downtime_hours_per_year={
            "conventional": econ.base_downtime_hours,
            "modular": downtime_model(
                econ.base_downtime_hours,
                econ.admin_error_share,
                econ.admin_error_elimination,
            ),
        },
    )
    return traces, metrics


class RedundancyComparison(BaseModel):
    model_config = ConfigDict(frozen=True)

    onsite_generators: Metrics
    geo_failover: Metrics
    # geo_failover minus onsite_generators
    cost_delta: float
    shortfall_delta: float
    generator_capex: float
    overprovision_modules: int


def compare_redundancy(scenario: Scenario, *, workers: int = 1) -> RedundancyComparison:
    """
    Run the scenario under both redundancy strategies with common random numbers.

    Raises
    ------
    ScenarioError
        If the scenario has a single site, leaving nowhere to fail over to.
    """
    if len(scenario.sites) < 2:
        msg = "geo_failover needs at least two sites to fail over between"
        raise ScenarioError(msg, path="sites")
    _, onsite = run(
        scenario.with_strategy("onsite_generators"), workers=workers, keep_traces=False
    )
    _, geo = run(
        scenario.with_strategy("geo_failover"), workers=workers, keep_traces=False
    )
    return RedundancyComparison(
        onsite_generators=onsite,
        geo_failover=geo,
        cost_delta=geo.tco["modular"].total - onsite.tco["modular"].total,
        shortfall_delta=geo.mean("shortfall_hours") - onsite.mean("shortfall_hours"),
        generator_capex=onsite.tco["modular"].generators,
        overprovision_modules=sum(
            s.overprovisioned(scenario.overprovision_fraction) for s in scenario.sites
        ),
    )
