"""Scenario models: the validated unit of fleet simulation."""

from __future__ import annotations

import bisect
import math
from typing import Any, Literal, TypeAlias

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeFloat,
    field_validator,
    model_validator,
)

from macrodc.core_model import ModuleSpec, get_preset
from macrodc.econ_model import Condition, FacilityParams

Strategy: TypeAlias = Literal["onsite_generators", "geo_failover"]

MAX_GROUND_STACK = 5


class _Spec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class DemandStep(_Spec):
    at: float = Field(ge=0)  # years
    systems: float = Field(ge=0)  # required healthy systems


class DemandCurve(_Spec):
    """Piecewise-constant fleet demand, defined on `[0, until]`."""

    steps: tuple[DemandStep, ...] = Field(min_length=1)
    until: float = Field(gt=0)

    @model_validator(mode="after")
    def _ordered_from_zero(self) -> DemandCurve:
        if self.steps[0].at != 0.0:
            msg = "the first demand step must start at time 0"
            raise ValueError(msg)
        times = [s.at for s in self.steps]
        if any(b <= a for a, b in zip(times, times[1:], strict=False)):
            msg = "demand steps must have strictly increasing times"
            raise ValueError(msg)
        if times[-1] > self.until:
            msg = "demand steps must start before `until`"
            raise ValueError(msg)
        return self

    @classmethod
    def constant(cls, systems: float, until: float) -> DemandCurve:
        return cls(steps=(DemandStep(at=0.0, systems=systems),), until=until)

    @property
    def times(self) -> list[float]:
        return [s.at for s in self.steps]

    def value_at(self, t: float) -> float:
        idx = bisect.bisect_right(self.times, t) - 1
        return self.steps[max(idx, 0)].systems

    def breakpoints(self, start: float, end: float) -> list[float]:
        """Demand change times strictly inside `(start, end)`."""
        return [s.at for s in self.steps if start < s.at < end]

    def integral(self, horizon: float) -> float:
        """Demanded system-years over `[0, horizon]`."""
        total = 0.0
        bounds = [*self.times, math.inf]
        for step, nxt in zip(self.steps, bounds[1:], strict=False):
            total += step.systems * max(0.0, min(nxt, horizon) - step.at)
        return total


class SiteSpec(_Spec):
    name: str = Field(min_length=1)
    module_slots: int = Field(ge=1)
    module_count: int | None = Field(default=None, ge=0)  # None fills every slot
    stack_height: int = 3
    deployment_lead_time: float = Field(default=0.25, ge=0)  # years
    initial_deploy_at: float = Field(default=0.0, ge=0)  # years
    facility: FacilityParams = FacilityParams()
    utility_outage_rate: float = Field(default=0.0, ge=0)  # events per year
    outage_duration: float = Field(default=8.0, ge=0)  # hours
    # outage start times in years, on top of the random arrivals
    scheduled_outages: tuple[NonNegativeFloat, ...] = ()
    design_density: float = Field(default=100.0, gt=0)  # W/sqft
    central_building_area: float = Field(default=5_000.0, ge=0)  # sqft
    circulation_fraction: float = Field(default=0.0, ge=0)
    admin_staff_per_year: float = Field(default=0.0, ge=0)

    @field_validator("stack_height")
    @classmethod
    def _ground_stack(cls, value: int) -> int:
        if not 1 <= value <= MAX_GROUND_STACK:
            msg = (
                f"stack_height {value} is outside 1..{MAX_GROUND_STACK}: containers "
                "stack 3 to 5 high on the ground (7 high only with support on ships)"
            )
            raise ValueError(msg)
        return value

    @model_validator(mode="after")
    def _fits_slots(self) -> SiteSpec:
        if self.module_count is not None and self.module_count > self.module_slots:
            msg = (
                f"module_count {self.module_count} exceeds module_slots "
                f"{self.module_slots}"
            )
            raise ValueError(msg)
        return self

    @property
    def modules(self) -> int:
        return self.module_slots if self.module_count is None else self.module_count

    def overprovisioned(self, fraction: float) -> int:
        return math.ceil(self.modules * fraction - 1e-12) if fraction > 0 else 0


class RelocationSpec(_Spec):
    at: float = Field(ge=0)  # years
    source: str
    destination: str
    modules: int = Field(ge=0)
    cost_per_module: float = Field(default=20_000.0, ge=0)
    downtime_hours: float = Field(default=168.0, ge=0)


class EconSettings(_Spec):
    energy_price: float = Field(default=0.07, ge=0)  # USD/kWh
    maintenance_rate: float = Field(default=0.25, ge=0)
    conventional_cooling_overhead: float = Field(default=0.5, ge=0)
    recycle_cost_per_module: float = Field(default=5_000.0, ge=0)
    condition: Condition = "new"
    replacement_condition: Condition = "remanufactured"
    integration_fraction: float = Field(default=0.0, ge=0)
    discount_rate: float = Field(default=0.0, ge=0)
    base_downtime_hours: float = Field(default=87.66, ge=0)  # per year
    admin_error_share: float = Field(default=0.35, ge=0, le=1)
    admin_error_elimination: float = Field(default=1.0, ge=0, le=1)
    conventional_build_time: float = Field(default=2.0, ge=0)  # years


def _deep_merge(base: dict[str, Any], overrides: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


class Scenario(_Spec):
    name: str = "scenario"
    sites: tuple[SiteSpec, ...] = Field(min_length=1)
    module: ModuleSpec
    demand: DemandCurve
    strategy: Strategy = "onsite_generators"
    overprovision_fraction: float = Field(default=0.0, ge=0)
    horizon: float = Field(gt=0)  # years
    seed: int = Field(default=0, ge=0, lt=2**64)
    replications: int = Field(default=1, ge=1)
    relocations: tuple[RelocationSpec, ...] = ()
    econ: EconSettings = EconSettings()

    @field_validator("module", mode="before")
    @classmethod
    def _resolve_preset(cls, value: Any) -> Any:
        if isinstance(value, str):
            return get_preset(value)
        if isinstance(value, dict) and "preset" in value:
            overrides = dict(value)
            base = get_preset(overrides.pop("preset")).model_dump()
            return _deep_merge(base, overrides)
        return value

    @model_validator(mode="after")
    def _consistent(self) -> Scenario:
        if self.demand.until < self.horizon:
            msg = (
                f"demand is defined until {self.demand.until} but the horizon is "
                f"{self.horizon}"
            )
            raise ValueError(msg)
        names = [s.name for s in self.sites]
        if len(set(names)) != len(names):
            msg = "site names must be unique"
            raise ValueError(msg)
        for relocation in self.relocations:
            for name in (relocation.source, relocation.destination):
                if name not in names:
                    msg = f"relocation refers to unknown site {name!r}"
                    raise ValueError(msg)
        if self.strategy == "geo_failover":
            for site in self.sites:
                needed = site.modules + site.overprovisioned(self.overprovision_fraction)
                if needed > site.module_slots:
                    msg = (
                        f"site {site.name!r} needs {needed} slots with "
                        f"overprovisioning but has {site.module_slots}"
                    )
                    raise ValueError(msg)
        return self

    def with_strategy(self, strategy: Strategy) -> Scenario:
        """Copy of this scenario under another redundancy strategy, revalidated."""
        return Scenario.model_validate(
            {**self.model_dump(), "strategy": strategy}
        )
