"""
Capital and operating cost accounting for conventional and modular data centers.

All functions are pure and linear in their price inputs: scaling every price by
`k` scales every component of the resulting breakdown by `k`.
"""

from __future__ import annotations

import math
from typing import Literal, TypeAlias

from pydantic import BaseModel, ConfigDict, Field, computed_field

from macrodc.core_model import HOURS_PER_YEAR, CostShares, ModuleSpec
from macrodc.errors import DomainError, ScenarioError

Architecture: TypeAlias = Literal["conventional", "modular"]
Condition: TypeAlias = Literal["new", "remanufactured"]
MaintenanceMode: TypeAlias = Literal["field_service", "none"]

# Field service is quoted as a share of system price over this many years
MAINTENANCE_PERIOD_YEARS = 3.0

CAPEX_COMPONENTS = (
    "building",
    "power_equipment",
    "other_facility",
    "systems",
    "containers",
    "generators",
)
OPEX_COMPONENTS = (
    "energy",
    "field_maintenance",
    "admin_staff",
    "recycle",
    "relocation",
)


class _Value(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class CostBreakdown(_Value):
    building: float = Field(default=0.0, ge=0)
    power_equipment: float = Field(default=0.0, ge=0)
    other_facility: float = Field(default=0.0, ge=0)
    systems: float = Field(default=0.0, ge=0)
    containers: float = Field(default=0.0, ge=0)
    generators: float = Field(default=0.0, ge=0)

    energy: float = Field(default=0.0, ge=0)
    field_maintenance: float = Field(default=0.0, ge=0)
    admin_staff: float = Field(default=0.0, ge=0)
    recycle: float = Field(default=0.0, ge=0)
    relocation: float = Field(default=0.0, ge=0)

    @computed_field  # type: ignore[misc]
    @property
    def capex(self) -> float:
        return math.fsum(getattr(self, c) for c in CAPEX_COMPONENTS)

    @computed_field  # type: ignore[misc]
    @property
    def opex(self) -> float:
        return math.fsum(getattr(self, c) for c in OPEX_COMPONENTS)

    @computed_field  # type: ignore[misc]
    @property
    def total(self) -> float:
        return math.fsum(self.components().values())

    def components(self) -> dict[str, float]:
        return {c: getattr(self, c) for c in (*CAPEX_COMPONENTS, *OPEX_COMPONENTS)}

    def scaled(self, k: float) -> CostBreakdown:
        if k < 0:
            msg = f"scale factor must be non-negative, got {k}"
            raise DomainError(msg)
        return CostBreakdown(**{c: v * k for c, v in self.components().items()})

    def __add__(self, other: CostBreakdown) -> CostBreakdown:
        theirs = other.components()
        return CostBreakdown(
            **{c: v + theirs[c] for c, v in self.components().items()}
        )

    @classmethod
    def mean(cls, breakdowns: list[CostBreakdown]) -> CostBreakdown:
        if not breakdowns:
            return cls()
        n = len(breakdowns)
        return cls(
            **{
                c: math.fsum(b.components()[c] for b in breakdowns) / n
                for c in (*CAPEX_COMPONENTS, *OPEX_COMPONENTS)
            }
        )


class GeneratorUnit(_Value):
    rating: float = Field(default=2.5, gt=0)  # MW
    price: float = Field(default=1_500_000.0, ge=0)


class FacilityParams(_Value):
    # $10/W pairs the "$150M facility" with the "typical 15-megawatt facility";
    # the pairing is inferred, not stated.
    power_capacity: float = Field(default=15.0, gt=0)  # MW
    cost_per_watt: float = Field(default=10.0, gt=0)
    shares: CostShares = CostShares()
    generator_unit: GeneratorUnit = GeneratorUnit()
    generator_count: int = Field(default=0, ge=0)


class MaintenancePolicy(_Value):
    mode: MaintenanceMode = "field_service"
    rate: float = Field(default=0.25, ge=0)  # of system price per 3 years


class EconInputs(_Value):
    """Everything `tco` needs for one architecture over one horizon."""

    module: ModuleSpec
    module_count: int = Field(default=1, ge=0)
    replacement_count: int = Field(default=0, ge=0)
    recycle_count: int = Field(default=0, ge=0)
    facilities: tuple[FacilityParams, ...] = ()
    include_generators: bool = True
    maintenance: MaintenancePolicy = MaintenancePolicy()
    energy_price: float = Field(default=0.07, ge=0)  # USD/kWh
    cooling_overhead: float = Field(default=0.5, ge=0)
    # None means every installed system serves for the whole horizon
    served_system_years: float | None = Field(default=None, ge=0)
    admin_staff_per_year: float = Field(default=0.0, ge=0)
    recycle_cost_per_module: float = Field(default=0.0, ge=0)
    relocation_cost: float = Field(default=0.0, ge=0)
    condition: Condition = "new"
    replacement_condition: Condition = "remanufactured"
    integration_fraction: float = Field(default=0.0, ge=0)
    discount_rate: float = Field(default=0.0, ge=0)


def default_policy(architecture: Architecture, rate: float = 0.25) -> MaintenancePolicy:
    """Field service for conventional rooms, none for sealed modules."""
    if architecture == "modular":
        return MaintenancePolicy(mode="none", rate=rate)
    return MaintenancePolicy(mode="field_service", rate=rate)


def container_price(spec: ModuleSpec, condition: Condition) -> float:
    if condition == "new":
        return spec.container_price_new
    return spec.container_price_remanufactured


def systems_capex(spec: ModuleSpec, integration_fraction: float = 0.0) -> float:
    """Price of one module's systems including factory integration."""
    if integration_fraction < 0:
        msg = f"integration_fraction must be non-negative, got {integration_fraction}"
        raise DomainError(msg)
    return spec.system_count * spec.system.unit_price * (1.0 + integration_fraction)


def module_capex(
    spec: ModuleSpec, condition: Condition = "new", integration_fraction: float = 0.0
) -> float:
    """Purchase price of one fully populated module."""
    return container_price(spec, condition) + systems_capex(spec, integration_fraction)


def maintenance_cost(
    policy: MaintenancePolicy, unit_price: float, system_count: int, years: float
) -> float:
    """Field service spend, prorated linearly from the three-year quote."""
    if years < 0:
        msg = f"years must be non-negative, got {years}"
        raise DomainError(msg)
    if policy.mode == "none":
        return 0.0
    return system_count * unit_price * policy.rate * (years / MAINTENANCE_PERIOD_YEARS)


def facility_capex(params: FacilityParams) -> CostBreakdown:
    """Facility-only capex: building, power equipment, the rest, and generators."""
    total = params.power_capacity * 1e6 * params.cost_per_watt
    building = params.shares.building * total
    power_equipment = params.shares.power_equipment * total
    return CostBreakdown(
        building=building,
        power_equipment=power_equipment,
        other_facility=max(total - building - power_equipment, 0.0),
        generators=params.generator_count * params.generator_unit.price,
    )


def energy_opex(
    mean_it_power: float, cooling_overhead: float, price: float, years: float
) -> float:
    """Energy bill for `mean_it_power` kW of IT load plus cooling."""
    if min(mean_it_power, cooling_overhead, price, years) < 0:
        msg = "energy inputs must be non-negative"
        raise DomainError(msg)
    return mean_it_power * (1.0 + cooling_overhead) * HOURS_PER_YEAR * years * price


def downtime_reduction(admin_error_share: float, elimination: float) -> float:
    """Fraction of downtime removed by taking people out of the machine room."""
    for name, value in (
        ("admin_error_share", admin_error_share),
        ("elimination", elimination),
    ):
        if not 0.0 <= value <= 1.0:
            msg = f"{name} must lie in [0, 1], got {value}"
            raise DomainError(msg)
    return admin_error_share * elimination


def downtime_model(
    base_downtime: float, admin_error_share: float, elimination: float
) -> float:
    """Yearly downtime hours once the eliminated admin errors are gone."""
    return base_downtime * (1.0 - downtime_reduction(admin_error_share, elimination))


def annuity_factor(discount_rate: float, years: float) -> float:
    """Average discount factor of a flat yearly stream over `years`."""
    if discount_rate == 0.0 or years == 0.0:
        return 1.0
    growth = math.log1p(discount_rate)
    return (1.0 - math.exp(-growth * years)) / (growth * years)


def tco(architecture: Architecture, inputs: EconInputs, horizon: float) -> CostBreakdown:
    """
    Total cost of ownership for one architecture over `horizon` years.

    Conventional rooms buy the same systems without containers and pay field
    service; modular yards buy containers, pay no field service, and ship
    modules back for recycling at end of life.

    Raises
    ------
    ScenarioError
        If the maintenance policy does not match the architecture.
    """
    if horizon < 0:
        msg = f"horizon must be non-negative, got {horizon}"
        raise DomainError(msg)
    expected_mode = default_policy(architecture).mode
    if inputs.maintenance.mode != expected_mode:
        msg = (
            f"{architecture} architecture requires maintenance mode "
            f"{expected_mode!r}, got {inputs.maintenance.mode!r}"
        )
        raise ScenarioError(msg, path="maintenance.mode")

    spec = inputs.module
    modular = architecture == "modular"
    installed_systems = inputs.module_count * spec.system_count
    purchases = inputs.module_count + inputs.replacement_count

    facility = CostBreakdown()
    for params in inputs.facilities:
        facility = facility + facility_capex(params)
    if not inputs.include_generators:
        facility = facility.model_copy(update={"generators": 0.0})

    containers = 0.0
    if modular:
        containers = inputs.module_count * container_price(
            spec, inputs.condition
        ) + inputs.replacement_count * container_price(
            spec, inputs.replacement_condition
        )

    served = inputs.served_system_years
    if served is None:
        served = installed_systems * horizon
    mean_it_kw = served * spec.system.power_draw / 1_000.0 / horizon if horizon else 0.0
    discount = annuity_factor(inputs.discount_rate, horizon)

    return facility.model_copy(
        update={
            "systems": purchases * systems_capex(spec, inputs.integration_fraction),
            "containers": containers,
            "energy": discount
            * energy_opex(
                mean_it_kw, inputs.cooling_overhead, inputs.energy_price, horizon
            ),
            "field_maintenance": discount
            * maintenance_cost(
                inputs.maintenance, spec.system.unit_price, installed_systems, horizon
            ),
            "admin_staff": discount * inputs.admin_staff_per_year * horizon,
            "recycle": inputs.recycle_count * inputs.recycle_cost_per_module
            if modular
            else 0.0,
            "relocation": inputs.relocation_cost if modular else 0.0,
        }
    )
