"""Power-density provisioning trade-off and cooled floor utilization."""

from __future__ import annotations

from typing import TYPE_CHECKING, ClassVar

import polars as pl
from pydantic import BaseModel, ConfigDict, Field, model_validator

from macrodc.econ_model import facility_capex
from macrodc.errors import DomainError

if TYPE_CHECKING:
    from collections.abc import Sequence

    from macrodc.core_model import Cooling
    from macrodc.econ_model import CostBreakdown, FacilityParams


class DensityPreset:
    """Reference power densities in W/sqft and the air-cooling example figures."""

    TYPICAL: ClassVar[float] = 100.0
    HIGH_RANGE: ClassVar[tuple[float, float]] = (350.0, 600.0)
    RACKABLE: ClassVar[float] = 750.0

    # Annotation only: the inputs behind the airflow figure (temperature rise,
    # rack count) are not known, so nothing is derived from them.
    OAK_RIDGE_RACK_KW: ClassVar[float] = 35.0
    OAK_RIDGE_AIRFLOW_CFM: ClassVar[float] = 222_000.0
    OAK_RIDGE_DUCT_FT: ClassVar[float] = 6.0

    @classmethod
    def sweep_points(cls) -> list[float]:
        return [cls.TYPICAL, *cls.HIGH_RANGE, cls.RACKABLE]

    @classmethod
    def annotation(cls) -> str:
        return (
            f"Air cooling {cls.OAK_RIDGE_RACK_KW:g} kW racks needs "
            f"{cls.OAK_RIDGE_AIRFLOW_CFM:,.0f} CFM through a "
            f"{cls.OAK_RIDGE_DUCT_FT:g} ft square duct; CRAC units then take as "
            "much floor as the systems."
        )


class ProvisioningOutcome(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    stranded_power_fraction: float = Field(default=0.0, ge=0, le=1)
    unusable_floor_fraction: float = Field(default=0.0, ge=0, le=1)
    stranded_cost: float = Field(default=0.0, ge=0)
    wasted_floor_cost: float = Field(default=0.0, ge=0)

    @model_validator(mode="after")
    def _one_sided(self) -> ProvisioningOutcome:
        if self.stranded_power_fraction > 0 and self.unusable_floor_fraction > 0:
            msg = "power cannot be stranded while floor is unusable"
            raise ValueError(msg)
        return self


def provisioning_mismatch(
    design_density: float, realized_density: float
) -> ProvisioningOutcome:
    """Fractions of power or floor lost when realized density misses the design."""
    if design_density <= 0:
        msg = f"design density must be positive, got {design_density}"
        raise DomainError(msg)
    if realized_density < 0:
        msg = f"realized density must be non-negative, got {realized_density}"
        raise DomainError(msg)
    if realized_density <= design_density:
        return ProvisioningOutcome(
            stranded_power_fraction=1.0 - realized_density / design_density
        )
    return ProvisioningOutcome(
        unusable_floor_fraction=1.0 - design_density / realized_density
    )


def mismatch_cost(
    outcome: ProvisioningOutcome, facility_breakdown: CostBreakdown
) -> ProvisioningOutcome:
    """Price the stranded power and unusable floor against the facility capex."""
    return outcome.model_copy(
        update={
            "stranded_cost": outcome.stranded_power_fraction
            * facility_breakdown.power_equipment,
            "wasted_floor_cost": outcome.unusable_floor_fraction
            * facility_breakdown.building,
        }
    )


def air_cooled_floor_utilization(
    crac_space_ratio: float, walkway_ratio: float = 0.0
) -> float:
    """Share of an air-cooled room that systems can occupy."""
    if crac_space_ratio < 0 or walkway_ratio < 0:
        msg = "space ratios must be non-negative"
        raise DomainError(msg)
    return 1.0 / (1.0 + crac_space_ratio + walkway_ratio)


def floor_utilization(
    cooling: Cooling, crac_space_ratio: float = 1.0, walkway_ratio: float = 0.0
) -> float:
    # Sealed liquid-cooled containers carry no CRAC units and no service aisle
    if cooling == "direct_liquid":
        return 1.0
    return air_cooled_floor_utilization(crac_space_ratio, walkway_ratio)


def density_table(
    design_densities: Sequence[float],
    realized_density: float,
    facility: FacilityParams,
) -> pl.DataFrame:
    """One priced provisioning outcome per candidate design density."""
    breakdown = facility_capex(facility)
    rows = []
    for design in design_densities:
        outcome = mismatch_cost(
            provisioning_mismatch(design, realized_density), breakdown
        )
        rows.append({"design_density": design, **outcome.model_dump()})
    return pl.DataFrame(
        rows,
        schema={
            "design_density": pl.Float64,
            "stranded_power_fraction": pl.Float64,
            "unusable_floor_fraction": pl.Float64,
            "stranded_cost": pl.Float64,
            "wasted_floor_cost": pl.Float64,
        },
    ).with_columns(pl.lit(realized_density).alias("realized_density"))
