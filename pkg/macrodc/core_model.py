"""
Domain types, named presets and container geometry.

Every type here is a frozen pydantic model: values are validated once at
construction and are safe to share between threads afterwards.
"""

from __future__ import annotations

import math
from typing import Literal, TypeAlias

from pydantic import BaseModel, ConfigDict, Field, model_validator

from macrodc.errors import DomainError

Cooling: TypeAlias = Literal["air", "direct_liquid"]
ContainerLength: TypeAlias = Literal[20, 40]

# 365.25 days; used for every year <-> hour conversion
HOURS_PER_YEAR = 8766.0

SHARE_TOLERANCE = 1e-9


class _Value(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class SystemSpec(_Value):
    """One commodity server."""

    unit_price: float = Field(default=1_500.0, ge=0)
    power_draw: float = Field(default=250.0, gt=0)
    annual_failure_prob: float = Field(default=0.05, ge=0, lt=1)
    # 1.0 is the exponential law; other values switch to a Weibull law with
    # the same one-year survival probability.
    weibull_shape: float = Field(default=1.0, gt=0)


class ModuleSpec(_Value):
    """Static design of a container macro-module."""

    container_length: ContainerLength = 20
    container_width: float = Field(default=8.0, gt=0)
    # Documentation only: no computation depends on height.
    height_ft: float = Field(default=8.5, gt=0)
    system_count: int = Field(default=1_000, ge=1)
    system: SystemSpec = SystemSpec()
    container_price_new: float = Field(default=1_950.0, ge=0)
    container_price_remanufactured: float = Field(default=1_500.0, ge=0)
    cooling: Cooling = "direct_liquid"
    service_life: float = Field(default=3.0, gt=0)
    cooling_overhead: float = Field(default=0.35, ge=0)


class ModuleState(_Value):
    """Evolving state of one deployed module."""

    spec: ModuleSpec
    age: float = Field(default=0.0, ge=0)
    failed_count: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _failed_within_design(self) -> ModuleState:
        if self.failed_count > self.spec.system_count:
            msg = (
                f"failed_count {self.failed_count} exceeds system_count "
                f"{self.spec.system_count}"
            )
            raise ValueError(msg)
        return self

    @property
    def capacity(self) -> float:
        return capacity_fraction(self.spec.system_count, self.failed_count)


class CostShares(_Value):
    """Split of facility cost between power equipment, building and the rest."""

    power_equipment: float = Field(default=0.40, ge=0, le=1)
    building: float = Field(default=0.15, ge=0, le=1)
    other: float = Field(default=0.45, ge=0, le=1)

    @model_validator(mode="after")
    def _sums_to_one(self) -> CostShares:
        total = self.power_equipment + self.building + self.other
        if abs(total - 1.0) > SHARE_TOLERANCE:
            msg = f"cost shares must sum to 1, got {total:.12g}"
            raise ValueError(msg)
        return self


# Presets. Sources:
#   paper1000  - a thousand or more systems in a 20 ft container, new container
#                $1,950, remanufactured $1,500, 3 year service life, direct
#                liquid cooling.
#   rackable40 - 1,152 systems in a 40 ft "high boy" container, 750 W/sqft
#                (208.3 W per system calibrates to it), ~30% cooling savings.
#   sun20      - 242 systems in a 20 ft container, roughly half Rackable's
#                density.
PAPER1000 = ModuleSpec(
    container_length=20,
    system_count=1_000,
    system=SystemSpec(unit_price=1_500.0, power_draw=250.0),
    cooling="direct_liquid",
    cooling_overhead=0.35,
)
RACKABLE40 = ModuleSpec(
    container_length=40,
    height_ft=9.5,
    system_count=1_152,
    system=SystemSpec(unit_price=1_500.0, power_draw=208.3),
    cooling="air",
    cooling_overhead=0.35,
)
SUN20 = ModuleSpec(
    container_length=20,
    system_count=242,
    system=SystemSpec(unit_price=1_500.0, power_draw=250.0),
    cooling="air",
    cooling_overhead=0.5,
)

PRESETS: dict[str, ModuleSpec] = {
    "paper1000": PAPER1000,
    "rackable40": RACKABLE40,
    "sun20": SUN20,
}


def get_preset(name: str) -> ModuleSpec:
    """Return the named module preset."""
    try:
        return PRESETS[name]
    except KeyError:
        msg = f"unknown module preset {name!r}, expected one of {sorted(PRESETS)}"
        raise DomainError(msg) from None


def capacity_fraction(system_count: int, failed_count: int) -> float:
    """Fraction of a module's design capacity still operating."""
    if system_count < 1:
        msg = f"system_count must be at least 1, got {system_count}"
        raise DomainError(msg)
    if not 0 <= failed_count <= system_count:
        msg = f"failed_count must lie in [0, {system_count}], got {failed_count}"
        raise DomainError(msg)
    return (system_count - failed_count) / system_count


def module_footprint(spec: ModuleSpec) -> float:
    """Ground area of one container in square feet."""
    return spec.container_length * spec.container_width


def module_it_power(spec: ModuleSpec) -> float:
    """IT power of a fully healthy module in watts, cooling excluded."""
    return spec.system_count * spec.system.power_draw


def power_density(spec: ModuleSpec) -> float:
    """IT watts per square foot of container footprint."""
    return module_it_power(spec) / module_footprint(spec)


def areal_system_density(spec: ModuleSpec) -> float:
    """Systems per square foot of container footprint."""
    return spec.system_count / module_footprint(spec)


def ground_positions(module_count: int, stack_height: int) -> int:
    """Number of ground footprints needed to hold `module_count` stacked modules."""
    if stack_height < 1:
        msg = f"stack_height must be at least 1, got {stack_height}"
        raise DomainError(msg)
    return math.ceil(module_count / stack_height)
