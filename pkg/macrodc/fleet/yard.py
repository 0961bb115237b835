"""Yard geometry and module relocation between sites."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from macrodc.core_model import (
    HOURS_PER_YEAR,
    ground_positions,
    module_footprint,
    module_it_power,
)
from macrodc.errors import DomainError, ScenarioError
from macrodc.fleet.trace import FleetEvent

if TYPE_CHECKING:
    from collections.abc import Sequence

    from macrodc.core_model import ModuleSpec
    from macrodc.fleet.scenario import SiteSpec


@dataclass(slots=True)
class SiteState:
    """Mutable slot bookkeeping for one site during a replication."""

    name: str
    slots: int
    modules: list[int] = field(default_factory=list)

    @property
    def free_slots(self) -> int:
        return self.slots - len(self.modules)


def yard_area(
    module_count: int,
    spec: ModuleSpec,
    stack_height: int,
    central_building_area: float,
    circulation_fraction: float,
) -> float:
    """Paved area in sqft for stacked modules around a central building."""
    if circulation_fraction < 0 or central_building_area < 0:
        msg = "yard area inputs must be non-negative"
        raise DomainError(msg)
    positions = ground_positions(module_count, stack_height)
    return (
        positions * module_footprint(spec) * (1.0 + circulation_fraction)
        + central_building_area
    )


def site_yard_area(site: SiteSpec, spec: ModuleSpec, module_count: int) -> float:
    return yard_area(
        module_count,
        spec,
        site.stack_height,
        site.central_building_area,
        site.circulation_fraction,
    )


def site_power_density(site: SiteSpec, spec: ModuleSpec, module_count: int) -> float:
    """Realized IT watts per square foot of the whole yard."""
    area = site_yard_area(site, spec, module_count)
    if area == 0:
        return 0.0
    return module_count * module_it_power(spec) / area


def relocate(
    site_from: SiteState,
    site_to: SiteState,
    module_ids: Sequence[int],
    cost_per_module: float,
    downtime: float,
    at: float = 0.0,
) -> list[FleetEvent]:
    """
    Truck modules from one site to another.

    Returns one ``depart`` event per module at `at` and one ``arrive`` event per
    module `downtime` hours later. The move cost sits on the depart events.
    The caller applies the slot changes.

    Raises
    ------
    ScenarioError
        If a module is not at `site_from` or `site_to` lacks free slots.
    """
    if cost_per_module < 0 or downtime < 0:
        msg = "relocation cost and downtime must be non-negative"
        raise DomainError(msg)
    missing = [m for m in module_ids if m not in site_from.modules]
    if missing:
        msg = f"modules {missing} are not deployed at {site_from.name!r}"
        raise ScenarioError(msg, path="relocations")
    if len(module_ids) > site_to.free_slots:
        msg = (
            f"slot overflow: {len(module_ids)} modules moving to "
            f"{site_to.name!r} which has {site_to.free_slots} free slots"
        )
        raise ScenarioError(msg, path="relocations")

    arrival = at + downtime / HOURS_PER_YEAR
    departs = [
        FleetEvent(
            time=at,
            kind="module_relocated",
            site=site_from.name,
            module=m,
            target_site=site_to.name,
            amount=cost_per_module,
            phase="depart",
        )
        for m in module_ids
    ]
    arrives = [
        FleetEvent(
            time=arrival,
            kind="module_relocated",
            site=site_to.name,
            module=m,
            target_site=site_to.name,
            phase="arrive",
        )
        for m in module_ids
    ]
    return departs + arrives
