from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError

from macrodc.core_model import (
    PRESETS,
    RACKABLE40,
    SUN20,
    CostShares,
    ModuleSpec,
    ModuleState,
    SystemSpec,
    areal_system_density,
    capacity_fraction,
    get_preset,
    module_footprint,
    power_density,
)
from macrodc.errors import DomainError


def test_capacity_after_fifty_failures_is_exactly_95_percent() -> None:
    assert capacity_fraction(1000, 50) == 0.95


def test_capacity_fraction_bounds() -> None:
    assert capacity_fraction(37, 0) == 1.0
    assert capacity_fraction(1000, 1000) == 0.0


@pytest.mark.parametrize(("count", "failed"), [(1000, 1001), (0, 0), (10, -1)])
def test_capacity_fraction_rejects_outside_domain(count: int, failed: int) -> None:
    with pytest.raises(DomainError):
        capacity_fraction(count, failed)


@given(st.integers(min_value=1, max_value=5000), st.data())
def test_capacity_fraction_monotone(count: int, data: st.DataObject) -> None:
    a = data.draw(st.integers(min_value=0, max_value=count))
    b = data.draw(st.integers(min_value=a, max_value=count))
    assert capacity_fraction(count, b) <= capacity_fraction(count, a)
    assert (capacity_fraction(count, a) == 1.0) == (a == 0)
    assert capacity_fraction(count, a) == pytest.approx((count - a) / count, abs=1e-12)


def test_footprints() -> None:
    assert module_footprint(ModuleSpec(container_length=20)) == 160
    assert module_footprint(ModuleSpec(container_length=40)) == 320
    assert module_footprint(ModuleSpec(container_length=40, container_width=9)) == 360


def test_rackable_power_density_calibrated_to_750() -> None:
    assert power_density(RACKABLE40) == pytest.approx(750, rel=0.01)
    assert power_density(RACKABLE40) == pytest.approx(1152 * 208.3 / 320)


def test_areal_densities() -> None:
    assert areal_system_density(RACKABLE40) == pytest.approx(3.6)
    assert areal_system_density(SUN20) == pytest.approx(1.5125)
    single = ModuleSpec(container_length=20, system_count=1)
    assert areal_system_density(single) == pytest.approx(0.00625)


def test_sun_is_roughly_half_rackable_density() -> None:
    ratio = areal_system_density(SUN20) / areal_system_density(RACKABLE40)
    assert 0.35 <= ratio <= 0.55
    assert ratio == pytest.approx((242 / 160) / (1152 / 320))


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_preset_density_identity(name: str) -> None:
    spec = get_preset(name)
    assert power_density(spec) == pytest.approx(
        areal_system_density(spec) * spec.system.power_draw, rel=1e-12
    )


def test_presets_match_sources() -> None:
    assert get_preset("paper1000").system_count == 1000
    assert get_preset("paper1000").container_price_new == 1950
    assert get_preset("paper1000").container_price_remanufactured == 1500
    assert get_preset("rackable40").container_length == 40
    assert get_preset("rackable40").system_count == 1152
    assert get_preset("sun20").system_count == 242


def test_unknown_preset() -> None:
    with pytest.raises(DomainError, match="paper1000"):
        get_preset("blackbox")


def test_presets_are_immutable() -> None:
    with pytest.raises(ValidationError):
        RACKABLE40.system_count = 10  # type: ignore[misc]


@pytest.mark.parametrize(
    "kwargs",
    [
        {"container_length": 30},
        {"system_count": 0},
        {"service_life": 0},
        {"container_price_new": -1},
        {"cooling_overhead": -0.1},
    ],
)
def test_module_spec_invariants(kwargs: dict[str, float]) -> None:
    with pytest.raises(ValidationError):
        ModuleSpec(**kwargs)  # type: ignore[arg-type]


@pytest.mark.parametrize(
    "kwargs",
    [{"unit_price": -1}, {"power_draw": 0}, {"annual_failure_prob": 1.0}],
)
def test_system_spec_invariants(kwargs: dict[str, float]) -> None:
    with pytest.raises(ValidationError):
        SystemSpec(**kwargs)


def test_module_state() -> None:
    state = ModuleState(spec=ModuleSpec(system_count=1000), age=1.0, failed_count=50)
    assert state.capacity == 0.95
    with pytest.raises(ValidationError):
        ModuleState(spec=ModuleSpec(system_count=10), failed_count=11)


def test_cost_shares() -> None:
    shares = CostShares()
    assert (shares.power_equipment, shares.building, shares.other) == (0.40, 0.15, 0.45)
    with pytest.raises(ValidationError, match="sum to 1"):
        CostShares(power_equipment=0.6, building=0.3, other=0.3)
