from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from macrodc.core_model import ModuleSpec, SystemSpec
from macrodc.errors import DomainError
from macrodc.failure_engine import (
    CapacityTrajectory,
    RngStream,
    capacity_at,
    delivered_capacity_hours,
    expected_capacity,
    failure_rate,
    replicate_capacity,
    sample_lifetimes,
    simulate_module,
    summarize_capacity,
)


def module(p: float, n: int = 1000, service_life: float = 3.0) -> ModuleSpec:
    return ModuleSpec(
        system_count=n,
        system=SystemSpec(annual_failure_prob=p),
        service_life=service_life,
    )


def test_failure_rate() -> None:
    assert failure_rate(0.0) == 0.0
    assert failure_rate(1 - math.exp(-1)) == pytest.approx(1.0, rel=1e-12)
    assert failure_rate(0.05) == pytest.approx(0.051293, abs=1e-6)
    with pytest.raises(DomainError):
        failure_rate(1.0)
    with pytest.raises(DomainError):
        failure_rate(-0.1)


def test_expected_capacity_examples() -> None:
    assert expected_capacity(0.05, 0.0) == 1.0
    assert expected_capacity(0.03, 3.0) == pytest.approx(0.912673, abs=1e-6)
    with pytest.raises(DomainError):
        expected_capacity(0.05, -1.0)


@given(st.floats(min_value=0.0, max_value=0.99))
def test_one_year_survival_matches_failure_probability(p: float) -> None:
    assert expected_capacity(p, 1.0) == pytest.approx(1 - p, abs=1e-12)
    # a Weibull law keeps the same one-year survival
    assert expected_capacity(p, 1.0, weibull_shape=2.0) == pytest.approx(
        1 - p, abs=1e-12
    )


def test_zero_failure_probability_is_flat() -> None:
    trajectory = simulate_module(module(0.0), 3.0, RngStream(1))
    assert trajectory.times == (0.0,)
    assert trajectory.capacities == (1.0,)
    assert capacity_at(trajectory, 2.9) == 1.0


def test_single_system_has_at_most_one_step() -> None:
    for i in range(20):
        trajectory = simulate_module(module(0.5, n=1), 3.0, RngStream(9, i))
        assert len(trajectory.times) <= 2
        assert trajectory.capacities[-1] in (0.0, 1.0)


def test_simulation_is_deterministic_per_stream() -> None:
    spec = module(0.05)
    a = simulate_module(spec, 3.0, RngStream(42, 3))
    b = simulate_module(spec, 3.0, RngStream(42, 3))
    c = simulate_module(spec, 3.0, RngStream(43, 3))
    assert a == b
    assert a != c


def test_trajectory_invariants() -> None:
    trajectory = simulate_module(module(0.2), 3.0, RngStream(5))
    assert trajectory.times[0] == 0.0
    assert trajectory.capacities[0] == 1.0
    assert all(b > a for a, b in zip(trajectory.times, trajectory.times[1:]))
    assert all(
        b <= a for a, b in zip(trajectory.capacities, trajectory.capacities[1:])
    )
    assert all(0.0 <= c <= 1.0 for c in trajectory.capacities)


@pytest.mark.parametrize("horizon", [-0.5, 3.5])
def test_horizon_outside_service_life(horizon: float) -> None:
    with pytest.raises(DomainError):
        simulate_module(module(0.05), horizon, RngStream(1))


def test_malformed_trajectory_is_rejected() -> None:
    with pytest.raises(DomainError):
        CapacityTrajectory((0.0, 1.0), (1.0, 1.1), 2.0)
    with pytest.raises(DomainError):
        CapacityTrajectory((0.0, 0.0), (1.0, 0.5), 2.0)
    with pytest.raises(DomainError):
        CapacityTrajectory((0.5,), (1.0,), 2.0)


def test_capacity_at_is_right_continuous() -> None:
    trajectory = CapacityTrajectory((0.0, 0.5), (1.0, 0.999), 1.0)
    assert capacity_at(trajectory, 0.0) == 1.0
    assert capacity_at(trajectory, 0.4999) == 1.0
    assert capacity_at(trajectory, 0.5) == 0.999
    assert capacity_at(trajectory, 1.0) == 0.999
    with pytest.raises(DomainError):
        capacity_at(trajectory, 1.5)


def test_delivered_capacity_hours() -> None:
    flat = CapacityTrajectory((0.0,), (1.0,), 1.0)
    assert delivered_capacity_hours(flat, 1000) == pytest.approx(8_766_000)
    assert delivered_capacity_hours(flat, 0) == 0.0

    step = CapacityTrajectory((0.0, 0.5), (1.0, 0.95), 1.0)
    assert delivered_capacity_hours(step, 1000) == pytest.approx(8_546_850, rel=1e-12)


def test_lifetimes_consume_one_uniform_per_system() -> None:
    a = np.random.Generator(np.random.PCG64(1))
    b = np.random.Generator(np.random.PCG64(1))
    sample_lifetimes(100, 0.0, a)
    sample_lifetimes(100, 0.3, b)
    assert a.random() == b.random()


def test_zero_probability_lifetimes_are_infinite() -> None:
    lifetimes = sample_lifetimes(10, 0.0, RngStream(3).generator())
    assert np.isinf(lifetimes).all()


def test_common_random_numbers_order_lifetimes() -> None:
    stream = RngStream(2007, 4)
    previous = sample_lifetimes(1000, 0.01, stream.generator())
    for p in np.linspace(0.02, 0.10, 9):
        current = sample_lifetimes(1000, float(p), stream.generator())
        assert (current <= previous).all()
        previous = current


def test_common_random_numbers_order_delivered_hours() -> None:
    delivered = [
        delivered_capacity_hours(
            simulate_module(module(float(p)), 3.0, RngStream(11, 0)), 1000
        )
        for p in np.linspace(0.01, 0.10, 10)
    ]
    assert all(b <= a for a, b in zip(delivered, delivered[1:]))


def test_replicate_capacity_shape() -> None:
    frame = replicate_capacity(module(0.05), 3.0, [0.0, 1.0, 3.0], seed=1, replications=5)
    assert frame.shape == (15, 3)
    assert frame.columns == ["replication", "time", "capacity"]
    assert frame.filter(frame["time"] == 0.0)["capacity"].to_list() == [1.0] * 5


@pytest.mark.slow
def test_mean_capacity_converges_to_expectation() -> None:
    spec = module(0.05)
    samples = replicate_capacity(spec, 3.0, [1.0, 3.0], seed=2007, replications=10_000)
    summary = summarize_capacity(samples, spec)
    assert summary["expected"].to_list() == pytest.approx([0.95, 0.857375])
    for row in summary.iter_rows(named=True):
        assert row["replications"] == 10_000
        assert abs(row["mean"] - row["expected"]) <= 3 * row["standard_error"]
