"""
Per-system failure sampling for non-serviceable modules.

Systems in a sealed module fail independently and are never repaired, so a
module's capacity is a non-increasing step function over one service life.
Lifetimes are drawn by inverse transform from one uniform per system, which
makes runs with a higher failure probability fail every system no later than
runs with a lower one when they share a random stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import polars as pl

from macrodc.core_model import HOURS_PER_YEAR
from macrodc.errors import DomainError

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import NDArray

    from macrodc.core_model import ModuleSpec

RNG_IDENTITY = f"numpy {np.__version__} PCG64 seeded by SeedSequence(seed, spawn_key)"


@dataclass(frozen=True, slots=True)
class RngStream:
    """
    Address of an independent random stream.

    The same `(seed, stream, substream)` produces the same samples on every
    platform: PCG64 and SeedSequence are both specified bit for bit.
    """

    seed: int
    stream: int = 0
    substream: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 2**64:
            msg = f"seed must be an unsigned 64-bit integer, got {self.seed}"
            raise DomainError(msg)

    def child(self, *keys: int) -> RngStream:
        return RngStream(self.seed, self.stream, (*self.substream, *keys))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(
            self.seed, spawn_key=(self.stream, *self.substream)
        )
        return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True, slots=True)
class CapacityTrajectory:
    """Right-continuous step function of capacity fraction over `[0, horizon]`."""

    times: tuple[float, ...]
    capacities: tuple[float, ...]
    horizon: float

    def __post_init__(self) -> None:
        if not self.times or self.times[0] != 0.0 or self.capacities[0] != 1.0:
            msg = "trajectory must start at time 0 with capacity 1.0"
            raise DomainError(msg)
        if len(self.times) != len(self.capacities):
            msg = "times and capacities must have equal length"
            raise DomainError(msg)
        if any(b <= a for a, b in zip(self.times, self.times[1:], strict=False)):
            msg = "trajectory times must be strictly increasing"
            raise DomainError(msg)
        if any(
            b > a for a, b in zip(self.capacities, self.capacities[1:], strict=False)
        ):
            msg = "trajectory capacity must be non-increasing"
            raise DomainError(msg)
        if self.capacities[-1] < 0.0 or self.times[-1] > self.horizon:
            msg = "trajectory leaves its domain"
            raise DomainError(msg)


def failure_rate(annual_failure_prob: float) -> float:
    """Exponential failure rate per year for an annual failure probability."""
    if not 0.0 <= annual_failure_prob < 1.0:
        msg = f"annual failure probability must lie in [0, 1), got {annual_failure_prob}"
        raise DomainError(msg)
    return -math.log1p(-annual_failure_prob)


def expected_capacity(
    annual_failure_prob: float, t: float, weibull_shape: float = 1.0
) -> float:
    """Expected surviving fraction of a module's systems at age `t` years."""
    if t < 0:
        msg = f"time must be non-negative, got {t}"
        raise DomainError(msg)
    rate = failure_rate(annual_failure_prob)
    if weibull_shape == 1.0:
        return (1.0 - annual_failure_prob) ** t
    return math.exp(-rate * t**weibull_shape)


def sample_lifetimes(
    n: int,
    annual_failure_prob: float,
    generator: np.random.Generator,
    weibull_shape: float = 1.0,
) -> NDArray[np.float64]:
    """
    Draw `n` system lifetimes in years by inverse transform.

    Exactly `n` uniforms are consumed regardless of the failure probability,
    so streams stay aligned across parameter values.
    """
    rate = failure_rate(annual_failure_prob)
    u = generator.random(n)
    if rate == 0.0:
        return np.full(n, np.inf)
    # -ln(1 - U) is a unit exponential; a zero draw is moved off the origin
    unit = np.maximum(-np.log1p(-u), np.finfo(np.float64).tiny)
    scaled = unit / rate
    if weibull_shape == 1.0:
        return scaled
    return np.power(scaled, 1.0 / weibull_shape)


def trajectory_from_lifetimes(
    lifetimes: NDArray[np.float64], horizon: float
) -> CapacityTrajectory:
    n = lifetimes.size
    deaths = np.sort(lifetimes[lifetimes < horizon])
    if deaths.size == 0:
        return CapacityTrajectory((0.0,), (1.0,), horizon)
    times, counts = np.unique(deaths, return_counts=True)
    surviving = n - np.cumsum(counts)
    return CapacityTrajectory(
        times=(0.0, *times.tolist()),
        capacities=(1.0, *(surviving / n).tolist()),
        horizon=horizon,
    )


def simulate_module(
    spec: ModuleSpec, horizon: float, rng: RngStream
) -> CapacityTrajectory:
    """Sample one module's capacity over `horizon` years of a single service life."""
    if horizon < 0:
        msg = f"horizon must be non-negative, got {horizon}"
        raise DomainError(msg)
    if horizon > spec.service_life:
        msg = (
            f"horizon {horizon} exceeds the module service life "
            f"{spec.service_life}; recycling is handled by the fleet engine"
        )
        raise DomainError(msg)
    lifetimes = sample_lifetimes(
        spec.system_count,
        spec.system.annual_failure_prob,
        rng.generator(),
        spec.system.weibull_shape,
    )
    return trajectory_from_lifetimes(lifetimes, horizon)


def capacity_at(trajectory: CapacityTrajectory, t: float) -> float:
    """Value of the capacity step function at time `t`."""
    if not 0.0 <= t <= trajectory.horizon:
        msg = f"time {t} outside trajectory domain [0, {trajectory.horizon}]"
        raise DomainError(msg)
    idx = int(np.searchsorted(trajectory.times, t, side="right")) - 1
    return trajectory.capacities[idx]


def delivered_capacity_hours(
    trajectory: CapacityTrajectory, design_capacity: int
) -> float:
    """System-hours delivered by a module with `design_capacity` systems."""
    times = np.asarray(trajectory.times)
    ends = np.append(times[1:], trajectory.horizon)
    area = float(np.dot(np.asarray(trajectory.capacities), ends - times))
    return design_capacity * area * HOURS_PER_YEAR


def replicate_capacity(
    spec: ModuleSpec,
    horizon: float,
    probe_times: Sequence[float],
    seed: int,
    replications: int,
) -> pl.DataFrame:
    """
    Run `replications` independent modules and sample their capacity.

    Replication `i` uses stream `i` of `seed`. One row per (replication, probe).
    """
    replication: list[int] = []
    time: list[float] = []
    capacity: list[float] = []
    for i in range(replications):
        trajectory = simulate_module(spec, horizon, RngStream(seed, i))
        for t in probe_times:
            replication.append(i)
            time.append(t)
            capacity.append(capacity_at(trajectory, t))
    return pl.DataFrame(
        {"replication": replication, "time": time, "capacity": capacity},
        schema={"replication": pl.Int64, "time": pl.Float64, "capacity": pl.Float64},
    )


def summarize_capacity(samples: pl.DataFrame, spec: ModuleSpec) -> pl.DataFrame:
    """Mean and standard error of capacity per probe time next to the expectation."""
    p = spec.system.annual_failure_prob
    shape = spec.system.weibull_shape
    summary = (
        samples.group_by("time")
        .agg(
            pl.col("capacity").mean().alias("mean"),
            (pl.col("capacity").std() / pl.len().sqrt()).alias("standard_error"),
            pl.len().alias("replications"),
        )
        .sort("time")
    )
    expected = [expected_capacity(p, t, shape) for t in summary["time"]]
    return summary.with_columns(pl.Series("expected", expected, dtype=pl.Float64))
