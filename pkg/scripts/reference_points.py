#!/usr/bin/env python3
"""Print the reference numbers the models are calibrated against."""

import argparse
import sys

from settings import Settings

try:
    import polars as pl

    from macrodc.core_model import (
        PRESETS,
        areal_system_density,
        module_footprint,
        power_density,
    )
    from macrodc.econ_model import (
        EconInputs,
        FacilityParams,
        default_policy,
        downtime_model,
        facility_capex,
        module_capex,
        tco,
    )
    from macrodc.failure_engine import replicate_capacity, summarize_capacity
    from macrodc.power_floor import DensityPreset, density_table
except ImportError:
    print("Please install the project requirements to use this script.")
    sys.exit(1)

settings = Settings()


def preset_table() -> pl.DataFrame:
    return pl.DataFrame(
        [
            {
                "preset": name,
                "footprint_sqft": module_footprint(spec),
                "systems_per_sqft": areal_system_density(spec),
                "watts_per_sqft": power_density(spec),
                "price_new": module_capex(spec, "new"),
                "price_remanufactured": module_capex(spec, "remanufactured"),
            }
            for name, spec in PRESETS.items()
        ]
    )


def capacity_table(preset: str, replications: int, seed: int) -> pl.DataFrame:
    spec = PRESETS[preset]
    probes = [0.5 * i for i in range(int(2 * spec.service_life) + 1)]
    samples = replicate_capacity(spec, spec.service_life, probes, seed, replications)
    return summarize_capacity(samples, spec)


def maintenance_table(rates: list[float], container_price: float) -> pl.DataFrame:
    spec = PRESETS["paper1000"].model_copy(
        update={"container_price_new": container_price}
    )
    rows = []
    for rate in rates:
        totals = {
            architecture: tco(
                architecture,
                EconInputs(
                    module=spec,
                    module_count=10,
                    cooling_overhead=spec.cooling_overhead,
                    maintenance=default_policy(architecture, rate),
                ),
                spec.service_life,
            ).total
            for architecture in ("conventional", "modular")
        }
        rows.append(
            {
                "maintenance_rate": rate,
                **totals,
                "modular_minus_conventional": totals["modular"]
                - totals["conventional"],
            }
        )
    return pl.DataFrame(rows)


def downtime_table(base: float, shares: list[float]) -> pl.DataFrame:
    return pl.DataFrame(
        {
            "admin_error_share": shares,
            "modular_downtime_hours": [downtime_model(base, s, 1.0) for s in shares],
        }
    ).with_columns(pl.lit(base).alias("conventional_downtime_hours"))


def parse_floats(s: str) -> list[float]:
    return [float(x) for x in s.split(",") if x]


def main() -> None:
    parser = argparse.ArgumentParser(
        description="Print calibration tables for presets, costs and capacity decay.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument(
        "-p",
        "--preset",
        choices=sorted(PRESETS),
        default="paper1000",
        help="Module preset for the capacity decay table",
    )
    parser.add_argument(
        "-r",
        "--replications",
        type=int,
        default=2000,
        help="Replications for the capacity decay table",
        metavar="<n>",
    )
    parser.add_argument(
        "-s",
        "--seed",
        type=int,
        default=2007,
        help="Seed for the capacity decay table",
        metavar="<u64>",
    )
    parser.add_argument(
        "--rates",
        type=parse_floats,
        default="0,0.1,0.25",
        help="Maintenance rates to compare",
        metavar="<list of floats>",
    )
    parser.add_argument(
        "--container-price",
        type=float,
        default=200_000.0,
        help="New container price in the maintenance comparison",
        metavar="<usd>",
    )
    parser.add_argument(
        "-o",
        "--output",
        action="store_true",
        help="Also write every table as CSV under the output directory",
    )

    args = parser.parse_args()

    facility = FacilityParams()
    tables = {
        "presets": preset_table(),
        "facility": pl.DataFrame([facility_capex(facility).model_dump()]),
        "density": density_table(
            DensityPreset.sweep_points(), DensityPreset.RACKABLE, facility
        ),
        "capacity": capacity_table(args.preset, args.replications, args.seed),
        "maintenance": maintenance_table(args.rates, args.container_price),
        "downtime": downtime_table(87.66, [0.2, 0.35, 0.5]),
    }

    with pl.Config(tbl_cols=-1, tbl_rows=50):
        for name, table in tables.items():
            print(f"{name}\n{table}\n")

    if args.output:
        out = settings.paths.output / "reference"
        out.mkdir(parents=True, exist_ok=True)
        for name, table in tables.items():
            table.write_csv(out / f"{name}.csv")


if __name__ == "__main__":
    main()
