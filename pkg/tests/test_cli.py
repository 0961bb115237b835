from __future__ import annotations

import argparse
import json
from pathlib import Path
from typing import TYPE_CHECKING, Any

import polars as pl
import pytest
import yaml
from conftest import constant_demand, document, site
from polars.testing import assert_frame_equal

from macrodc.cli import EXIT_OK, EXIT_VALIDATION, _parse_values, cmd_sweep, main
from macrodc.errors import ScenarioError
from macrodc.scenario_file import parse_scenario

if TYPE_CHECKING:
    from collections.abc import Callable

SCENARIOS = Path(__file__).parents[1] / "scenarios"
LOSSY = {"preset": "paper1000", "system": {"annual_failure_prob": 0.05}}


def _report(out: Path) -> dict[str, Any]:
    return json.loads((out / "report.json").read_text())


def _simulate(scenario: Path, out: Path, *extra: str) -> int:
    return main(["simulate", "--scenario", str(scenario), "--out", str(out), *extra])


def test_simulate_writes_outputs(
    write_scenario: Callable[..., Path], tmp_path: Path
) -> None:
    out = tmp_path / "nested" / "run"
    assert _simulate(write_scenario(), out) == EXIT_OK
    for name in [
        "report.json",
        "run_info.json",
        "trace.ndjson",
        "replications.csv",
        "summary.csv",
        "tco.csv",
        "sites.csv",
    ]:
        assert (out / name).is_file(), name
    report = _report(out)
    assert report["metadata"]["command"] == "simulate"
    assert report["metadata"]["rng"].startswith("numpy")
    assert report["metadata"]["scenario"]["module"]["system_count"] == 1000
    assert len(report["metadata"]["notes"]) >= 3


def test_same_seed_gives_identical_files(
    write_scenario: Callable[..., Path], tmp_path: Path
) -> None:
    path = write_scenario(document(module=LOSSY, replications=3))
    assert _simulate(path, tmp_path / "a") == EXIT_OK
    assert _simulate(path, tmp_path / "b") == EXIT_OK
    assert _simulate(path, tmp_path / "c", "--seed", "99") == EXIT_OK

    def read(run: str, name: str) -> bytes:
        return (tmp_path / run / name).read_bytes()

    assert read("a", "report.json") == read("b", "report.json")
    assert read("a", "trace.ndjson") == read("b", "trace.ndjson")
    assert read("a", "trace.ndjson") != read("c", "trace.ndjson")
    assert _report(tmp_path / "c")["metadata"]["seed"] == 99


def test_replication_override(
    write_scenario: Callable[..., Path], tmp_path: Path
) -> None:
    assert _simulate(write_scenario(), tmp_path, "--replications", "4") == EXIT_OK
    assert pl.read_csv(tmp_path / "replications.csv").height == 4


def test_summary_table_is_derived_from_the_report(
    write_scenario: Callable[..., Path], tmp_path: Path
) -> None:
    path = write_scenario(document(module=LOSSY, replications=5))
    assert _simulate(path, tmp_path) == EXIT_OK
    summary = _report(tmp_path)["metrics"]["summary"]
    rebuilt = pl.DataFrame(
        {
            "metric": list(summary),
            "mean": [s["mean"] for s in summary.values()],
            "standard_error": [s["standard_error"] for s in summary.values()],
        }
    )
    assert_frame_equal(pl.read_csv(tmp_path / "summary.csv"), rebuilt)


def test_invalid_scenario_exit_code(
    write_scenario: Callable[..., Path], tmp_path: Path
) -> None:
    path = write_scenario(document(sites=[site("a", stack_height=7)]))
    assert _simulate(path, tmp_path) == EXIT_VALIDATION
    assert _simulate(tmp_path / "absent.yaml", tmp_path) == EXIT_VALIDATION
    assert not (tmp_path / "report.json").exists()


def test_json_doc_format(
    write_scenario: Callable[..., Path],
    tmp_path: Path,
    capsys: pytest.CaptureFixture[str],
) -> None:
    assert _simulate(write_scenario(), tmp_path, "--format", "json-doc") == EXIT_OK
    printed = json.loads(capsys.readouterr().out)
    assert printed == _report(tmp_path)


def test_schema_command(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["schema"]) == EXIT_OK
    assert "sites" in json.loads(capsys.readouterr().out)["properties"]


def test_compare_architectures(
    write_scenario: Callable[..., Path], tmp_path: Path
) -> None:
    doc = document(
        horizon=3.0,
        demand=constant_demand(9000, 3.0),
        sites=[site("a", slots=10)],
    )
    out = tmp_path / "compare"
    assert main(["compare", "--scenario", str(write_scenario(doc)), "--out", str(out)]) == 0

    report = _report(out)
    architectures = report["architectures"]
    conventional = architectures["conventional"]
    modular = architectures["modular"]
    assert modular["field_maintenance"] == 0.0
    assert conventional["field_maintenance"] == pytest.approx(0.25 * 10 * 1000 * 1500)
    assert architectures["delta"]["field_maintenance"] == pytest.approx(-3.75e6)
    assert architectures["downtime_reduction"] == pytest.approx(0.35)
    assert architectures["downtime_hours_per_year"]["modular"] == pytest.approx(
        87.66 * 0.65
    )
    # the conventional facility takes two years to build
    assert architectures["conventional_build_time"] == 2.0
    assert architectures["shortfall_hours"]["modular"] == 0.0
    assert architectures["shortfall_hours"]["conventional"] == pytest.approx(
        9000 * 2 * 8766
    )
    assert report["redundancy"] is None
    assert (out / "compare.csv").is_file()
    downtime = pl.read_csv(out / "downtime.csv")
    assert downtime.columns == [
        "architecture",
        "downtime_hours_per_year",
        "shortfall_hours",
    ]


def test_compare_runs_both_strategies_for_fleets(
    write_scenario: Callable[..., Path], tmp_path: Path
) -> None:
    doc = document(
        demand=constant_demand(1500, 1.0),
        sites=[site("a", facility={"generator_count": 2}), site("b")],
    )
    assert main(["compare", "--scenario", str(write_scenario(doc)), "--out", str(tmp_path)]) == 0
    redundancy = _report(tmp_path)["redundancy"]
    assert redundancy["generator_capex"] == 3_000_000
    assert redundancy["onsite_generators"]["strategy"] == "onsite_generators"
    assert redundancy["geo_failover"]["strategy"] == "geo_failover"
    assert pl.read_csv(tmp_path / "redundancy.csv").height == 2


def _sweep(scenario: Path, out: Path, parameter: str, values: str) -> int:
    return main(
        [
            "sweep",
            "--scenario",
            str(scenario),
            "--out",
            str(out),
            "--parameter",
            parameter,
            "--values",
            values,
        ]
    )


def test_failure_probability_sweep_is_monotone(
    write_scenario: Callable[..., Path], tmp_path: Path
) -> None:
    path = write_scenario(document(module=LOSSY, replications=20))
    assert (
        _sweep(path, tmp_path, "module.system.annual_failure_prob", "0.01,0.05,0.1")
        == EXIT_OK
    )
    table = pl.read_csv(tmp_path / "sweep.csv")
    assert table["value"].to_list() == [0.01, 0.05, 0.1]
    delivered = table["delivered_system_hours"].to_list()
    assert delivered[0] >= delivered[1] >= delivered[2]
    series = pl.read_ndjson(tmp_path / "sweep_series.ndjson")
    assert series.height == 60


def test_single_value_sweep_matches_simulate(
    write_scenario: Callable[..., Path], tmp_path: Path
) -> None:
    path = write_scenario(document(module=LOSSY, replications=5))
    assert _simulate(path, tmp_path / "sim") == EXIT_OK
    assert (
        _sweep(path, tmp_path / "sweep", "module.system.annual_failure_prob", "0.05")
        == EXIT_OK
    )
    simulated = _report(tmp_path / "sim")["metrics"]["summary"]
    swept = _report(tmp_path / "sweep")["sweep"][0]["summary"]
    assert swept == simulated


def test_density_sweep_sides(
    write_scenario: Callable[..., Path], tmp_path: Path
) -> None:
    doc = yaml.safe_load((SCENARIOS / "single_site.yaml").read_text())
    doc["replications"] = 3
    path = write_scenario(doc)
    assert _sweep(path, tmp_path, "sites.0.design_density", "100,350,600,750") == 0
    rows = _report(tmp_path)["sweep"]
    # ten paper1000 modules in four stacks next to the building: about 443 W/sqft
    for row in rows:
        if row["value"] < 443:
            assert row["wasted_floor_cost"] > 0
            assert row["stranded_cost"] == 0
        else:
            assert row["stranded_cost"] > 0
            assert row["wasted_floor_cost"] == 0


def test_sweep_rejects_non_numeric_target(
    write_scenario: Callable[..., Path], tmp_path: Path
) -> None:
    assert _sweep(write_scenario(), tmp_path, "strategy", "1,2") == EXIT_VALIDATION


def test_parse_values() -> None:
    assert _parse_values("0.1,0.2") == [0.1, 0.2]
    assert _parse_values("0:1:3") == [0.0, 0.5, 1.0]
    assert _parse_values("5:9:1") == [5.0]
    with pytest.raises(argparse.ArgumentTypeError, match="no sweep values"):
        _parse_values(",")


@pytest.mark.parametrize(
    "extra",
    [
        ["--values", "abc"],
        ["--values", ","],
        ["--values", "0.1", "--seed", "x"],
        ["--values", "0.1", "--format", "xml"],
    ],
)
def test_bad_arguments_are_validation_errors(
    write_scenario: Callable[..., Path], tmp_path: Path, extra: list[str]
) -> None:
    argv = [
        "sweep",
        "--scenario",
        str(write_scenario()),
        "--out",
        str(tmp_path),
        "--parameter",
        "horizon",
        *extra,
    ]
    with pytest.raises(SystemExit) as exc_info:
        main(argv)
    assert exc_info.value.code == EXIT_VALIDATION
    assert not (tmp_path / "report.json").exists()


def test_sweep_without_values_is_rejected(
    write_scenario: Callable[..., Path], tmp_path: Path
) -> None:
    scenario = parse_scenario(write_scenario())
    with pytest.raises(ScenarioError, match="at least one value"):
        cmd_sweep(scenario, "horizon", [], tmp_path)


def test_undecodable_scenario_exit_code(tmp_path: Path) -> None:
    path = tmp_path / "latin1.yaml"
    path.write_bytes(b"name: \xff\xfe\n")
    assert _simulate(path, tmp_path / "out") == EXIT_VALIDATION
