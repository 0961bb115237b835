from pathlib import Path
from typing import Literal, TypeAlias

from pydantic import computed_field
from pydantic_settings import BaseSettings, SettingsConfigDict

OutputFormat: TypeAlias = Literal["table", "csv", "json-doc"]
LogLevel: TypeAlias = Literal["DEBUG", "INFO", "WARNING", "ERROR"]


class Paths(BaseSettings):
    output: Path = Path("output/run")
    scenarios: Path = Path("scenarios")

    trace_filename: str = "trace.ndjson"
    report_filename: str = "report.json"
    run_info_filename: str = "run_info.json"

    model_config = SettingsConfigDict(
        env_prefix="path_", env_file=".env", extra="ignore"
    )


class Run(BaseSettings):
    replications: int | None = None  # None -> scenario value

    workers: int = 1  # Replications run on a thread pool when > 1
    write_traces: bool = True
    log_level: LogLevel = "INFO"

    model_config = SettingsConfigDict(
        env_prefix="run_", env_file=".env", extra="ignore"
    )


class Report(BaseSettings):
    format: OutputFormat = "table"
    include_series: bool = True  # Per-replication rows in report.json
    table_rows: int = 50

    model_config = SettingsConfigDict(
        env_prefix="report_", env_file=".env", extra="ignore"
    )


class Settings(BaseSettings):
    paths: Paths = Paths()
    report: Report = Report()
    run: Run = Run()

    @computed_field  # type: ignore[misc]
    @property
    def parallel(self) -> bool:
        return self.run.workers > 1

    model_config = SettingsConfigDict(env_file=".env", extra="ignore")
