from __future__ import annotations

import json
import logging
from contextlib import contextmanager
from datetime import datetime, timezone
from typing import TYPE_CHECKING

from linetimer import CodeTimer

from settings import Settings

UTC = timezone.utc

if TYPE_CHECKING:
    from collections.abc import Iterator
    from pathlib import Path

    import polars as pl
    from pydantic import BaseModel

logger = logging.getLogger(__name__)

settings = Settings()


def configure_logging() -> None:
    logging.basicConfig(
        level=settings.run.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


@contextmanager
def timed(name: str) -> Iterator[CodeTimer]:
    """Time a block and log the duration in seconds."""
    with CodeTimer(name=name, unit="s", logger_func=logger.info) as timer:
        yield timer


def prepare_output_dir(path: Path | None) -> Path:
    """Return the output directory, creating it when missing."""
    out = path or settings.paths.output
    out.mkdir(parents=True, exist_ok=True)
    return out


def write_model(model: BaseModel, path: Path) -> None:
    path.write_text(model.model_dump_json(indent=2) + "\n", encoding="utf-8")


def write_table(frame: pl.DataFrame, path: Path) -> None:
    frame.write_csv(path)


def write_run_info(out: Path, command: str, elapsed_s: float) -> None:
    """Wall-clock facts kept apart from the reproducible report body."""
    info = {
        "command": command,
        "generated_at": datetime.now(UTC).isoformat(timespec="seconds"),
        "elapsed_s": round(elapsed_s, 3),
    }
    path = out / settings.paths.run_info_filename
    path.write_text(json.dumps(info, indent=2) + "\n", encoding="utf-8")
