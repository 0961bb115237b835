from __future__ import annotations

import copy
from typing import TYPE_CHECKING, Any

import pytest
import yaml

from macrodc.fleet import Scenario

if TYPE_CHECKING:
    from collections.abc import Callable
    from pathlib import Path

BASE_DOCUMENT: dict[str, Any] = {
    "name": "test",
    "module": {"preset": "paper1000", "system": {"annual_failure_prob": 0.0}},
    "horizon": 1.0,
    "seed": 11,
    "replications": 1,
    "demand": {"until": 1.0, "steps": [{"at": 0.0, "systems": 900}]},
    "sites": [
        {
            "name": "alpha",
            "module_slots": 1,
            "module_count": 1,
            "deployment_lead_time": 0.0,
        }
    ],
}


def _merge(base: dict[str, Any], overrides: dict[str, Any]) -> dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def document(**overrides: Any) -> dict[str, Any]:
    """Base scenario document with nested overrides applied."""
    return _merge(BASE_DOCUMENT, overrides)


def scenario(**overrides: Any) -> Scenario:
    return Scenario.model_validate(document(**overrides))


def constant_demand(systems: float, until: float) -> dict[str, Any]:
    return {"until": until, "steps": [{"at": 0.0, "systems": systems}]}


def site(name: str, slots: int = 1, count: int | None = None, **extra: Any) -> dict[str, Any]:
    return {
        "name": name,
        "module_slots": slots,
        "module_count": slots if count is None else count,
        "deployment_lead_time": 0.0,
        **extra,
    }


@pytest.fixture()
def write_scenario(tmp_path: Path) -> Callable[..., Path]:
    def write(doc: dict[str, Any] | None = None, name: str = "scenario.yaml") -> Path:
        path = tmp_path / name
        path.write_text(yaml.safe_dump(doc or document()), encoding="utf-8")
        return path

    return write
