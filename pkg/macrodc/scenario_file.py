"""
Scenario files: YAML documents validated against the `Scenario` model.

The grammar is documented in ``docs/scenario-format.md``; the JSON schema of
record is printed by ``python -m macrodc schema``.
"""

from __future__ import annotations

import json
from typing import TYPE_CHECKING, Any

import yaml
from pydantic import ValidationError

from macrodc.errors import ScenarioError
from macrodc.fleet.scenario import Scenario

if TYPE_CHECKING:
    from pathlib import Path


def _validation_to_scenario_error(exc: ValidationError) -> ScenarioError:
    errors = exc.errors()
    paths = [".".join(str(p) for p in e["loc"]) for e in errors]
    detail = "; ".join(
        f"{p}: {e['msg']}" if p else e["msg"]
        for p, e in zip(paths, errors, strict=True)
    )
    return ScenarioError(detail, path=paths[0] or None)


def validate_scenario(data: Any) -> Scenario:
    """Validate a decoded scenario document, reporting the first bad field path."""
    if not isinstance(data, dict):
        msg = "a scenario must be a mapping at the top level"
        raise ScenarioError(msg)
    try:
        return Scenario.model_validate(data)
    except ValidationError as exc:
        raise _validation_to_scenario_error(exc) from None


def load_scenario(text: str) -> Scenario:
    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        msg = f"syntax error: {exc.problem or exc}"
        if mark is None:
            raise ScenarioError(msg) from None
        raise ScenarioError(msg, line=mark.line + 1, column=mark.column + 1) from None
    except yaml.YAMLError as exc:
        msg = f"syntax error: {exc}"
        raise ScenarioError(msg) from None
    return validate_scenario(data)


def parse_scenario(path: Path) -> Scenario:
    """Read, parse and validate a scenario file, applying every default."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        msg = f"cannot read scenario file: {exc.strerror}"
        raise ScenarioError(msg, path=str(path)) from None
    except UnicodeDecodeError as exc:
        msg = f"scenario file is not UTF-8: invalid byte at offset {exc.start}"
        raise ScenarioError(msg, path=str(path)) from None
    return load_scenario(text)


def scenario_document(scenario: Scenario) -> dict[str, Any]:
    return scenario.model_dump(mode="json")


def echo_scenario(scenario: Scenario) -> str:
    """YAML rendering of a resolved scenario; parsing it gives the same scenario."""
    return yaml.safe_dump(scenario_document(scenario), sort_keys=False)


def override(scenario: Scenario, **fields: Any) -> Scenario:
    """Copy of `scenario` with top-level fields replaced, revalidated."""
    updates = {k: v for k, v in fields.items() if v is not None}
    if not updates:
        return scenario
    return validate_scenario({**scenario_document(scenario), **updates})


def set_parameter(scenario: Scenario, parameter_path: str, value: float) -> Scenario:
    """
    Copy of `scenario` with the numeric field at `parameter_path` set to `value`.

    Paths are dotted, with integers indexing lists: ``sites.0.utility_outage_rate``.
    """
    document = scenario_document(scenario)
    *parents, leaf = parameter_path.split(".")
    node: Any = document
    try:
        for key in parents:
            node = node[int(key)] if isinstance(node, list) else node[key]
        current = node[int(leaf)] if isinstance(node, list) else node[leaf]
    except (KeyError, IndexError, ValueError, TypeError):
        msg = "no such scenario field"
        raise ScenarioError(msg, path=parameter_path) from None

    if isinstance(current, bool) or not isinstance(current, int | float):
        msg = f"sweep target must be numeric, found {type(current).__name__}"
        raise ScenarioError(msg, path=parameter_path)
    if isinstance(current, int) and not isinstance(current, bool):
        if not float(value).is_integer():
            msg = f"field is an integer, cannot take {value}"
            raise ScenarioError(msg, path=parameter_path)
        value = int(value)

    if isinstance(node, list):
        node[int(leaf)] = value
    else:
        node[leaf] = value
    return validate_scenario(document)


def scenario_schema() -> str:
    return json.dumps(Scenario.model_json_schema(), indent=2)
