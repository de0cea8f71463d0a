"""JSON file loading with located error messages."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .behavior import Behavior, BehaviorError
from .behavior import from_dict as behavior_from_dict
from .scenario import Scenario, ScenarioError
from .scenario import from_dict as scenario_from_dict


class InputError(ValueError):
    """Unreadable or malformed input; ``location`` is ``{"file", "line", "column"}`` when known."""

    def __init__(self, message: str, kind: str = "parse", location: dict[str, Any] | None = None,
                 violations: list[tuple[str, str]] | None = None):
        super().__init__(message)
        self.kind = kind
        self.location = location or {}
        self.violations = violations or []

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind, "message": str(self)}
        if self.location:
            out["location"] = self.location
        if self.violations:
            out["violations"] = [{"kind": k, "detail": d} for k, d in self.violations]
        return out


def load_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}", "io", {"file": str(path)}) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        loc = {"file": str(path), "line": exc.lineno, "column": exc.colno}
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}", "parse", loc) from exc


def load_scenario(path: str | Path) -> Scenario:
    data = load_json(path)
    try:
        return scenario_from_dict(data)
    except ScenarioError as exc:
        raise InputError(f"{path}: invalid scenario", "scenario", {"file": str(path)}, exc.violations) from exc


def load_behavior(path: str | Path, exact: bool = False) -> Behavior:
    """Read a behavior file; a string ``scenario`` is a path relative to the behavior file."""
    path = Path(path)
    data = load_json(path)
    scenario = None
    if isinstance(data, dict) and isinstance(data.get("scenario"), str):
        scenario = load_scenario(path.parent / data["scenario"])
    elif isinstance(data, dict) and isinstance(data.get("scenario"), dict):
        try:
            scenario = scenario_from_dict(data["scenario"])
        except ScenarioError as exc:
            raise InputError(f"{path}: invalid scenario", "scenario", {"file": str(path), "field": "scenario"},
                             exc.violations) from exc
    try:
        return behavior_from_dict(data, scenario=scenario, exact=exact)
    except BehaviorError as exc:
        raise InputError(f"{path}: invalid behavior", "behavior", {"file": str(path), "field": "tables"},
                         exc.violations) from exc


def dump(obj: Any) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"
