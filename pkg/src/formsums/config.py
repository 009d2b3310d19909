"""Experiment descriptions read from TOML or JSON.

A config names one command, its inputs, explicit thresholds, the worker count
and an output location.  Validation fills in every default so that the values
actually used appear in the written artifacts.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

COMMANDS = (
    "disc", "shape", "rho", "rhostar", "dan-check", "fpd", "reduce", "verify-cert",
    "sum", "nair-check", "euler-product", "bound-check",
)
FORMATS = ("csv", "json")
BOUND_KINDS = ("theorem1", "corollary2", "fixed-variable")

DEFAULT_THRESHOLDS = {
    "nair-check": {"spread": 2.0},
    "bound-check": {"spread": 2.0},
}

# required input keys per command; alternatives separated by "|"
REQUIRED = {
    "disc": ("form|poly",),
    "shape": ("form",),
    "rho": ("poly", "m"),
    "rhostar": ("form", "m|primes"),
    "dan-check": ("polys", "p_max", "pl_max"),
    "fpd": ("poly",),
    "reduce": ("poly",),
    "verify-cert": ("certificate",),
    "sum": ("form|poly", "h", "grid"),
    "nair-check": ("poly", "h", "grid"),
    "euler-product": ("form", "h", "grid"),
    "bound-check": ("kind", "form", "grid"),
}


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending entry."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


@dataclass
class ExperimentConfig:
    command: str
    inputs: dict[str, Any] = field(default_factory=dict)
    thresholds: dict[str, Any] = field(default_factory=dict)
    jobs: int = 1
    format: str = "csv"
    out: Optional[str] = None

    def to_dict(self) -> dict:
        d = {"command": self.command, "jobs": self.jobs, "format": self.format,
             "inputs": dict(self.inputs), "thresholds": dict(self.thresholds)}
        if self.out is not None:
            d["out"] = self.out
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("<root>", "config must be a table/object")
        unknown = set(data) - {"command", "inputs", "thresholds", "jobs", "format", "out"}
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown top-level field")
        if "command" not in data:
            raise ConfigError("command", "missing")
        for key in ("inputs", "thresholds"):
            if not isinstance(data.get(key, {}), dict):
                raise ConfigError(key, "must be a table/object")
        return cls(
            command=data["command"], inputs=dict(data.get("inputs", {})),
            thresholds=dict(data.get("thresholds", {})), jobs=data.get("jobs", 1),
            format=data.get("format", "csv"), out=data.get("out"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_toml(self) -> str:
        return tomli_w.dumps(self.to_dict())

    @classmethod
    def from_text(cls, text: str, suffix: str) -> "ExperimentConfig":
        if suffix == ".json":
            try:
                data = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ConfigError("<file>", f"invalid JSON: {exc}") from None
        else:
            try:
                data = tomllib.loads(text)
            except tomllib.TOMLDecodeError as exc:
                raise ConfigError("<file>", f"invalid TOML: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
        return cls.from_text(text, path.suffix.lower())

    def digest(self) -> str:
        """sha256 of command, inputs and thresholds; workers and paths excluded."""
        payload = json.dumps({"command": self.command, "inputs": self.inputs, "thresholds": self.thresholds},
                             sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()

    def validate(self) -> "ExperimentConfig":
        if self.command not in COMMANDS:
            raise ConfigError("command", f"unknown command {self.command!r}; expected one of {', '.join(COMMANDS)}")
        if self.format not in FORMATS:
            raise ConfigError("format", f"must be one of {FORMATS}, got {self.format!r}")
        if isinstance(self.jobs, bool) or not isinstance(self.jobs, int) or self.jobs < 1:
            raise ConfigError("jobs", f"must be a positive integer, got {self.jobs!r}")
        for req in REQUIRED[self.command]:
            options = req.split("|")
            if not any(o in self.inputs for o in options):
                raise ConfigError(f"inputs.{options[0]}", "missing" + (
                    f" (one of {', '.join(options)} is required)" if len(options) > 1 else ""))
        if "grid" in self.inputs:
            g = self.inputs["grid"]
            if not isinstance(g, list) or not g:
                raise ConfigError("inputs.grid", "must be a non-empty list of positive integers")
            if any(isinstance(x, bool) or not isinstance(x, int) or x < 1 for x in g):
                raise ConfigError("inputs.grid", f"entries must be positive integers, got {g}")
        if self.command == "bound-check" and self.inputs["kind"] not in BOUND_KINDS:
            raise ConfigError("inputs.kind", f"must be one of {BOUND_KINDS}, got {self.inputs['kind']!r}")
        for key, value in DEFAULT_THRESHOLDS.get(self.command, {}).items():
            self.thresholds.setdefault(key, value)
        for key, value in self.thresholds.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"thresholds.{key}", f"must be a number, got {value!r}")
        return self
