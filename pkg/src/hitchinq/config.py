"""Run-time defaults, optionally loaded from a JSON file."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    tolerance: float = 1e-9
    diagnostics_tolerance: float = 1e-9
    max_denominator_start: int = 1000
    schedule_growth: int = 10
    max_rounds: int = 20
    float_digits: int = 17
    random_seed: int = 20240607

    def __post_init__(self) -> None:
        if not (self.tolerance > 0 and self.diagnostics_tolerance > 0):
            raise ConfigError("tolerances must be positive")
        if self.schedule_growth <= 1:
            raise ConfigError("schedule growth must exceed 1")
        if self.max_denominator_start < 1 or self.max_rounds < 1:
            raise ConfigError("denominator start and round count must be positive")
        if not 1 <= self.float_digits <= 17:
            raise ConfigError("float digits must be between 1 and 17")

    @classmethod
    def load(cls, path: str | Path | None) -> Config:
        if path is None:
            return cls()
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise ConfigError(f"unknown config keys {unknown}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def schedule(self) -> dict:
        return {"max_denominator_start": self.max_denominator_start, "schedule_growth": self.schedule_growth,
                "max_rounds": self.max_rounds}

    def to_json(self) -> dict:
        return asdict(self)
