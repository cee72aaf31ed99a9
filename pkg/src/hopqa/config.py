"""Runtime configuration with flag > environment > file > default precedence.

The config file is a flat JSON object whose keys match the ``Config``
field names. Environment variables use the same names upper-cased with the
``HOPQA_`` prefix (``HOPQA_K_INFO=20``). The API key is read only from the
``HOPQA_API_KEY`` environment variable, never from a flag or file.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping

from .errors import ContractViolation

ENV_PREFIX = "HOPQA_"
API_KEY_ENV = "HOPQA_API_KEY"


@dataclass
class Config:
    k_info: int = 15
    k_sim: int = 10
    chunk_window: int = 3
    chunk_stride: int = 2
    max_steps: int = 6
    generator_mode: str = "stub"
    endpoint_url: str = ""
    model: str = ""
    decompose_model: str = ""
    embed_endpoint_url: str = ""
    embed_model: str = ""
    stub_script: str = ""
    temperature: float = 0.0
    workers: int = 1
    context_char_budget: int = 0

    def validate(self) -> "Config":
        if self.k_info < 0 or self.k_sim < 0:
            raise ContractViolation("k_info and k_sim must be >= 0")
        if self.k_info == 0 and self.k_sim == 0:
            raise ContractViolation("k_info and k_sim must not both be 0")
        if self.chunk_window < 1:
            raise ContractViolation("chunk_window must be >= 1")
        if not 1 <= self.chunk_stride <= self.chunk_window:
            raise ContractViolation("chunk_stride must lie in 1..chunk_window")
        if self.max_steps < 1:
            raise ContractViolation("max_steps must be >= 1")
        if self.workers < 1:
            raise ContractViolation("workers must be >= 1")
        if self.generator_mode not in ("stub", "live"):
            raise ContractViolation(
                f"generator_mode must be 'stub' or 'live', got "
                f"{self.generator_mode!r}"
            )
        if self.temperature < 0:
            raise ContractViolation("temperature must be >= 0")
        return self


_FIELD_TYPES = {f.name: f.type for f in fields(Config)}


def _coerce(name: str, value: Any) -> Any:
    kind = _FIELD_TYPES[name]
    try:
        if kind == "int":
            return int(value)
        if kind == "float":
            return float(value)
        return str(value)
    except (TypeError, ValueError):
        raise ContractViolation(f"config key {name!r}: bad value {value!r}")


def load_config(
    file_path: str | Path | None = None,
    env: Mapping[str, str] | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> Config:
    """Merge the three override layers onto the defaults and validate."""
    values: dict[str, Any] = {}

    if file_path is not None:
        with open(file_path, "r", encoding="utf-8") as handle:
            try:
                data = json.load(handle)
            except json.JSONDecodeError as exc:
                raise ContractViolation(f"config file {file_path}: {exc}")
        if not isinstance(data, dict):
            raise ContractViolation(
                f"config file {file_path}: expected a flat JSON object"
            )
        for key, value in data.items():
            if key not in _FIELD_TYPES:
                raise ContractViolation(
                    f"config file {file_path}: unknown key {key!r}"
                )
            values[key] = _coerce(key, value)

    env = os.environ if env is None else env
    for name in _FIELD_TYPES:
        env_name = ENV_PREFIX + name.upper()
        if env_name in env:
            values[name] = _coerce(name, env[env_name])

    if overrides:
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in _FIELD_TYPES:
                raise ContractViolation(f"unknown config key {key!r}")
            values[key] = _coerce(key, value)

    return Config(**values).validate()


def api_key(env: Mapping[str, str] | None = None) -> str | None:
    env = os.environ if env is None else env
    return env.get(API_KEY_ENV)
