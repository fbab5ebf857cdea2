"""Run configuration: YAML files plus command-line overrides.

A config file is a flat YAML mapping whose keys mirror TrainConfig
fields. Overrides are ``key=value`` strings; values are parsed as YAML
so numbers, booleans, and null keep their types. The fully resolved
config is written next to the run outputs for reproducibility.
"""

from __future__ import annotations

from dataclasses import asdict, fields
from pathlib import Path

import yaml

from .training import TrainConfig


class ConfigError(ValueError):
    """Unusable run configuration."""


_FIELDS = {f.name for f in fields(TrainConfig)}


def load_config_file(path: str | Path) -> dict:
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML: {exc}") from exc
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected a mapping at the top level")
    return raw


def apply_overrides(config: dict, overrides: list[str]) -> dict:
    out = dict(config)
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        try:
            parsed = yaml.safe_load(value)
        except yaml.YAMLError as exc:
            raise ConfigError(f"override {item!r}: bad value: {exc}") from exc
        if isinstance(parsed, str):
            # yaml leaves dot-less scientific notation like 1e-4 as a string
            try:
                parsed = float(parsed)
            except ValueError:
                pass
        out[key.strip()] = parsed
    return out


def build_train_config(config: dict) -> TrainConfig:
    unknown = set(config) - _FIELDS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = {"train_path", "out_dir"} - set(config)
    if missing:
        raise ConfigError(f"missing required config keys: {sorted(missing)}")
    try:
        return TrainConfig(**config)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def write_snapshot(cfg: TrainConfig, path: str | Path) -> None:
    data = {k: str(v) if isinstance(v, Path) else v for k, v in asdict(cfg).items()}
    Path(path).write_text(yaml.safe_dump(data, sort_keys=True))
