"""TOML configuration: ``[radio]``, ``[hotspot]``, ``[linkcurve]`` and ``[numerics]``."""

from __future__ import annotations

import dataclasses
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .linkbudget import LinkCurve, NetworkModel, RadioParams, build_network_model
from .numerics import QuadratureSpec
from .traffic import Hotspot


class ConfigError(ValueError):
    pass


def _default_hotspot() -> Hotspot:
    return Hotspot(r_h_km=0.44, theta_h_rad=2 * math.pi / 3, sigma_km=0.2)


@dataclass(frozen=True)
class Config:
    radio: RadioParams = field(default_factory=RadioParams)
    hotspot: Hotspot = field(default_factory=_default_hotspot)
    linkcurve: LinkCurve = field(default_factory=LinkCurve)
    numerics: QuadratureSpec = field(default_factory=QuadratureSpec)

    @property
    def model(self) -> NetworkModel:
        return build_network_model(self.radio)


_SECTIONS = {"radio": RadioParams, "hotspot": Hotspot, "linkcurve": LinkCurve,
             "numerics": QuadratureSpec}


def _build(section: str, cls, values: dict, default):
    if not isinstance(values, dict):
        raise ConfigError(f"[{section}] must be a table")
    fields = {f.name: f for f in dataclasses.fields(cls) if f.init}
    unknown = sorted(set(values) - set(fields))
    if unknown:
        raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(unknown)}")
    kwargs = dataclasses.asdict(default)
    for key, val in values.items():
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ConfigError(f"[{section}] {key} must be a number, got {val!r}")
        kwargs[key] = int(val) if key == "max_subdivisions" else float(val)
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section}]: {exc}") from exc


def config_from_dict(data: dict) -> Config:
    unknown = sorted(set(data) - set(_SECTIONS))
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(unknown)}")
    base = Config()
    parts = {name: _build(name, cls, data.get(name, {}), getattr(base, name))
             for name, cls in _SECTIONS.items()}
    return Config(**parts)


def load_config(path: str | Path | None) -> Config:
    if path is None:
        return Config()
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(data)


def dump_config(cfg: Config) -> str:
    data = {}
    for name, cls in _SECTIONS.items():
        obj = getattr(cfg, name)
        data[name] = {f.name: getattr(obj, f.name) for f in dataclasses.fields(cls) if f.init}
    return tomli_w.dumps(data)
