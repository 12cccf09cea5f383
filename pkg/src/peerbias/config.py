"""Plain-text grid configuration.

The format is INI-style key/value sections:

    [population]
    n = 1000
    trait_mean = 50
    trait_sd = 10

    [formation]
    eta0 = -2.5
    eta1 = 0, 0.025, 0.05

    [retention]
    eta0 = 0, 0.5, 1.0, 1.85
    eta1 = 0, 0.025, 0.05

    [influence]
    b1 = 0
    shock_sd = 5

    [execution]
    replications = 1000
    seed = 42
    threads = 1

Comma-separated values on formation.eta1, retention.eta0, retention.eta1
and influence.b1 expand into a Cartesian grid, ordered with retention.eta0
outermost, then formation.eta1, then retention.eta1, then b1 (matching the
built-in grid's row order). Omitted keys fall back to defaults, but a file
with no recognized keys at all defines no cells and is rejected.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass

from .params import SimParams

_SCHEMA = {
    "population": {"n", "trait_mean", "trait_sd"},
    "formation": {"eta0", "eta1"},
    "retention": {"eta0", "eta1"},
    "influence": {"b1", "shock_sd"},
    "execution": {"replications", "seed", "threads"},
}

_LIST_KEYS = {
    ("formation", "eta1"),
    ("retention", "eta0"),
    ("retention", "eta1"),
    ("influence", "b1"),
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GridConfig:
    cells: list
    threads: int


def load_config(path: str) -> GridConfig:
    """Parse a config file into a validated list of grid cells."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle, source=path)
    except (configparser.Error, OSError) as exc:
        raise ConfigError(f"config parse error: {exc}") from exc

    values = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key '{key}' in section [{section}]")
            values[(section, key)] = raw
    if not values:
        raise ConfigError("no cells defined")

    def floats(section, key, default):
        raw = values.get((section, key))
        if raw is None:
            return list(default)
        try:
            return [float(part) for part in raw.split(",") if part.strip()]
        except ValueError as exc:
            raise ConfigError(f"bad value for {section}.{key}: {raw!r}") from exc

    def scalar(section, key, default, kind=float):
        raw = values.get((section, key))
        if raw is None:
            return default
        try:
            return kind(float(raw)) if kind is int else kind(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {section}.{key}: {raw!r}") from exc

    for section, key in values:
        if (section, key) not in _LIST_KEYS and "," in values[(section, key)]:
            raise ConfigError(f"{section}.{key} does not accept a list")

    base = SimParams(
        n=scalar("population", "n", 1000, int),
        trait_mean=scalar("population", "trait_mean", 50.0),
        trait_sd=scalar("population", "trait_sd", 10.0),
        shock_sd=scalar("influence", "shock_sd", 5.0),
        eta0_form=scalar("formation", "eta0", -2.5),
        replications=scalar("execution", "replications", 1000, int),
        master_seed=scalar("execution", "seed", 0, int),
    )
    cells = [
        base.with_(
            eta0_ret=eta0_ret, eta1_form=eta1_form, eta1_ret=eta1_ret, b1=b1
        )
        for eta0_ret in floats("retention", "eta0", [0.0])
        for eta1_form in floats("formation", "eta1", [0.0])
        for eta1_ret in floats("retention", "eta1", [0.0])
        for b1 in floats("influence", "b1", [0.0])
    ]
    if not cells:
        raise ConfigError("no cells defined")
    return GridConfig(cells=cells, threads=scalar("execution", "threads", 1, int))
