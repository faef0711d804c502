#!/usr/bin/env python3
"""User configuration from ~/.g2cert/config.yaml."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from g2cert.errors import ConfigError

logger = logging.getLogger(__name__)

G2CERT_DIR = Path.home() / ".g2cert"
CONFIG_PATH = G2CERT_DIR / "config.yaml"
DB_ENV = "G2CERT_DB"

DEFAULT_SEARCH = {
    "max_u_dim": 6,
    "max_w_monomials": 3,
    "lambda_samples": 200,
    "sample_radius": 3,
    "seed": 20240607,
}


@dataclass(frozen=True)
class Settings:
    database_dir: Path | None = None
    max_u_dim: int = DEFAULT_SEARCH["max_u_dim"]
    max_w_monomials: int = DEFAULT_SEARCH["max_w_monomials"]
    lambda_samples: int = DEFAULT_SEARCH["lambda_samples"]
    sample_radius: int = DEFAULT_SEARCH["sample_radius"]
    seed: int = DEFAULT_SEARCH["seed"]
    family_samples: dict[str, tuple[Fraction, ...]] = field(default_factory=dict)
    jobs: int = 1
    strict_checksums: bool = False


def _int(section: dict, key: str, where: str, minimum: int = 0) -> int:
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}.{key} must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{where}.{key} must be >= {minimum}, got {value}")
    return value


def _samples(name: str, values) -> tuple[Fraction, ...]:
    if not isinstance(values, list) or not values:
        raise ConfigError(f"families.{name}.samples must be a non-empty list")
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, str)):
            raise ConfigError(f"families.{name}.samples: {v!r} is not an integer or 'p/q' string")
        try:
            out.append(Fraction(v))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"families.{name}.samples: {v!r} is not rational") from None
    return tuple(out)


def load_settings(path: Path | None = None) -> Settings:
    """Read the config file; a missing file means defaults."""
    import yaml

    path = path or CONFIG_PATH
    raw = {}
    if path.exists():
        try:
            with open(path) as f:
                raw = yaml.safe_load(f) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")

    for key in raw:
        if key not in ("database", "search", "families", "jobs"):
            logger.warning("ignoring unknown config key %r in %s", key, path)

    kwargs: dict = {}
    database = raw.get("database") or {}
    if not isinstance(database, dict):
        raise ConfigError("database must be a mapping")
    if database.get("dir"):
        kwargs["database_dir"] = Path(str(database["dir"])).expanduser()
    if "strict" in database:
        if not isinstance(database["strict"], bool):
            raise ConfigError(f"database.strict must be true or false, got {database['strict']!r}")
        kwargs["strict_checksums"] = database["strict"]

    search = raw.get("search") or {}
    if not isinstance(search, dict):
        raise ConfigError("search must be a mapping")
    for key in search:
        if key not in DEFAULT_SEARCH:
            logger.warning("ignoring unknown search key %r", key)
            continue
        kwargs[key] = _int(search, key, "search")

    families = raw.get("families") or {}
    if not isinstance(families, dict):
        raise ConfigError("families must be a mapping")
    family_samples = {}
    for name, entry in families.items():
        if not isinstance(entry, dict):
            raise ConfigError(f"families.{name} must be a mapping with a samples list")
        family_samples[str(name)] = _samples(name, entry.get("samples"))
    kwargs["family_samples"] = family_samples

    if "jobs" in raw:
        kwargs["jobs"] = _int(raw, "jobs", "config", minimum=1)
    return Settings(**kwargs)


def resolve_database_dir(settings: Settings, cli_dir: str | None = None) -> Path | None:
    """G2CERT_DB beats --db beats database.dir; None means the bundled data."""
    env = os.environ.get(DB_ENV)
    if env:
        return Path(env)
    if cli_dir:
        return Path(cli_dir)
    return settings.database_dir

