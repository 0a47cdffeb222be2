"""Pipeline configuration: defaults, TOML file, environment, flag overrides.

Precedence (highest wins): command-line flags > ``TFA_AUDIT_*`` environment
variables > config file values > built-in defaults. The file may use flat
keys or the sections shown in ``demos/audit.toml``; both spell the same
settings.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

ENV_PREFIX = "TFA_AUDIT_"

FORMATS = ("csv", "json", "markdown", "all")
ZEROSHOT_BACKENDS = ("mock", "lexical", "http")
EMOTION_BACKENDS = ("mock", "http")


class ConfigError(Exception):
    """Config file unreadable or structurally invalid."""


@dataclass
class PipelineConfig:
    seeds: str | None = None
    out: str = "audit_run"
    taxonomy_dir: str | None = None
    min_words: int = 30
    max_depth: int = 4
    delay_ms: int = 500
    time_budget_s: float = 3600.0
    max_pages: int | None = None
    fetcher: str = "static"
    render_endpoint: str | None = None
    obey_robots: bool = True
    max_workers: int = 4
    threshold: float = 0.5
    min_group: int = 15
    zeroshot_backend: str = "mock"
    emotion_backend: str = "mock"
    endpoint: str | None = None
    format: str = "all"
    cooccurrence_k: int = 3
    example_domains_k: int = 3

    def snapshot(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


# Config-file sections -> dataclass field, for the sectioned TOML layout.
_SECTION_FIELDS = {
    "crawl": {
        "max_depth": "max_depth",
        "delay_ms": "delay_ms",
        "time_budget_s": "time_budget_s",
        "max_pages": "max_pages",
        "fetcher": "fetcher",
        "render_endpoint": "render_endpoint",
        "obey_robots": "obey_robots",
        "max_workers": "max_workers",
    },
    "extract": {"min_words": "min_words"},
    "classify": {"threshold": "threshold", "min_group": "min_group"},
    "backends": {
        "zeroshot": "zeroshot_backend",
        "emotion": "emotion_backend",
        "endpoint": "endpoint",
    },
    "report": {
        "format": "format",
        "cooccurrence_k": "cooccurrence_k",
        "example_domains_k": "example_domains_k",
    },
}

_FIELD_TYPES = {f.name: f.type for f in fields(PipelineConfig)}


def _flatten_file(data: dict, path: str) -> dict:
    flat = {}
    field_names = set(_FIELD_TYPES)
    for key, value in data.items():
        if isinstance(value, dict):
            mapping = _SECTION_FIELDS.get(key)
            if mapping is None:
                raise ConfigError(f"{path}: unknown section [{key}]")
            for sub_key, sub_value in value.items():
                if sub_key not in mapping:
                    raise ConfigError(f"{path}: unknown key {sub_key!r} in [{key}]")
                flat[mapping[sub_key]] = sub_value
        elif key in field_names:
            flat[key] = value
        else:
            raise ConfigError(f"{path}: unknown key {key!r}")
    return flat


def _coerce(name: str, raw: str):
    """Parse an environment/flag string to the field's declared type."""
    declared = _FIELD_TYPES[name]
    if raw == "" or raw.lower() == "none":
        return None
    if "bool" in declared:
        return raw.lower() in ("1", "true", "yes", "on")
    if "int" in declared:
        return int(raw)
    if "float" in declared:
        return float(raw)
    return raw


def _env_overrides(env) -> dict:
    overrides = {}
    for name in _FIELD_TYPES:
        raw = env.get(ENV_PREFIX + name.upper())
        if raw is not None:
            try:
                overrides[name] = _coerce(name, raw)
            except ValueError as exc:
                raise ConfigError(
                    f"environment variable {ENV_PREFIX + name.upper()}: {exc}"
                ) from exc
    return overrides


def load_config(
    path: str | Path | None = None,
    flag_overrides: dict | None = None,
    env=os.environ,
) -> PipelineConfig:
    """Resolve settings with precedence flags > env > file > defaults."""
    values = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        values.update(_flatten_file(data, str(path)))
    values.update(_env_overrides(env))
    if flag_overrides:
        values.update({k: v for k, v in flag_overrides.items() if v is not None})
    try:
        return PipelineConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def validate_config(cfg: PipelineConfig) -> list:
    """Every problem found, as human-readable strings; empty means valid."""
    errors = []
    if not 0.0 <= cfg.threshold <= 1.0:
        errors.append(f"threshold must be in [0, 1], got {cfg.threshold}")
    if cfg.min_group < 1:
        errors.append(f"min_group must be >= 1, got {cfg.min_group}")
    if cfg.min_words < 0:
        errors.append(f"min_words must be >= 0, got {cfg.min_words}")
    if cfg.max_depth < 0:
        errors.append(f"max_depth must be >= 0, got {cfg.max_depth}")
    if cfg.delay_ms < 0:
        errors.append(f"delay_ms must be >= 0, got {cfg.delay_ms}")
    if cfg.time_budget_s <= 0:
        errors.append(f"time_budget_s must be positive, got {cfg.time_budget_s}")
    if cfg.max_pages is not None and cfg.max_pages < 1:
        errors.append(f"max_pages must be >= 1 when set, got {cfg.max_pages}")
    if cfg.fetcher not in ("static", "rendered"):
        errors.append(f"fetcher must be static or rendered, got {cfg.fetcher!r}")
    if cfg.fetcher == "rendered" and not cfg.render_endpoint:
        errors.append("rendered fetcher requires render_endpoint")
    if cfg.zeroshot_backend not in ZEROSHOT_BACKENDS:
        errors.append(
            f"zeroshot_backend must be one of {ZEROSHOT_BACKENDS}, got {cfg.zeroshot_backend!r}"
        )
    if cfg.emotion_backend not in EMOTION_BACKENDS:
        errors.append(
            f"emotion_backend must be one of {EMOTION_BACKENDS}, got {cfg.emotion_backend!r}"
        )
    if "http" in (cfg.zeroshot_backend, cfg.emotion_backend) and not cfg.endpoint:
        errors.append("http backends require --endpoint")
    if cfg.format not in FORMATS:
        errors.append(f"format must be one of {FORMATS}, got {cfg.format!r}")
    if cfg.cooccurrence_k < 1:
        errors.append(f"cooccurrence_k must be >= 1, got {cfg.cooccurrence_k}")
    if cfg.example_domains_k < 1:
        errors.append(f"example_domains_k must be >= 1, got {cfg.example_domains_k}")
    if cfg.max_workers < 1:
        errors.append(f"max_workers must be >= 1, got {cfg.max_workers}")
    if cfg.seeds is not None and not Path(cfg.seeds).exists():
        errors.append(f"seed list not found: {cfg.seeds}")
    if cfg.taxonomy_dir is not None and not Path(cfg.taxonomy_dir).is_dir():
        errors.append(f"taxonomy dir not found: {cfg.taxonomy_dir}")
    return errors
