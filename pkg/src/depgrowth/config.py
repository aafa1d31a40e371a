"""Pipeline configuration: loading, validation, and canonical hashing.

Config files are plain JSON objects whose keys mirror
:class:`PipelineConfig` fields. Command-line flags override file values,
which override defaults. Validation runs before any input is opened, so a
bad config never produces partial output.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from pathlib import Path
from typing import Mapping

from .filters import DEFAULT_ECOSYSTEMS, DEFAULT_MIN_DEPENDENTS
from .metrics import SUPPORTED_GRIDS

__all__ = [
    "ConfigError",
    "PipelineConfig",
    "config_sha256",
    "file_sha256",
    "load_config",
    "resolve_config",
]


class ConfigError(ValueError):
    """The configuration is malformed or violates an invariant."""


@dataclasses.dataclass(frozen=True)
class PipelineConfig:
    """Resolved settings for one pipeline run."""

    repo_snapshots: str = "repo_snapshots.jsonl"
    releases: str = "releases.jsonl"
    dependent_edges: str = "dependent_edges.jsonl"
    out_dir: str = "out"
    ecosystems: tuple[str, ...] = tuple(sorted(DEFAULT_ECOSYSTEMS))
    min_dependents: int = DEFAULT_MIN_DEPENDENTS
    grid: tuple[int, int] = (365, 90)
    alpha: float = 0.05
    zero_split: str = "patch"
    fold_zero: bool = True
    seed: int = 0
    workers: int = 1
    model_id: str = "mock-rater-v1"
    model_endpoint: str | None = None
    rate_per_sec: float | None = None
    human_ratings: str | None = None
    # stamped into output records; a constant so reruns stay byte-identical
    timestamp: str = "1970-01-01T00:00:00Z"

    def validate(self) -> "PipelineConfig":
        if tuple(self.grid) not in SUPPORTED_GRIDS:
            raise ConfigError(
                f"grid {self.grid} is not supported; choose one of {SUPPORTED_GRIDS}"
            )
        if self.min_dependents < 0:
            raise ConfigError(f"min_dependents must be >= 0, got {self.min_dependents}")
        if not (0.0 < self.alpha < 1.0):
            raise ConfigError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.zero_split not in ("patch", "folded"):
            raise ConfigError(f"zero_split must be 'patch' or 'folded', got {self.zero_split!r}")
        if not self.ecosystems:
            raise ConfigError("ecosystems must not be empty")
        unknown = sorted(set(self.ecosystems) - DEFAULT_ECOSYSTEMS)
        if unknown:
            raise ConfigError(
                f"unknown ecosystem ids {unknown}; supported: {sorted(DEFAULT_ECOSYSTEMS)}"
            )
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.rate_per_sec is not None and self.rate_per_sec <= 0:
            raise ConfigError(f"rate_per_sec must be positive, got {self.rate_per_sec}")
        return self


_TUPLE_FIELDS = {"ecosystems", "grid"}
_FIELD_NAMES = {f.name for f in dataclasses.fields(PipelineConfig)}


def _coerce(values: Mapping[str, object]) -> dict:
    out: dict = {}
    for key, value in values.items():
        if key not in _FIELD_NAMES:
            raise ConfigError(f"unknown config key {key!r}")
        if key in _TUPLE_FIELDS:
            if not isinstance(value, (list, tuple)):
                raise ConfigError(f"{key} must be a list")
            value = tuple(value)
        out[key] = value
    return out


def load_config(path: str | Path) -> PipelineConfig:
    """Read and validate a JSON config file.

    Raises:
        ConfigError: unreadable file, invalid JSON, unknown keys, or an
            invariant violation.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    return PipelineConfig(**_coerce(raw)).validate()


def resolve_config(file_path: str | Path | None, overrides: Mapping[str, object]) -> PipelineConfig:
    """Defaults, then the config file, then non-None overrides."""
    values: dict = {}
    if file_path is not None:
        base = load_config(file_path)
        values.update(dataclasses.asdict(base))
    values.update(_coerce({k: v for k, v in overrides.items() if v is not None}))
    return PipelineConfig(**_coerce(values)).validate()


def config_sha256(config: PipelineConfig) -> str:
    """Canonical hash of the resolved config (sorted-key JSON)."""
    payload = json.dumps(dataclasses.asdict(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def file_sha256(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        while True:
            chunk = handle.read(1 << 20)
            if not chunk:
                break
            digest.update(chunk)
    return digest.hexdigest()
