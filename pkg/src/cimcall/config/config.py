from __future__ import annotations

import json
import logging
import tomllib
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Literal

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    RedisDsn,
    ValidationError,
    field_validator,
)
from pydantic_settings import BaseSettings, SettingsConfigDict

from cimcall.device import DeviceParams, NonIdealityGroup, NonIdealityProfile
from cimcall.evaluator import AreaConfig, TimingConfig
from cimcall.mitigate import (
    KdParams,
    MitigationError,
    MitigationRecipe,
    RsaParams,
    RvwParams,
    VatParams,
)
from cimcall.nn import ModelShape, NnError, QuantSpec, TrainingOptions
from cimcall.taskgen import DEFAULT_K

_log = logging.getLogger(__name__)

PRESET_PACKAGE = "cimcall.config.presets"


class ConfigError(Exception):
    """Raised when a configuration source is invalid; names the offending key."""

    def __init__(self, key: str, issue: str) -> None:
        message = f"Invalid configuration at '{key}': {issue}"
        super().__init__(message)
        self.message = message
        self.details = {"key": key, "issue": issue}

    def __repr__(self) -> str:
        return f"{self.message} ({self.details!r})"

    def __str__(self) -> str:
        return repr(self)


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TaskConfig(_Section):
    """Synthetic basecalling task."""

    train_reads: int = Field(default=256, ge=1, description="Reads in the training set")
    test_reads: int = Field(default=64, ge=1, description="Reads in the evaluation set")
    read_length: int = Field(default=40, ge=1, description="Bases per read")
    noise_sigma: float = Field(default=0.1, ge=0.0, description="Signal noise std-dev")
    dwell_min: int = Field(default=2, ge=1, description="Fewest frames per base")
    dwell_max: int = Field(default=4, ge=1, description="Most frames per base")
    kmer: int = Field(default=DEFAULT_K, ge=1, description="k-mer context length")
    table_seed: int = Field(
        default=0, ge=0, description="Seed of the k-mer level table"
    )

    @property
    def dwell_range(self) -> tuple[int, int]:
        return self.dwell_min, self.dwell_max


class ModelConfig(_Section):
    """Surrogate basecaller architecture."""

    kernel: int = Field(default=5, ge=1)
    channels: int = Field(default=8, ge=1)
    hidden: int = Field(default=16, ge=1)
    activation: Literal["tanh", "sigmoid", "relu"] = "tanh"
    input_range: float = Field(
        default=2.0, gt=0.0, description="Static conv input range"
    )

    def shape(self) -> ModelShape:
        return ModelShape(
            kernel=self.kernel, channels=self.channels, hidden=self.hidden
        )


class QuantConfig(_Section):
    format: str = Field(
        default="16-16", description="Weight-activation bits, 32-32 is float"
    )

    @field_validator("format")
    @classmethod
    def _check_format(cls, v: str) -> str:
        try:
            QuantSpec.parse(v)
        except NnError as exc:
            raise ValueError(exc.message) from exc
        return v.strip()

    @property
    def spec(self) -> QuantSpec:
        return QuantSpec.parse(self.format)


class ProfileConfig(NonIdealityProfile):
    """Non-ideality profile plus an optional named group overriding ``enabled``."""

    group: NonIdealityGroup | None = None

    def resolve(self) -> NonIdealityProfile:
        profile = NonIdealityProfile(**self.model_dump(exclude={"group"}))
        return profile.with_group(self.group) if self.group else profile


class PlanConfig(_Section):
    array_size: int = Field(default=64, description="Square crossbar edge length")


class ProgrammingConfig(_Section):
    mode: Literal["one_shot", "verified"] = Field(
        default="one_shot",
        description="Programming mode before any mitigation recipe applies",
    )


class MitigationConfig(_Section):
    recipe: str = Field(
        default="none", description="Techniques joined by '+', or all/none"
    )
    vat: VatParams = Field(default_factory=VatParams)
    kd: KdParams = Field(default_factory=KdParams)
    rvw: RvwParams = Field(default_factory=RvwParams)
    rsa: RsaParams = Field(default_factory=RsaParams)

    @field_validator("recipe")
    @classmethod
    def _check_recipe(cls, v: str) -> str:
        try:
            MitigationRecipe.parse(v)
        except MitigationError as exc:
            raise ValueError(exc.message) from exc
        return v

    def resolve(self) -> MitigationRecipe:
        return MitigationRecipe.parse(
            self.recipe,
            vat=self.vat,
            kd=self.kd,
            rvw=self.rvw,
            rsa=self.rsa,
        )


class EvaluationConfig(_Section):
    runs: int = Field(default=5, ge=1, description="Programming runs per configuration")
    engine: Literal["auto", "ideal", "analytical", "library"] = Field(
        default="auto",
        description="Tile engine; auto picks library for the measured group",
    )


class LibraryConfig(_Section):
    path: Path | None = Field(default=None, description="Measurement library file")
    samples: int = Field(
        default=10_000, ge=1, description="Samples per characterised tile"
    )
    min_samples: int = Field(
        default=10_000, ge=1, description="Smallest accepted entry"
    )


class SweepConfig(_Section):
    axes: dict[str, list[Any]] = Field(
        default_factory=dict, description="Dotted key -> values"
    )
    cases: list[dict[str, Any]] = Field(
        default_factory=list, description="Named override sets"
    )
    output: str | None = Field(
        default=None, description="CSV file name for the sweep table"
    )
    nonadditivity: bool = Field(
        default=False, description="Also write nonadditivity.csv"
    )


class SeedConfig(_Section):
    master: int = Field(
        default=0, ge=0, description="Model, training and programming seed"
    )
    dataset: int = Field(default=0, ge=0, description="Read generation seed")


class OutputConfig(_Section):
    directory: Path = Field(default=Path("runs/latest"))
    checkpoint: str = Field(default="model.cimnet")


class CeleryConfig(_Section):
    """Celery broker/backend and serialization settings."""

    broker_url: RedisDsn = Field(
        default="redis://localhost:6379/0",
        validate_default=True,
        description="Broker URL",
    )
    result_backend: RedisDsn = Field(
        default="redis://localhost:6379/1",
        validate_default=True,
        description="Result backend URL",
    )
    task_serializer: str = Field(default="json", description="Task serializer")
    result_serializer: str = Field(default="json", description="Result serializer")
    accept_content: list[str] = Field(
        default_factory=lambda: ["json"],
        description="Accept content",
    )
    timezone: str = Field(default="UTC", description="Timezone")
    enable_utc: bool = Field(default=True, description="Enable UTC")
    task_time_limit: int = Field(
        default=3600, ge=1, description="Hard limit per sweep cell, s"
    )


class RunConfig(BaseSettings):
    """Every setting of a run, from environment, preset, file and flags."""

    task: TaskConfig = Field(default_factory=TaskConfig)
    model: ModelConfig = Field(default_factory=ModelConfig)
    training: TrainingOptions = Field(default_factory=TrainingOptions)
    quant: QuantConfig = Field(default_factory=QuantConfig)
    device: DeviceParams = Field(default_factory=DeviceParams)
    profile: ProfileConfig = Field(default_factory=ProfileConfig)
    plan: PlanConfig = Field(default_factory=PlanConfig)
    programming: ProgrammingConfig = Field(default_factory=ProgrammingConfig)
    mitigation: MitigationConfig = Field(default_factory=MitigationConfig)
    timing: TimingConfig = Field(default_factory=TimingConfig)
    area: AreaConfig = Field(default_factory=AreaConfig)
    evaluation: EvaluationConfig = Field(default_factory=EvaluationConfig)
    library: LibraryConfig = Field(default_factory=LibraryConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)
    seeds: SeedConfig = Field(default_factory=SeedConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    celery: CeleryConfig = Field(default_factory=CeleryConfig)

    model_config = SettingsConfigDict(
        case_sensitive=False,
        env_prefix="CIMCALL_",
        env_nested_delimiter="__",
        extra="forbid",
        protected_namespaces=(),
    )

    def dump(self) -> dict[str, Any]:
        """JSON-compatible echo of every resolved setting."""
        return self.model_dump(mode="json")

    @property
    def engine_name(self) -> str:
        if self.evaluation.engine != "auto":
            return self.evaluation.engine
        return "library" if self.profile.group == "measured" else "analytical"


def deep_merge(base: dict[str, Any], update: dict[str, Any]) -> dict[str, Any]:
    """Recursively merge ``update`` into a copy of ``base``; update wins."""
    merged = dict(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def set_dotted(data: dict[str, Any], key: str, value: Any) -> dict[str, Any]:
    """Return ``data`` with ``value`` stored under a dotted key path."""
    head, _, rest = key.partition(".")
    out = dict(data)
    if not rest:
        out[head] = value
        return out
    child = out.get(head)
    out[head] = set_dotted(child if isinstance(child, dict) else {}, rest, value)
    return out


def apply_overrides(data: dict[str, Any], overrides: dict[str, Any]) -> dict[str, Any]:
    for key, value in overrides.items():
        data = set_dotted(data, key, value)
    return data


def has_key(key: str) -> bool:
    """Whether a dotted key names a setting of ``RunConfig``."""
    model: type[BaseModel] = RunConfig
    parts = key.split(".")
    for index, part in enumerate(parts):
        field = model.model_fields.get(part)
        if field is None:
            return False
        annotation = field.annotation
        if isinstance(annotation, type) and issubclass(annotation, BaseModel):
            model = annotation
            continue
        return index == len(parts) - 1
    return True


def list_presets() -> list[str]:
    return sorted(
        entry.name.removesuffix(".toml")
        for entry in resources.files(PRESET_PACKAGE).iterdir()
        if entry.name.endswith(".toml")
    )


def load_preset(name: str) -> dict[str, Any]:
    """Settings of a bundled preset.

    Raises:
        ConfigError: If no preset of that name ships with the package.
    """
    resource = resources.files(PRESET_PACKAGE) / f"{name}.toml"
    if not resource.is_file():
        raise ConfigError(
            "preset", f"unknown preset '{name}', available: {list_presets()}"
        )
    try:
        return tomllib.loads(resource.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(
            "preset", f"preset '{name}' is not valid TOML: {exc}"
        ) from exc


def load_config_file(path: Path) -> dict[str, Any]:
    """Settings from a TOML file or from a run manifest's ``config`` object.

    Raises:
        FileNotFoundError: If the file does not exist.
        ConfigError: If the file cannot be parsed.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        try:
            manifest = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"{path} is not valid JSON: {exc}") from exc
        if not isinstance(manifest, dict) or "config" not in manifest:
            raise ConfigError(
                "config", f"{path} is a JSON file without a 'config' object"
            )
        return manifest["config"]
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("config", f"{path} is not valid TOML: {exc}") from exc


def build_config(data: dict[str, Any]) -> RunConfig:
    """Validate merged settings, naming the first offending dotted key.

    Raises:
        ConfigError: If any setting is unknown or out of range.
    """
    try:
        return RunConfig(**data)
    except ValidationError as exc:
        error = exc.errors()[0]
        key = ".".join(str(part) for part in error["loc"]) or "config"
        _log.error("Configuration rejected at %s: %s", key, error["msg"])
        raise ConfigError(key, error["msg"]) from exc


def resolve_config(
    *,
    preset: str | None = None,
    path: Path | None = None,
    overrides: dict[str, Any] | None = None,
) -> RunConfig:
    """Merge preset, file and dotted-key overrides over env and defaults.

    Later sources win: preset, then file, then overrides.
    """
    data: dict[str, Any] = {}
    if preset:
        data = deep_merge(data, load_preset(preset))
    if path is not None:
        data = deep_merge(data, load_config_file(path))
    if overrides:
        data = apply_overrides(data, overrides)
    return build_config(data)


@lru_cache(maxsize=1)
def load_settings() -> RunConfig:
    """Load and cache process-wide settings from the environment."""
    return RunConfig()
