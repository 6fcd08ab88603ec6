from .config import (
    ConfigError,
    RunConfig,
    apply_overrides,
    build_config,
    deep_merge,
    has_key,
    list_presets,
    load_config_file,
    load_preset,
    load_settings,
    resolve_config,
)

__all__ = [
    "ConfigError",
    "RunConfig",
    "apply_overrides",
    "build_config",
    "deep_merge",
    "has_key",
    "list_presets",
    "load_config_file",
    "load_preset",
    "load_settings",
    "resolve_config",
]
