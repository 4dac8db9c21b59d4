import json
import os
from pathlib import Path
from typing import Any

import yaml

from .errors import ConfigError

OUTPUT_ROOT_ENV = "LPGNET_OUTPUT_ROOT"


def parse_epsilon(value: Any) -> float:
    """Accepts numbers and the literals 'inf' / 'infinity' / '∞'."""
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinity", "∞", "+inf"):
            return float("inf")
        try:
            value = float(text)
        except ValueError as e:
            raise ConfigError(f"cannot parse epsilon {value!r}") from e
    eps = float(value)
    if not eps > 0:
        raise ConfigError(f"epsilon must be positive or inf, got {value!r}")
    return eps


def format_epsilon(eps: float) -> str | float:
    return "inf" if eps == float("inf") else eps


def load_config(config_path: str | Path) -> dict[str, Any]:
    config_path = Path(config_path)
    if not config_path.exists():
        raise ConfigError(f"config file not found: {config_path}")
    with open(config_path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        if config_path.suffix == ".json":
            config = json.loads(text)
        else:
            config = yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigError(f"malformed config {config_path}: {e}") from e
    if not isinstance(config, dict):
        raise ConfigError(f"config {config_path} must hold a mapping at the top level")
    return config


def resolve_output_dir(out_dir) -> Path:
    """Relative output directories are re-rooted under $LPGNET_OUTPUT_ROOT when it is set."""
    path = Path(out_dir)
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root and not path.is_absolute():
        return Path(root) / path
    return path
