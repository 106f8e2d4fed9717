import json
import os
from pathlib import Path

from dotenv import load_dotenv

from modules.errors import ConfigError

load_dotenv()

DEFAULT_OUTPUT_ROOT = "output"
OUTPUT_ROOT = Path(os.getenv("ROT_LAB_OUTPUT_ROOT", DEFAULT_OUTPUT_ROOT))
DEVICE = os.getenv("ROT_LAB_DEVICE", "cpu")


def default_workers() -> int:
    value = os.getenv("ROT_LAB_WORKERS")
    if value:
        try:
            workers = int(value)
        except ValueError:
            raise ConfigError(f"ROT_LAB_WORKERS must be an integer, got {value!r}") from None
        if workers < 1:
            raise ConfigError(f"ROT_LAB_WORKERS must be positive, got {workers}")
        return workers
    return os.cpu_count() or 1


def resolve_output_dir(out=None) -> Path:
    path = Path(out) if out else OUTPUT_ROOT
    path.mkdir(parents=True, exist_ok=True)
    return path


def load_json_config(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}. Pass --config with an existing JSON file.")

    with path.open("r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Invalid JSON in config file {path}: {e}") from e

    if not isinstance(data, dict):
        raise ConfigError(f"Invalid config file format: {path} must contain a JSON object")

    return data
