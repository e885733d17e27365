from functools import lru_cache
from pathlib import Path
from typing import List, Union

import yaml
from pydantic import ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from aafv import __version__
from aafv.core.errors import ConfigValidationError
from aafv.schemas.schemas import ExperimentConfig


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="AAFV_",
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )

    # Project
    PROJECT_NAME: str = "aafv"
    VERSION: str = __version__
    DESCRIPTION: str = "Abstention-aware federated voting simulator"

    # Runtime
    LOG_LEVEL: str = "INFO"
    OUTPUT_DIR: str = "runs"
    PARALLEL: int = 1

    # Privacy audit
    AUDIT_SLACK: float = 0.15

    @field_validator("LOG_LEVEL")
    def normalize_level(cls, v: str) -> str:
        level = v.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level {v!r}")
        return level

    @field_validator("PARALLEL")
    def positive_parallel(cls, v: int) -> int:
        if v < 1:
            raise ValueError("PARALLEL must be >= 1")
        return v


@lru_cache()
def get_settings() -> Settings:
    """
    Get cached settings instance.
    Returns:
        Settings: Process settings
    """
    return Settings()


# Create global settings instance
settings = get_settings()


def format_errors(exc: ValidationError) -> List[str]:
    messages = []
    for err in exc.errors():
        loc = ".".join(str(part) for part in err["loc"])
        msg = err["msg"]
        if msg.startswith("Value error, "):
            msg = msg[len("Value error, "):]
        # model-level validators join several problems with " | "
        for part in msg.split(" | "):
            messages.append(f"{loc}: {part}" if loc else part)
    return messages


def load_config_data(data: dict, source: str = "<memory>") -> ExperimentConfig:
    """Validate an already-parsed mapping into an ExperimentConfig."""
    if not isinstance(data, dict):
        raise ConfigValidationError(["top level must be a mapping"], source)
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigValidationError(format_errors(exc), source) from exc


def parse_config(path: Union[str, Path]) -> ExperimentConfig:
    """
    Load and validate an experiment configuration file.

    Parameters:
    - path: YAML file describing the experiment

    Returns:
    - ExperimentConfig: Fully resolved configuration with defaults filled in

    Raises:
    - ConfigValidationError: Listing every problem found, not just the first
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigValidationError([f"cannot read config: {exc}"], str(path)) from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigValidationError([f"invalid YAML: {exc}"], str(path)) from exc
    return load_config_data(data if data is not None else {}, str(path))


def dump_config(config: ExperimentConfig) -> str:
    """Render the resolved config back to YAML for the run bundle."""
    return yaml.safe_dump(config.model_dump(mode="json"), sort_keys=True)
