import logging
import os
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ValidationError, field_validator

from .errors import ConfigInvalid
from .schemas import TrainConfig

DATA_DIR_ENV = "CURVGLYPH_DATA_DIR"
CACHE_DIR_ENV = "CURVGLYPH_CACHE_DIR"
LOG_LEVEL_ENV = "CURVGLYPH_LOG_LEVEL"


class Settings(BaseModel):
    data_dir: Optional[Path] = None
    cache_dir: Path = Path(".curvglyph-cache")
    log_level: str = "INFO"

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        value = value.upper()
        if not isinstance(logging.getLevelName(value), int):
            raise ValueError(f"unknown log level {value!r}, expected one of DEBUG, INFO, WARNING, ERROR, CRITICAL")
        return value


def _validation_message(exc: ValidationError) -> str:
    return "; ".join(f"{'.'.join(str(p) for p in e['loc']) or 'config'}: {e['msg']}" for e in exc.errors())


def get_settings() -> Settings:
    data_dir = os.getenv(DATA_DIR_ENV)
    try:
        return Settings(
            data_dir=Path(data_dir) if data_dir else None,
            cache_dir=Path(os.getenv(CACHE_DIR_ENV, ".curvglyph-cache")),
            log_level=os.getenv(LOG_LEVEL_ENV, "INFO"),
        )
    except ValidationError as exc:
        raise ConfigInvalid(f"Invalid environment settings ({_validation_message(exc)})") from exc


def resolve_data_dir(flag_value: Optional[str]) -> Optional[Path]:
    """``--data-dir`` wins; the environment variable is the fallback."""
    if flag_value:
        return Path(flag_value)
    return get_settings().data_dir


def build_train_config(**overrides) -> TrainConfig:
    """Merge non-None overrides into the protocol defaults and validate."""
    values = {k: v for k, v in overrides.items() if v is not None}
    try:
        return TrainConfig(**values)
    except ValidationError as exc:
        fields = ", ".join(".".join(str(p) for p in e["loc"]) or "config" for e in exc.errors())
        raise ConfigInvalid(f"Invalid training configuration ({fields}): {exc}") from exc
