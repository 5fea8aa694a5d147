"""Settings loaded from the environment (and an optional .env file)."""

import os
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv

from core.security.input_validation import (
    DEFAULT_ENUMERATION_LIMIT, DEFAULT_KERNEL_MAX_SIZE, DEFAULT_SEMIVARIATION_LIMIT, ValidationError
)


@dataclass(frozen=True)
class Settings:
    """Runtime settings; CLI flags override them."""

    log_level: str = "INFO"
    log_dir: Optional[str] = None
    enumeration_limit: int = DEFAULT_ENUMERATION_LIMIT
    semivariation_limit: int = DEFAULT_SEMIVARIATION_LIMIT
    kernel_max_size: int = DEFAULT_KERNEL_MAX_SIZE
    metrics_file: Optional[str] = None


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValidationError(f"{name} must be an integer, got {raw!r}")
    if value < 1:
        raise ValidationError(f"{name} must be positive")
    return value


def load_settings(dotenv: bool = True) -> Settings:
    """
    Read QMEASURE_* variables.

    Args:
        dotenv: Load a .env file from the working directory first

    Raises:
        ValidationError: If a numeric variable is malformed
    """
    if dotenv:
        load_dotenv()
    return Settings(
        log_level=os.getenv("QMEASURE_LOG_LEVEL", "INFO"),
        log_dir=os.getenv("QMEASURE_LOG_DIR") or None,
        enumeration_limit=_int_env("QMEASURE_ENUMERATION_LIMIT", DEFAULT_ENUMERATION_LIMIT),
        semivariation_limit=_int_env("QMEASURE_SEMIVARIATION_LIMIT", DEFAULT_SEMIVARIATION_LIMIT),
        kernel_max_size=_int_env("QMEASURE_KERNEL_MAX_SIZE", DEFAULT_KERNEL_MAX_SIZE),
        metrics_file=os.getenv("QMEASURE_METRICS_FILE") or None,
    )
