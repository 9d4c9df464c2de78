"""
This module stores the environment-driven settings of the toolkit
"""

import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, Field

load_dotenv()


class Settings(BaseModel):
    log_level: str = Field(
        default="WARNING",
        pattern=r"^(DEBUG|INFO|WARNING|ERROR|CRITICAL)$",
        description="Console log level",
    )
    log_dir: str | None = Field(
        default=None, description="Directory for the rotating JSON log file (optional)"
    )
    duration: float = Field(
        default=3600.0, gt=0, description="Default simulated duration in seconds"
    )
    dt: float = Field(
        default=0.1, gt=0, le=1, description="Default scan step in seconds"
    )


@lru_cache
def get_settings() -> Settings:
    """
    Builds the settings object from `INVFLIP_*` environment variables.

    Unset variables fall back to the model defaults.
    """
    values: dict[str, str] = {}
    for name in ("log_level", "log_dir", "duration", "dt"):
        raw = os.getenv(f"INVFLIP_{name.upper()}")
        if raw:
            values[name] = raw
    return Settings.model_validate(values)
