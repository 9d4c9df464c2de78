"""
This module stores the global logging configuration dictionary
"""

import os
from typing import Any

from .config import Settings


def build_logging_config(settings: Settings) -> dict[str, Any]:
    """
    Builds the `logging.config.dictConfig` dictionary for the CLI.

    Console output always goes to standard error so it never mixes with
    machine output on stdout. A rotating file handler is added when
    `settings.log_dir` is set.
    """
    handlers: dict[str, Any] = {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "json",
            "stream": "ext://sys.stderr",
            "level": settings.log_level,
        },
    }
    if settings.log_dir:
        os.makedirs(settings.log_dir, exist_ok=True)
        handlers["invflip_file"] = {
            "class": "logging.handlers.RotatingFileHandler",
            "filename": os.path.join(settings.log_dir, "invflip.log"),
            "maxBytes": 10485760,  # 10MB
            "backupCount": 5,
            "formatter": "json",
            "level": "INFO",
        }

    return {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "json": {
                "()": "pythonjsonlogger.json.JsonFormatter",
                "format": "%(asctime)s %(name)s %(levelname)s %(message)s",
            }
        },
        "handlers": handlers,
        "loggers": {
            "invflip": {
                "handlers": list(handlers),
                "level": "INFO",
                "propagate": False,
            },
        },
    }
