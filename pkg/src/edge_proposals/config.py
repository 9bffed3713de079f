"""
Runtime settings read from the environment (and an optional `.env` file).
"""

from __future__ import annotations

import logging
import os
import sys
from dataclasses import dataclass

from dotenv import load_dotenv

from .errors import ConfigurationError

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

DEFAULT_STARTING_SET_CAP = 50_000_000


@dataclass(frozen=True)
class Settings:
    output_dir: str = "outputs"
    log_level: str = "INFO"
    starting_set_cap: int = DEFAULT_STARTING_SET_CAP
    n_jobs: int = 1


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigurationError(f"{name} must be an integer, got '{raw}'")
    if value < 1:
        raise ConfigurationError(f"{name} must be positive, got {value}")
    return value


def load_settings() -> Settings:
    """Load settings, letting a `.env` file in the working directory fill gaps."""
    load_dotenv()
    return Settings(
        output_dir=os.getenv("EDGE_PROPOSALS_OUTPUT_DIR", "outputs"),
        log_level=os.getenv("EDGE_PROPOSALS_LOG_LEVEL", "INFO").upper(),
        starting_set_cap=_int_env("EDGE_PROPOSALS_STARTING_SET_CAP", DEFAULT_STARTING_SET_CAP),
        n_jobs=_int_env("EDGE_PROPOSALS_N_JOBS", 1),
    )


def configure_logging(level: str = "INFO") -> None:
    root = logging.getLogger("edge_proposals")
    if getattr(logging, level.upper(), None) is None:
        raise ConfigurationError(f"Unknown log level: {level}")
    root.setLevel(level.upper())
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.propagate = False
