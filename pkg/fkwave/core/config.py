from functools import lru_cache
from pathlib import Path
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from fkwave.config import (
    C_TOL,
    DEFAULT_H,
    DEFAULT_HALF_WIDTH,
    DEFAULT_T,
    DEFAULT_WINDOW_FRACTION,
    HULL_M,
)


def get_env_file_path() -> str | None:
    """
    Returns the file path to the .env file.

    Returns:
        str | None: The file path to the .env file or None if not found.
    """

    possible_paths = [
        ".env",
    ]

    for path in possible_paths:
        if Path(path).exists():
            abs_path = Path(path).resolve()
            return str(abs_path)

    return None


class Settings(BaseSettings):

    model_config = SettingsConfigDict(
        env_prefix="FKWAVE_",
        env_file=get_env_file_path(),
        env_ignore_empty=True,
        extra="ignore",
    )

    LOG_LEVEL: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"

    # Output (FKWAVE_OUT)
    OUT: Path = Path("out")

    # Execution
    JOBS: int = Field(default=1, ge=1)
    SEED: int = 0

    # Numerics defaults, overridable per run from the CLI
    H: float = Field(default=DEFAULT_H, gt=0)
    DOMAIN_HALF_WIDTH: float = Field(default=DEFAULT_HALF_WIDTH, gt=0)
    T: float = Field(default=DEFAULT_T, gt=0)
    HULL_M: int = Field(default=HULL_M, ge=64)
    C_TOL: float = Field(default=C_TOL, gt=0)
    WINDOW_FRACTION: float = Field(default=DEFAULT_WINDOW_FRACTION, gt=0, le=1)


@lru_cache  # builds once, the first time it's asked for
def get_settings() -> Settings:
    return Settings()
