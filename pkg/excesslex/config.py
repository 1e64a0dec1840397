import os
from typing import Literal, Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application configuration settings."""

    model_config = SettingsConfigDict(
        env_prefix="EXCESSLEX_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # Grammar inference
    exact_length_budget: int = Field(default=14, ge=1)
    default_algorithm: Literal["online", "repair", "exact"] = Field(default="repair")
    n_jobs: int = Field(default=1)

    # Entropy estimation
    n_max: int = Field(default=10, ge=1)
    window_mode: Literal["circular", "linear"] = Field(default="circular")
    mu_step: float = Field(default=0.01, gt=0.0, lt=1.0)
    min_reliable_rows: int = Field(default=4, ge=1)

    # Growth curves
    prefix_start: int = Field(default=1024, ge=1)
    prefix_ratio: int = Field(default=2, ge=2)

    # Codec
    codec_gamma_c: float = Field(default=80.0)

    # Reproducibility
    seed: int = Field(default=0)

    # Logging and monitoring
    log_level: str = Field(default="WARNING")
    metrics_enabled: bool = Field(default=True)
    metrics_path: Optional[str] = Field(default=None)

    # Corpora
    desk_corpus_path: Optional[str] = Field(default=None)

    @field_validator("exact_length_budget")
    @classmethod
    def _budget_guard(cls, value: int) -> int:
        if value > 16:
            raise ValueError("exact_length_budget must be at most 16")
        return value


# Global settings instance
settings = Settings()


def get_desk_corpus_path() -> Optional[str]:
    """Get the path to the desk corpus if one is configured and present."""
    path = settings.desk_corpus_path
    if not path or not os.path.exists(path):
        return None
    return path


def get_prefix_schedule(total_length: int) -> list[int]:
    """Geometric prefix lengths up to (and including) the full text length."""
    schedule = []
    length = settings.prefix_start
    while length < total_length:
        schedule.append(length)
        length *= settings.prefix_ratio
    schedule.append(total_length)
    return schedule
