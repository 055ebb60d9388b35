"""Configuration management for oos-infer."""

from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="OOS_INFER_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )

    # Execution
    threads: Optional[int] = Field(
        default=None,
        ge=1,
        le=512,
        description="Cap on replication workers (no cap when unset)"
    )
    master_seed: int = Field(
        default=20240601,
        ge=0,
        lt=2**64,
        description="Default master seed for Monte Carlo studies"
    )

    # Output
    output_dir: str = Field(default="results", description="Directory for study outputs")

    # Logging
    log_level: str = Field(default="INFO", description="Log Level")

    @field_validator('log_level')
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Accept only the standard logging level names."""
        level = v.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"Unknown log level '{v}'")
        return level


def get_settings() -> Settings:
    """Get settings instance."""
    return Settings()
