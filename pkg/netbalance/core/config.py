"""
Core configuration using Pydantic settings.
Loads from environment variables (NETBALANCE_ prefix) and .env file.
"""
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Solver and CLI settings with validation."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="NETBALANCE_",
        case_sensitive=True,
        extra="ignore"
    )

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_DIR: str | None = None
    LOG_FILE: str = "netbalance.log"
    DEBUG: bool = False

    # Solver
    DEFAULT_MODE: str = "auto"
    DEFAULT_OBJECTIVE: str = "satisfaction"
    PRICE_SOURCE_SLOT: int = Field(default=0, ge=0)
    MAX_GREEDY_ITERATIONS: int | None = None
    MAX_BLOCK_ROUNDS: int | None = None

    # Synthetic generator
    CAPACITY_LOAD: float = Field(default=0.95, gt=0.0, le=1.0)
    THRESHOLD_SHARE: float = Field(default=0.1, ge=0.0, lt=1.0)
    PREMIUM_SHARE: float = Field(default=0.3, ge=0.0, le=1.0)
    PEAK_HOURS: list[int] = [12, 20]

    # Reporting
    WRITE_SVG: bool = False


# Global settings instance
settings = Settings()
