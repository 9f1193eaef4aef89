"""Runtime settings for the oamsim toolkit."""
from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Optional

class Settings(BaseSettings):
    """Runtime settings loaded from environment variables (prefix OAMSIM_)."""

    # Monte Carlo partitioning
    workers: int = 1
    block_pulses: int = 2 ** 23

    # Logging
    log_level: str = "INFO"
    log_file: Optional[str] = None
    debug_mode: bool = False

    model_config = SettingsConfigDict(
        env_prefix="OAMSIM_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False
    )

# Global settings instance
settings = Settings()
