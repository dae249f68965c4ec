"""Application configuration using Pydantic Settings."""
from functools import lru_cache
from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
    )

    # Application
    app_name: str = "cusp-coding-verifier"
    app_version: str = "0.1.0"
    debug: bool = False
    log_level: str = "INFO"

    # Database (append-only run reports)
    database_url: str = "sqlite+aiosqlite:///./runs.db"

    # Pipeline
    cache_dir: str = ".cache"
    default_config_path: str | None = None

    @property
    def cache_path(self) -> Path:
        """Return the cache directory, creating it on first use."""
        path = Path(self.cache_dir)
        path.mkdir(parents=True, exist_ok=True)
        return path


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
