# graph_attn/core/config/settings.py
"""Centralized application settings using Pydantic."""

from __future__ import annotations

from functools import lru_cache
from typing import Literal

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

A100_80GB_BYTES = 80 * 1024**3


class Settings(BaseSettings):
    """
    Application settings loaded from environment variables (prefix ``GRAPH_ATTN_``).

    Usage:
        from graph_attn.core.config import settings

        print(settings.dtype)
    """

    model_config = SettingsConfigDict(
        env_prefix="GRAPH_ATTN_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Numerics
    dtype: Literal["float32", "float64"] = Field(
        default="float32", description="Element precision used by the attention kernels"
    )
    oracle_dtype: Literal["float32", "float64"] = Field(
        default="float64", description="Element precision used by the dense masked oracle"
    )
    seed: int = Field(default=0, description="Default seed for generated inputs and masks")
    num_threads: int | None = Field(
        default=None, ge=1, description="torch intra-op threads (None keeps torch's default)"
    )

    # Verification
    rtol: float = Field(default=1e-5, ge=0.0, description="Relative tolerance for allclose")
    atol: float = Field(default=1e-8, ge=0.0, description="Absolute tolerance for allclose")
    composition_factor: float = Field(
        default=10.0,
        gt=0.0,
        description="Tolerance multiplier for sequential-composition comparisons",
    )

    # Benchmarking
    warmup: int = Field(default=10, ge=0, description="Untimed warm-up runs per benchmark")
    iters: int = Field(default=15, ge=1, description="Timed runs per benchmark")
    dense_memory_cap_bytes: int = Field(
        default=8 * 1024**3,
        ge=1,
        description="Estimated footprint above which sweeps skip the dense oracle",
    )

    # Memory model
    device_budget_bytes: int = Field(
        default=A100_80GB_BYTES, ge=1, description="Device memory budget (80 GiB A100)"
    )

    # Application
    log_level: str = Field(
        default="INFO",
        description="Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)",
    )
    log_format: Literal["simple", "detailed", "json"] = Field(
        default="simple", description="Log output format"
    )
    environment: Literal["development", "production", "test"] = Field(
        default="development", description="Application environment"
    )

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Ensure log level is valid."""
        valid_levels = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}
        v_upper = v.upper()
        if v_upper not in valid_levels:
            raise ValueError(f"log_level must be one of {valid_levels}")
        return v_upper

    @property
    def is_production(self) -> bool:
        """Check if running in production environment."""
        return self.environment == "production"

    @property
    def is_development(self) -> bool:
        """Check if running in development environment."""
        return self.environment == "development"

    @property
    def is_test(self) -> bool:
        """Check if running in test environment."""
        return self.environment == "test"


@lru_cache
def _get_settings() -> Settings:
    """
    Get cached settings instance.

    Returns:
        Singleton Settings instance
    """
    return Settings()


settings = _get_settings()
