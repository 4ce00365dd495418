from functools import lru_cache

from dotenv import load_dotenv
from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="ORIENT_",
        case_sensitive=True,
        extra="ignore",  # Ignore extra fields instead of raising validation error
    )

    API_HOST: str = "0.0.0.0"
    API_PORT: int = 8000

    BACKEND_CORS_ORIGINS: list[str] = ["http://localhost:8080", "http://localhost:5173"]

    LOG_LEVEL: str = "INFO"

    # Solvers assert their internal invariants when set
    CHECK_INVARIANTS: bool = True

    ORACLE_MAX_EDGES: int = 20
    ORACLE_JOBS: int = 1
    ORACLE_CHUNK_SIZE: int = 4096

    DEFAULT_ALGO: str = "auto"

    @field_validator("LOG_LEVEL", mode="before")
    def normalize_log_level(cls, v):
        return str(v).upper() if v else "INFO"

    @field_validator("ORACLE_MAX_EDGES", "ORACLE_JOBS", "ORACLE_CHUNK_SIZE")
    def positive(cls, v, info):
        if v < 1:
            raise ValueError(f"{info.field_name} must be >= 1")
        return v


@lru_cache()
def get_settings() -> Settings:
    return Settings()


settings = get_settings()
