"""

ac2cd/core/config.py

"""


from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):

    # App
    APP_NAME: str = "ac2cd"
    LOG_LEVEL: str = "INFO"
    OUTPUT_DIR: str = "results"

    # Parallel repetitions
    AC2CD_THREADS: int = Field(default=1, ge=1)

    # Method defaults
    DEFAULT_TAU: float = 0.9
    DEFAULT_EPSILON: float = 1e-1
    DEFAULT_GAMMA: float = 0.5
    DEFAULT_A_UPPER: float = 1e12
    DEFAULT_NU: float = 1e-6
    MVP_EPSILON: float = 1e-1

    # Budgets
    DEFAULT_MAX_OUTER: int = 10000
    DEFAULT_INNER_BUDGET: int = 1_000_000

    # Numerical tolerances
    FEASIBILITY_TOL: float = 1e-9  # scaled by (1 + |b|)
    BOUND_TOL: float = 1e-12
    ARMIJO_MAX_BACKTRACKS: int = 200
    EXACT_LS_TOL: float = 1e-10
    EXACT_LS_MAX_EVALS: int = 200

    # Residual cache
    CACHE_REFRESH_INTERVAL: int = 1000

    # Trace collector
    TRACE_FLUSH_THRESHOLD: int = 8

    model_config = SettingsConfigDict(
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )


settings = Settings()
