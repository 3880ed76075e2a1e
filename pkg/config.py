from pydantic_settings import BaseSettings, SettingsConfigDict


class Config(BaseSettings):
    """Application defaults sourced from environment variables; CLI flags override them."""

    model_config = SettingsConfigDict(env_file="./.env", extra="ignore")

    # Propagation defaults
    RCPM_K: int = 8
    RCPM_SIGMA: float = 74.0
    RCPM_ITERATIONS: int = 4
    RCPM_FUSION_WEIGHT: float = 0.5
    RCPM_VARIANT: str = "standard"

    FEATURE_METRIC: str = "euclidean"

    # Georeferencing (m/s^2 and m)
    KALMAN_PROCESS_NOISE: float = 1.0
    KALMAN_MEASUREMENT_NOISE: float = 2.0

    # Evaluation
    MAX_RANK: int = 20
    EXCLUDE_SAME_CAMERA: bool = True

    DEFAULT_SEED: int = 0

    # Run history storage configuration
    RUN_HISTORY_MAX_LENGTH: int = 50
    ENABLE_LANGGRAPH: bool = True

    LOG_DIR: str = "logs"
    LOG_LEVEL: str = "INFO"


config = Config()
