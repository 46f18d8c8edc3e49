"""Configuration settings for normctl."""

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Runtime settings, overridable through NORMCTL_* environment variables."""

    model_config = SettingsConfigDict(env_prefix="NORMCTL_", extra="ignore")

    # Runtime
    threads: int = 4
    log_level: str = "INFO"
    default_seed: int = 0

    # Sup-norm on the torus
    grid_oversampling: int = 64
    refine_tol: float = 1e-12
    refine_max_iter: int = 100

    # Hermitian eigensolver
    jacobi_tol: float = 1e-12
    jacobi_max_sweeps: int = 100

    # Inversion
    invertibility_threshold: float = 1e-10
    default_tol: float = 1e-10
    default_k_max: int = 200_000
    max_series_degree: int = 8192

    # Bounds
    product_eps: float = 1e-14

    # Random sampling
    sample_max_degree: int = 32
    sample_max_dimension: int = 8


settings = Settings()
