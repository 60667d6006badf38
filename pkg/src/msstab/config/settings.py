"""msstab configuration using pydantic-settings"""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Numerical defaults, overridable from MSSTAB_* environment variables"""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="MSSTAB_",
        case_sensitive=False,
        extra="ignore",
    )

    # Logging
    log_level: str = Field(
        default="WARNING",
        description="Logging level for the command line front end",
    )

    # Verdict tolerances
    criterion_tolerance: float = Field(
        default=1e-9,
        description="Marginal band for closed-form criteria (relative slack)",
    )
    radius_margin: float = Field(
        default=1e-7,
        description="Marginal band around 1 for spectral-radius verdicts",
    )
    agreement_tolerance: float = Field(
        default=1e-12,
        description="Band where the Jury and Elaydi third conditions may disagree",
    )
    denominator_floor: float = Field(
        default=1e-14,
        description="Smallest admissible denominator in scheme and Schur recursions",
    )

    # Root finding and eigenvalues
    root_tolerance: float = Field(
        default=1e-10,
        description="Durand-Kerner residual tolerance, scaled by max(1, max|p_i|)",
    )
    root_max_iterations: int = Field(
        default=500,
        description="Durand-Kerner iteration cap",
    )
    qr_max_iterations: int = Field(
        default=200,
        description="Shifted QR iterations allowed per eigenvalue",
    )
    gelfand_squarings: int = Field(
        default=60,
        description="Repeated squarings used by the Gelfand radius estimate",
    )
    condition_limit: float = Field(
        default=1e12,
        description="Largest accepted condition number of the implicit resolvent",
    )

    # Simulation
    overflow_threshold: float = Field(
        default=1e150,
        description="Path values above this clamp and mark the trace diverged",
    )
    default_seed: int = Field(
        default=20240611,
        description="Seed of the counter-based Gaussian stream",
    )
    default_batches: int = Field(
        default=10,
        description="Number of batches M (desk scale: M*L = 10^4)",
    )
    default_paths: int = Field(
        default=1000,
        description="Paths per batch L",
    )
    workers: int = Field(
        default=4,
        description="Thread pool size for batch simulation and raster scans",
    )


# Singleton settings instance
_settings: Settings | None = None


def get_settings() -> Settings:
    """Get or create settings singleton"""
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings
