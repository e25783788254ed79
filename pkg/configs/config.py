from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict
from pathlib import Path
import os


class AppConfig(BaseSettings):
    """
    Configuration settings for the Lateral vdW Analyzer.

    Attributes:
        APP_NAME (str): The name of the application.
        LOG_LEVEL (str): Logging level for the application.
        LATERAL_VDW_THREADS (int): Worker threads for sweeps when --threads is not given.
        QUAD_REL_TOL (float): Default relative tolerance of the kernel quadratures.
        QUAD_ABS_TOL (float): Default absolute tolerance of the kernel quadratures.
        QUAD_U_MAX (float): Default truncation radius of the spectral integrals.
        QUAD_MAX_REFINEMENTS (int): Maximum number of adaptive subintervals.
        OUTPUT_PRECISION (int): Significant digits written to CSV/JSON output.
        FIGURES_DIR (Path): Directory holding the checked-in figure configs.
        OUTPUT_DIR (Path): Directory where the figure flow writes its data.
    """

    APP_NAME: str = "Lateral vdW Analyzer"
    LOG_LEVEL: str = "INFO"
    LATERAL_VDW_THREADS: int = Field(default=1, ge=1)
    QUAD_REL_TOL: float = Field(default=1e-9, gt=0)
    QUAD_ABS_TOL: float = Field(default=1e-12, gt=0)
    QUAD_U_MAX: float = Field(default=40.0, ge=20)
    QUAD_MAX_REFINEMENTS: int = Field(default=2000, ge=1)
    OUTPUT_PRECISION: int = Field(default=9, ge=1, le=17)
    FIGURES_DIR: Path = Path("configs/figures")
    OUTPUT_DIR: Path = Path("data/figures")

    model_config = SettingsConfigDict(
        env_file=os.environ.get("ENV_FILE", ".env"),
        case_sensitive=True,
        extra="ignore",  # Ignore extra environment variables
    )


config = AppConfig()
