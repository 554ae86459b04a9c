import os
import logging
from contextlib import contextmanager
from typing import Dict, Iterator, Optional

from dotenv import load_dotenv
from pydantic import (Field, BaseModel, ConfigDict, field_validator,
                      ValidationError)
from pydantic_settings import BaseSettings

logger = logging.getLogger(__name__)


class ToleranceSettings(BaseModel):
    """Numeric tolerances of the invariant checks, before tol-scale."""
    duality: float = Field(1e-10, gt=0)
    holonomy: float = Field(1e-10, gt=0)
    orthonormality: float = Field(1e-10, gt=0)
    reconstruction: float = Field(1e-8, gt=0)
    round_trip: float = Field(1e-10, gt=0)
    trace_identity: float = Field(1e-8, gt=0)
    antisymmetry: float = Field(1e-14, gt=0)
    partials_relative: float = Field(1e-5, gt=0)
    classification: float = Field(1e-6, gt=0)
    kappa_min: float = Field(1e-8, gt=0)
    complex_frenet: float = Field(1e-6, gt=0)
    torsion_angle: float = Field(1e-4, gt=0)
    climb_closed_form: float = Field(1e-4, gt=0)
    eigen_pattern: float = Field(1e-6, gt=0)
    christoffel: float = Field(1e-8, gt=0)
    gaussian_curvature: float = Field(1e-8, gt=0)
    trace_divergence: float = Field(1e-8, gt=0)
    det_identity: float = Field(1e-6, gt=0)
    metric_rate: float = Field(1e-6, gt=0)
    flow_consistency: float = Field(1e-8, gt=0)
    inextensibility: float = Field(1e-8, gt=0)
    slip_reconstruction: float = Field(1e-8, gt=0)
    dissipation_identity: float = Field(1e-10, gt=0)
    orowan_chain: float = Field(1e-12, gt=0)
    orowan_relation: float = Field(1e-6, gt=0)
    killing: float = Field(1e-8, gt=0)
    kinematic_consistency: float = Field(1e-3, gt=0)
    kappa_drift: float = Field(1e-10, gt=0)
    static_congruence: float = Field(1e-6, gt=0)
    closed_orbit: float = Field(1e-6, gt=0)
    stokes_analytic: float = Field(1e-6, gt=0)
    stokes_gridded: float = Field(1e-3, gt=0)


class NumericsSettings(BaseModel):
    """Discretisation defaults."""
    fd_step: float = Field(1e-3, gt=0)
    quadrature_nodes: int = Field(8, ge=2)
    grid_cells: int = Field(32, ge=4)
    lattice_per_axis: int = Field(5, ge=2)
    lattice_random: int = Field(16, ge=0)


class AppSettings(BaseSettings):
    """Process-wide settings, loaded via get_settings function."""
    tolerances: ToleranceSettings = ToleranceSettings()
    numerics: NumericsSettings = NumericsSettings()

    seed: int = 0
    tol_scale: float = Field(1.0, gt=0)
    output_dir: str = "output"
    log_level: str = "INFO"
    log_file: Optional[str] = "disloc.log"

    model_config = ConfigDict(
        # BaseSettings reads .env through python-dotenv when present
        env_file=".env",
        extra="ignore",
        arbitrary_types_allowed=True
    )

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        if v.upper() not in ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]:
            raise ValueError('log_level must be one of DEBUG, INFO, WARNING, ERROR, CRITICAL')
        return v.upper()

    def tol(self, name: str) -> float:
        """Scaled tolerance by name."""
        return getattr(self.tolerances, name) * self.tol_scale


def get_settings() -> AppSettings:
    """Load settings from environment variables, parse, validate, and return AppSettings."""
    logger.info("Loading and validating application settings...")
    load_dotenv()
    try:
        settings_data = {
            "numerics": {
                "fd_step": float(os.environ.get("DISLOC_FD_STEP", "1e-3")),
                "quadrature_nodes": int(os.environ.get("DISLOC_QUAD_NODES", "8")),
                "grid_cells": int(os.environ.get("DISLOC_GRID_CELLS", "32")),
                "lattice_per_axis": int(os.environ.get("DISLOC_LATTICE_PER_AXIS", "5")),
                "lattice_random": int(os.environ.get("DISLOC_LATTICE_RANDOM", "16")),
            },
            "seed": int(os.environ.get("DISLOC_SEED", "0")),
            "tol_scale": float(os.environ.get("DISLOC_TOL_SCALE", "1.0")),
            "output_dir": os.environ.get("DISLOC_OUTPUT_DIR", "output"),
            "log_level": os.environ.get("LOG_LEVEL", "INFO"),
            "log_file": os.environ.get("LOG_FILE", "disloc.log") or None,
        }

        app_settings = AppSettings(**settings_data)
        logger.info("Application settings loaded and validated successfully.")
        return app_settings

    except (ValueError, ValidationError) as e:
        logger.exception(f"CRITICAL: Failed to load or validate application settings: {e}")
        raise SystemExit(f"CRITICAL: Failed to load or validate application settings: {e}")


# --- Singleton Instance ---
settings = get_settings()


@contextmanager
def overrides(tolerances: Optional[Dict[str, float]] = None, seed: Optional[int] = None,
              tol_scale: Optional[float] = None) -> Iterator[AppSettings]:
    """Temporarily replace tolerances, the seed and the tolerance scale of the singleton."""
    saved_tolerances = settings.tolerances.model_copy()
    saved_seed, saved_scale = settings.seed, settings.tol_scale
    try:
        for name, value in (tolerances or {}).items():
            if name not in ToleranceSettings.model_fields:
                raise ValueError(f"unknown tolerance '{name}'")
            setattr(settings.tolerances, name, float(value))
        if seed is not None:
            settings.seed = int(seed)
        if tol_scale is not None:
            if tol_scale <= 0:
                raise ValueError(f"tol_scale must be positive, got {tol_scale}")
            settings.tol_scale = float(tol_scale)
        yield settings
    finally:
        settings.tolerances = saved_tolerances
        settings.seed, settings.tol_scale = saved_seed, saved_scale
