# bwsb/config.py
from pydantic_settings import BaseSettings
from pydantic import Field


class Settings(BaseSettings):
    # ---- Simulación --------------------------------------------
    DT: float = Field(default=1e-3, gt=0)
    HORIZON: float = Field(default=20.0, gt=0)
    PARALLEL_WORKERS: int = Field(default=1, ge=1)

    # ---- Barreras / CBF ----------------------------------------
    CBF_ALPHA: float = Field(default=1.0, gt=0)
    FD_STEP_SCALE: float = Field(default=1e-6, gt=0)

    # ---- Difeomorfismo -----------------------------------------
    DIFFEO_LAMBDA: float = Field(default=100.0, gt=0)
    DOMAIN_TOLERANCE: float = Field(default=1e-9, ge=0)
    JACOBIAN_CONDITION_LIMIT: float = Field(default=1e12, gt=0)
    NEWTON_MAX_ITER: int = Field(default=30, ge=0)  # por tramo de continuación
    NEWTON_TOLERANCE: float = Field(default=1e-10, gt=0)
    CONTINUATION_MIN_STEP: float = Field(default=1e-9, gt=0)
    RAY_TABLE_SIZE: int = Field(default=4096, ge=16)
    RAY_ROOT_TOLERANCE: float = Field(default=1e-10, gt=0)

    # ---- Main QP / obstáculos ----------------------------------
    AVOIDANCE_KAPPA: float = Field(default=1.0, gt=0)
    AVOIDANCE_KP: float = Field(default=1.0, gt=0)
    RADIUS_FLOOR: float = Field(default=1e-3, gt=0)
    BOUNDARY_GROWTH_CAP: float = Field(default=100.0, gt=1)
    SAFETY_TOLERANCE: float = Field(default=1e-6, ge=0)
    ROW_TOLERANCE: float = Field(default=1e-9, ge=0)
    STEP_HALVINGS: int = Field(default=4, ge=0)
    STEP_SHRINKS: int = Field(default=12, ge=1)

    # ---- Solver QP ---------------------------------------------
    QP_KKT_TOLERANCE: float = Field(default=1e-8, gt=0)
    QP_FEASIBILITY_SLACK: float = Field(default=1e-9, gt=0)
    QP_ITERATION_FACTOR: int = Field(default=100, ge=1)

    # ---- Detección de deadlock ---------------------------------
    DEADLOCK_WINDOW: int = Field(default=500, ge=1)
    DEADLOCK_VELOCITY: float = Field(default=1e-3, gt=0)
    GOAL_RADIUS: float = Field(default=5e-2, gt=0)

    # ---- Salida ------------------------------------------------
    CONTOUR_GRID: int = Field(default=400, ge=8)
    LOG_LEVEL: str = Field(default="INFO")
    LOG_JSON: bool = Field(default=False)
    METRICS_ENABLED: bool = Field(default=True)

    class Config:
        env_file = ".env"
        env_prefix = "BWSB_"
        case_sensitive = True
        extra = "ignore"

# Instancia global
settings = Settings()
