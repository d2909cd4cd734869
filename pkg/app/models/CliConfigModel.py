from enum import Enum
from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator

from app.config import get_results_dir, get_seed, get_threads
from app.models.QuadratureConfigModel import QuadratureConfig
from app.models.VerificationModel import CaseSetup


class CliConfig(BaseModel):
    """Global flags shared by every subcommand."""
    command: Optional[str] = None
    format: Optional[Literal["json", "csv"]] = None
    seed: int = 42
    threads: int = 1
    log_level: str = "INFO"
    results_dir: str = "results"
    timings: bool = False

    @field_validator("threads")
    @classmethod
    def check_threads(cls, value):
        if value < 1:
            raise ValueError("threads must be >= 1")
        return value

    @classmethod
    def from_flags(cls, seed: Optional[int], threads: Optional[int], fmt: Optional[str], log_level: str,
                   results_dir: Optional[str], timings: bool) -> "CliConfig":
        """Flags win over ALTERNA_* environment variables."""
        return cls(format=fmt, seed=get_seed(seed), threads=get_threads(threads), log_level=log_level,
                   results_dir=get_results_dir(results_dir), timings=timings)

    def output_format(self, default: str = "json") -> str:
        return self.format or default


class EvalOp(str, Enum):
    BM_INTEGRAL = "bm_integral"
    CAUCHY_POMPEIU = "cauchy_pompeiu"
    SOLID_ANGLE = "solid_angle"
    BM_SINGULAR_PV = "bm_singular_pv"
    PLEMELJ_LIMITS = "plemelj_limits"
    TEODORESCU = "teodorescu"
    SOLVE_INHOMOGENEOUS = "solve_inhomogeneous"
    CAUCHY_KERNEL = "cauchy_kernel"
    FUNDAMENTAL_SOLUTION = "fundamental_solution"
    DBAR = "dbar"


class EvalRequest(CaseSetup):
    """One operator evaluation, read from ``--config`` and overridden by flags."""
    op: EvalOp = EvalOp.BM_INTEGRAL
    quadrature: QuadratureConfig = Field(default_factory=QuadratureConfig)
    block: int = 1
    method: str = "analytic"
