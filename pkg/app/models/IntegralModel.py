from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator

from app.models.BaseModel import BaseModelMixin
from app.utils.constants import DEFAULT_PV_EPSILONS


class Extrapolation(str, Enum):
    RICHARDSON = "richardson"
    NONE = "none"


class PVConfig(BaseModel):
    epsilons: List[float] = Field(default_factory=lambda: list(DEFAULT_PV_EPSILONS))
    extrapolation: Extrapolation = Extrapolation.RICHARDSON

    @field_validator("epsilons")
    @classmethod
    def check_epsilons(cls, value):
        if not value:
            raise ValueError("epsilons must not be empty")
        if any(eps <= 0 for eps in value):
            raise ValueError("epsilons must be positive")
        if any(b >= a for a, b in zip(value, value[1:])):
            raise ValueError("epsilons must be strictly decreasing")
        return value

    @field_validator("extrapolation")
    @classmethod
    def check_extrapolation(cls, value, info):
        epsilons = info.data.get("epsilons") or []
        if value == Extrapolation.RICHARDSON and len(epsilons) < 3:
            raise ValueError("extrapolation needs at least 3 epsilons")
        return value


class ApproachSpec(BaseModel):
    """Non-tangential approach to a boundary point.

    ``direction`` points into the domain; None means the inward normal.
    ``oblique_degrees`` tilts the normal toward a tangent direction.
    """
    direction: Optional[List[float]] = None
    h0: float = 0.1
    levels: int = 4
    oblique_degrees: float = 0.0

    @field_validator("h0")
    @classmethod
    def check_h0(cls, value):
        if value <= 0:
            raise ValueError("h0 must be positive")
        return value

    @field_validator("levels")
    @classmethod
    def check_levels(cls, value):
        if value < 2:
            raise ValueError("levels must be >= 2")
        return value

    @field_validator("oblique_degrees")
    @classmethod
    def check_angle(cls, value):
        if not 0.0 <= value < 90.0:
            raise ValueError("oblique_degrees must lie in [0, 90)")
        return value

    def steps(self) -> np.ndarray:
        return self.h0 * 2.0 ** -np.arange(self.levels)


@dataclass
class ExtrapolationResult(BaseModelMixin):
    """Limit of a ladder of values at steps tending to zero."""
    value: np.ndarray
    est_error: float
    steps: np.ndarray
    values: np.ndarray
    rate: Optional[float] = None


@dataclass
class JumpResult(BaseModelMixin):
    interior_limit: np.ndarray
    exterior_limit: np.ndarray
    boundary_value: np.ndarray
    tau: float
    f_value: np.ndarray
    est_error: float = 0.0
    details: Dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for name in ("interior_limit", "exterior_limit", "boundary_value"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} is not finite")

    def residuals(self) -> Dict[str, float]:
        """Deviations from the three boundary-limit identities."""
        f = self.f_value
        return {
            "interior": float(np.linalg.norm(self.interior_limit - self.boundary_value - (1.0 - self.tau) * f)),
            "exterior": float(np.linalg.norm(self.exterior_limit - self.boundary_value + self.tau * f)),
            "jump": float(np.linalg.norm(self.interior_limit - self.exterior_limit - f)),
        }


@dataclass
class FarFieldResult(BaseModelMixin):
    radii: np.ndarray
    magnitudes: np.ndarray
    exponent: float
    expected: float


@dataclass
class CompatibilityReport(BaseModelMixin):
    residual: float
    worst_pair: Optional[List[int]] = None
    integral_residual: Optional[float] = None
    samples: int = 0

    def passes(self, tol: float) -> bool:
        worst = self.residual if self.integral_residual is None else max(self.residual, self.integral_residual)
        return worst < tol


@dataclass
class HartogsReport(BaseModelMixin):
    inside_error: float
    outside_error: float
    monogenic_residual: float
    points_inside: int
    points_outside: int

    @property
    def worst(self) -> float:
        return max(self.inside_error, self.outside_error, self.monogenic_residual)
