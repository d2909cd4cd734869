from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np

from app.models.BaseModel import BaseModelMixin


class Smoothness(str, Enum):
    ANALYTIC = "analytic"
    C_INFINITY = "C_infinity"
    C_K = "C_k"


class DiracMethod(str, Enum):
    ANALYTIC = "analytic"
    FD = "fd"


@dataclass(frozen=True, eq=False)
class FieldFunction(BaseModelMixin):
    """Algebra-valued function on M^n.

    ``eval`` maps coordinates of shape ``(..., D)`` to ``(..., dim)``.
    ``gradient`` (optional) returns all first partials, ``(..., D, dim)``.
    ``analytic_dbar`` (optional) maps ``(j, coords)`` to the exact left Dirac
    derivative in variable j. ``support`` is an axis-aligned bounding box
    ``(lo, hi)`` of the support when it is compact.
    """
    eval: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    label: str = "f"
    n: int = 1
    smoothness: Smoothness = Smoothness.ANALYTIC
    smoothness_order: Optional[int] = None
    analytic_dbar: Optional[Callable[[int, np.ndarray], np.ndarray]] = field(default=None, repr=False)
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)
    support: Optional[Tuple[np.ndarray, np.ndarray]] = field(default=None, repr=False)

    def __call__(self, coords) -> np.ndarray:
        return self.eval(np.asarray(coords, dtype=float))

    @property
    def compact(self) -> bool:
        return self.support is not None


@dataclass
class DiracResult(BaseModelMixin):
    value: np.ndarray
    method: DiracMethod
    est_error: float = 0.0

    def __post_init__(self):
        self.est_error = max(0.0, float(self.est_error))
