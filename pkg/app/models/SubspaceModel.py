from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from app.models.AlgebraModel import AlgebraSpec
from app.models.BaseModel import BaseModelMixin
from app.utils.exceptions import DimensionMismatchError


@dataclass(frozen=True, eq=False)
class SubspaceSpec(BaseModelMixin):
    """Hypercomplex subspace M = span(v_0, ..., v_m) of an algebra, v_0 = 1."""
    algebra: AlgebraSpec
    basis_vectors: np.ndarray = field(repr=False)
    name: str = "custom"
    basis_indices: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        vectors = np.array(self.basis_vectors, dtype=float)
        if vectors.ndim != 2 or vectors.shape[1] != self.algebra.dim:
            raise DimensionMismatchError(
                f"Subspace basis must have shape (m+1, {self.algebra.dim}), got {vectors.shape}")
        vectors.setflags(write=False)
        object.__setattr__(self, "basis_vectors", vectors)

    @property
    def m(self) -> int:
        return self.basis_vectors.shape[0] - 1

    @property
    def block(self) -> int:
        return self.basis_vectors.shape[0]

    def ambient_dim(self, n: int) -> int:
        return self.block * n

    def describe(self) -> Dict:
        return {"name": self.name, "algebra": self.algebra.name, "m": self.m,
                "basis": [self.algebra.labels[i] for i in self.basis_indices] if self.basis_indices else None}


@dataclass
class MultiPoint(BaseModelMixin):
    """Point of M^n as (m+1)n real coordinates, block j holding (x_{j,0}, ..., x_{j,m})."""
    n: int
    coords: np.ndarray

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float)

    def check(self, S: SubspaceSpec) -> np.ndarray:
        if self.coords.shape[-1] != S.ambient_dim(self.n):
            raise DimensionMismatchError(
                f"MultiPoint has {self.coords.shape[-1]} coordinates, expected (m+1)n = {S.ambient_dim(self.n)}")
        return self.coords

    def block(self, S: SubspaceSpec, j: int) -> np.ndarray:
        coords = self.check(S)
        return coords[..., (j - 1) * S.block:j * S.block]


@dataclass
class ValidationReport(BaseModelMixin):
    """Violated hypercomplex-basis conditions; empty means valid"""
    violations: List[Dict] = field(default_factory=list)

    @property
    def is_valid(self) -> bool:
        return not self.violations
