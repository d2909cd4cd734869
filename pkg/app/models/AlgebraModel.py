from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from app.models.BaseModel import BaseModelMixin
from app.utils.exceptions import DimensionMismatchError


@dataclass(frozen=True)
class AlgebraSpec(BaseModelMixin):
    """Finite-dimensional real algebra with unity given by structure constants.

    ``structure`` holds the sparse entries ``(s, t, u, value)`` of
    ``v_s v_t = sum_u c[s][t][u] v_u``; ``involution`` maps each basis index to
    ``(target, sign)``. The unit is always basis index 0.
    """
    dim: int
    name: str
    structure: Tuple[Tuple[int, int, int, float], ...]
    involution: Tuple[Tuple[int, int], ...]
    labels: Tuple[str, ...] = ()
    unit_index: int = 0
    table: np.ndarray = field(default=None, repr=False, compare=False)
    conj_matrix: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        table = np.zeros((self.dim, self.dim, self.dim))
        for s, t, u, value in self.structure:
            table[s, t, u] += value
        table.setflags(write=False)
        conj = np.zeros((self.dim, self.dim))
        for s, (target, sign) in enumerate(self.involution):
            conj[target, s] = sign
        conj.setflags(write=False)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "conj_matrix", conj)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(["1"] + [f"e{s}" for s in range(1, self.dim)]))

    def basis(self, index: int) -> np.ndarray:
        element = np.zeros(self.dim)
        element[index] = 1.0
        return element

    def unit(self) -> np.ndarray:
        return self.basis(self.unit_index)

    def check(self, x, name: str = "x") -> np.ndarray:
        coeffs = np.asarray(x.coeffs if isinstance(x, AlgebraElement) else x, dtype=float)
        if coeffs.ndim == 0 or coeffs.shape[-1] != self.dim:
            raise DimensionMismatchError(
                f"{name} has {coeffs.shape[-1] if coeffs.ndim else 0} coefficients, algebra {self.name} has dim {self.dim}")
        return coeffs

    def to_file_dict(self) -> Dict:
        return {
            "dim": self.dim,
            "name": self.name,
            "structure": [[s, t, u, v] for s, t, u, v in self.structure],
            "involution": [[s, target, sign] for s, (target, sign) in enumerate(self.involution)],
        }


@dataclass
class AlgebraElement(BaseModelMixin):
    """Coefficient vector over the algebra basis."""
    coeffs: np.ndarray
    algebra: Optional[str] = None

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def describe(self, labels: List[str], tol: float = 1e-14) -> str:
        terms = [f"{c:+.12g}{'' if label == '1' else '*' + label}"
                 for c, label in zip(self.coeffs, labels) if abs(c) > tol]
        return " ".join(terms) if terms else "0"


@dataclass
class AlgebraReport(BaseModelMixin):
    """Result of checking an algebra's basis-level invariants"""
    is_valid: bool
    errors: List[Dict] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
