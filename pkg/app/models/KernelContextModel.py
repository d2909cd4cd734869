from dataclasses import dataclass

from app.models.BaseModel import BaseModelMixin
from app.models.SubspaceModel import SubspaceSpec


@dataclass(frozen=True, eq=False)
class KernelContext(BaseModelMixin):
    subspace: SubspaceSpec
    n: int
    D: int
    sigma_D: float
    sigma_M: float

    @property
    def m(self) -> int:
        return self.subspace.m

    @property
    def algebra(self):
        return self.subspace.algebra
