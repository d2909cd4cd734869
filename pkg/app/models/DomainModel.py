import itertools
from dataclasses import dataclass
from typing import Dict, Iterator, Optional

import numpy as np

from app.models.BaseModel import BaseModelMixin
from app.utils.exceptions import ConfigurationError, DimensionMismatchError, DomainError
from app.utils.gauss_rules import ball_volume, sphere_area


@dataclass(frozen=True, eq=False)
class DomainSpec(BaseModelMixin):
    """Axis-aligned box or Euclidean ball in R^D."""
    kind: str
    ambient_dim: int
    lo: Optional[np.ndarray] = None
    hi: Optional[np.ndarray] = None
    center: Optional[np.ndarray] = None
    radius: Optional[float] = None

    def __post_init__(self):
        if self.kind == "box":
            lo = np.asarray(self.lo, dtype=float)
            hi = np.asarray(self.hi, dtype=float)
            if lo.shape != (self.ambient_dim,) or hi.shape != (self.ambient_dim,):
                raise DimensionMismatchError(f"Box bounds must have {self.ambient_dim} entries")
            if np.any(lo >= hi):
                raise ConfigurationError(f"Box needs lo < hi on every axis, got lo={lo.tolist()} hi={hi.tolist()}")
            object.__setattr__(self, "lo", lo)
            object.__setattr__(self, "hi", hi)
        elif self.kind == "ball":
            center = np.asarray(self.center, dtype=float)
            if center.shape != (self.ambient_dim,):
                raise DimensionMismatchError(f"Ball center must have {self.ambient_dim} entries")
            if self.radius is None or self.radius <= 0:
                raise ConfigurationError(f"Ball radius must be positive, got {self.radius}")
            object.__setattr__(self, "center", center)
            object.__setattr__(self, "radius", float(self.radius))
        else:
            raise ConfigurationError(f"Unknown domain kind '{self.kind}', expected box or ball")

    @classmethod
    def box(cls, lo, hi) -> "DomainSpec":
        lo = np.asarray(lo, dtype=float)
        return cls(kind="box", ambient_dim=lo.shape[0], lo=lo, hi=np.asarray(hi, dtype=float))

    @classmethod
    def cube(cls, D: int, half: float = 1.0, center: float = 0.0) -> "DomainSpec":
        return cls.box(np.full(D, center - half), np.full(D, center + half))

    @classmethod
    def ball(cls, center, radius: float) -> "DomainSpec":
        center = np.asarray(center, dtype=float)
        return cls(kind="ball", ambient_dim=center.shape[0], center=center, radius=radius)

    @classmethod
    def from_dict(cls, raw: Dict, D: Optional[int] = None) -> "DomainSpec":
        kind = raw.get("kind", "box")
        if kind == "box":
            if "lo" in raw:
                return cls.box(raw["lo"], raw["hi"])
            if D is None:
                raise ConfigurationError("Box domain needs lo/hi or an ambient dimension")
            return cls.cube(D, float(raw.get("half", 1.0)), float(raw.get("offset", 0.0)))
        if kind == "ball":
            center = raw.get("center")
            if center is None:
                if D is None:
                    raise ConfigurationError("Ball domain needs a center or an ambient dimension")
                center = np.zeros(D)
            return cls.ball(center, float(raw.get("radius", 1.0)))
        raise ConfigurationError(f"Unknown domain kind '{kind}', expected box or ball")

    def to_dict(self, exclude=None) -> Dict:
        if self.kind == "box":
            return {"kind": "box", "lo": self.lo.tolist(), "hi": self.hi.tolist()}
        return {"kind": "ball", "center": self.center.tolist(), "radius": self.radius}

    @property
    def middle(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi) if self.kind == "box" else self.center

    @property
    def half_widths(self) -> np.ndarray:
        return 0.5 * (self.hi - self.lo) if self.kind == "box" else np.full(self.ambient_dim, self.radius)

    def check_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.ambient_dim:
            raise DimensionMismatchError(f"Point has {x.shape[-1]} coordinates, domain has {self.ambient_dim}")
        return x

    def signed_distance(self, x) -> np.ndarray:
        """Negative inside, positive outside, zero on the boundary."""
        x = self.check_point(x)
        if self.kind == "ball":
            return np.linalg.norm(x - self.center, axis=-1) - self.radius
        below = self.lo - x
        above = x - self.hi
        gap = np.maximum(below, above)
        outside = np.linalg.norm(np.maximum(gap, 0.0), axis=-1)
        inside = np.max(gap, axis=-1)
        return np.where(inside > 0, outside, inside)

    def contains(self, x) -> np.ndarray:
        return self.signed_distance(x) < 0

    def on_boundary(self, x, tol: float = 1e-10) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.half_widths))))
        return bool(np.all(np.abs(self.signed_distance(x)) <= tol * scale))

    def active_constraints(self, x, tol: float = 1e-10) -> int:
        """Number of binding coordinate constraints at a box boundary point."""
        x = self.check_point(x)
        scale = max(1.0, float(np.max(self.half_widths)))
        return int(np.sum(np.abs(x - self.lo) <= tol * scale) + np.sum(np.abs(x - self.hi) <= tol * scale))

    def outward_normal(self, x, tol: float = 1e-10) -> np.ndarray:
        x = self.check_point(x)
        if not self.on_boundary(x, tol):
            raise DomainError("Point is not on the boundary")
        if self.kind == "ball":
            return (x - self.center) / np.linalg.norm(x - self.center)
        if self.active_constraints(x, tol) != 1:
            raise DomainError("Outward normal is undefined at box edges and corners")
        scale = max(1.0, float(np.max(self.half_widths)))
        normal = np.zeros(self.ambient_dim)
        normal[np.abs(x - self.lo) <= tol * scale] = -1.0
        normal[np.abs(x - self.hi) <= tol * scale] = 1.0
        return normal

    def snap_to_boundary(self, x, tol: float = 1e-10) -> np.ndarray:
        """Exact boundary representative of a point within ``tol`` of the boundary."""
        x = self.check_point(x)
        if not self.on_boundary(x, tol):
            raise DomainError("Point is not on the boundary")
        if self.kind == "ball":
            offset = x - self.center
            return self.center + self.radius * offset / np.linalg.norm(offset)
        scale = max(1.0, float(np.max(self.half_widths)))
        snapped = np.clip(x, self.lo, self.hi)
        snapped = np.where(np.abs(snapped - self.lo) <= tol * scale, self.lo, snapped)
        return np.where(np.abs(snapped - self.hi) <= tol * scale, self.hi, snapped)

    def inflate(self, factor: float) -> "DomainSpec":
        """Scale about the center; factor 1.1 inflates by 10%."""
        if self.kind == "box":
            half = self.half_widths * factor
            return DomainSpec.box(self.middle - half, self.middle + half)
        return DomainSpec.ball(self.center, self.radius * factor)

    def contains_domain(self, other: "DomainSpec", strict: bool = True) -> bool:
        if other.kind == "box":
            corners = np.array([other.lo, other.hi])
            # every box corner is a vertex of the hull
            vertices = np.array([[corners[c, i] for i, c in enumerate(choice)]
                                 for choice in itertools.product((0, 1), repeat=other.ambient_dim)])
            distance = self.signed_distance(vertices)
        else:
            if self.kind == "ball":
                gap = np.linalg.norm(other.center - self.center) + other.radius - self.radius
                return gap < 0 if strict else gap <= 0
            lo_gap = (other.center - other.radius) - self.lo
            hi_gap = self.hi - (other.center + other.radius)
            distance = -np.concatenate([lo_gap, hi_gap])
        return bool(np.all(distance < 0)) if strict else bool(np.all(distance <= 0))

    def boundary_area(self) -> float:
        if self.kind == "ball":
            return sphere_area(self.ambient_dim) * self.radius ** (self.ambient_dim - 1)
        widths = self.hi - self.lo
        return float(sum(2.0 * np.prod(np.delete(widths, k)) for k in range(self.ambient_dim)))

    def volume(self) -> float:
        if self.kind == "ball":
            return ball_volume(self.ambient_dim) * self.radius ** self.ambient_dim
        return float(np.prod(self.hi - self.lo))


@dataclass
class BoundaryNode(BaseModelMixin):
    point: np.ndarray
    normal: np.ndarray
    weight: float


@dataclass
class NodeBatch:
    """Consecutive quadrature nodes; ``normals`` is None for volume nodes."""
    points: np.ndarray
    weights: np.ndarray
    normals: Optional[np.ndarray] = None
    offset: int = 0

    def __len__(self) -> int:
        return self.weights.shape[0]

    def nodes(self) -> Iterator[BoundaryNode]:
        for i in range(len(self)):
            normal = self.normals[i] if self.normals is not None else np.zeros(self.points.shape[1])
            yield BoundaryNode(point=self.points[i], normal=normal, weight=float(self.weights[i]))


@dataclass
class IntegrationResult:
    value: np.ndarray
    std_error: np.ndarray
    nodes: int = 0
