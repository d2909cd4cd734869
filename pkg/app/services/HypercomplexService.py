import itertools
import logging
from typing import Optional, Sequence

import numpy as np

from app.models.AlgebraModel import AlgebraSpec
from app.models.SubspaceModel import MultiPoint, SubspaceSpec, ValidationReport
from app.services.AlgebraCoreService import (
    build_algebra,
    conj,
    mul,
    qnorm,
    quadratic_cone_contains,
    trace,
)
from app.utils.constants import SCALAR_TOL, SUBSPACE_PRESETS
from app.utils.exceptions import ConfigurationError, DimensionMismatchError, IndexRangeError

logger = logging.getLogger(__name__)

# preset name -> (algebra kind, basis indices of v_0..v_m)
PRESETS = {
    "H-CJ": ("quaternions", (0, 1)),
    "H-reduced": ("quaternions", (0, 1, 2)),
    "H-full": ("quaternions", (0, 1, 2, 3)),
    "O-full": ("octonions", tuple(range(8))),
    "Cl02-paravec": ("clifford(2)", (0, 1, 2)),
    "Cl03-paravec": ("clifford(3)", (0, 1, 2, 3)),
}


def build_subspace(A: AlgebraSpec, vectors: Sequence[Sequence[float]], name: str = "custom") -> SubspaceSpec:
    return SubspaceSpec(algebra=A, basis_vectors=np.asarray(vectors, dtype=float), name=name)


def basis_subspace(A: AlgebraSpec, indices: Sequence[int], name: str = "custom") -> SubspaceSpec:
    vectors = np.eye(A.dim)[list(indices)]
    return SubspaceSpec(algebra=A, basis_vectors=vectors, name=name, basis_indices=tuple(indices))


def subspace_preset(name: str) -> SubspaceSpec:
    if name not in PRESETS:
        raise ConfigurationError(f"Unknown subspace preset '{name}', expected one of {', '.join(SUBSPACE_PRESETS)}")
    kind, indices = PRESETS[name]
    S = basis_subspace(build_algebra(kind), indices, name=name)
    report = validate_basis(S)
    if not report.is_valid:
        raise ConfigurationError(f"Preset {name} failed validation: {report.violations}")
    return S


def validate_basis(S: SubspaceSpec, tol: float = SCALAR_TOL) -> ValidationReport:
    A = S.algebra
    V = S.basis_vectors
    violations = []
    one = A.unit()

    unit_residual = float(np.max(np.abs(V[0] - one)))
    if unit_residual > tol:
        violations.append({"condition": "v0_is_unit", "indices": [0], "residual": unit_residual})

    for s in range(1, S.m + 1):
        t = trace(A, V[s])
        if np.max(np.abs(t)) > tol:
            violations.append({"condition": "trace_zero", "indices": [s], "residual": float(np.max(np.abs(t)))})
        n = qnorm(A, V[s])
        n_residual = float(np.max(np.abs(n - one)))
        if n_residual > tol:
            violations.append({"condition": "norm_one", "indices": [s], "residual": n_residual})

    for s, u in itertools.combinations(range(1, S.m + 1), 2):
        t = trace(A, mul(A, V[s], conj(A, V[u])))
        if np.max(np.abs(t)) > tol:
            violations.append({"condition": "orthogonal_trace", "indices": [s, u],
                               "residual": float(np.max(np.abs(t)))})

    for s in range(S.m + 1):
        if not quadratic_cone_contains(A, V[s], tol):
            violations.append({"condition": "in_quadratic_cone", "indices": [s], "residual": None})

    for violation in violations:
        logger.warning(f"⚠️ Subspace {S.name}: {violation['condition']} violated at {violation['indices']}")
    return ValidationReport(violations=violations)


def anticommutation_residual(S: SubspaceSpec) -> float:
    """max |v_s v_t + v_t v_s + 2 delta_st| over 1 <= s, t <= m."""
    A = S.algebra
    worst = 0.0
    for s, t in itertools.product(range(1, S.m + 1), repeat=2):
        value = mul(A, S.basis_vectors[s], S.basis_vectors[t]) + mul(A, S.basis_vectors[t], S.basis_vectors[s])
        if s == t:
            value = value + 2.0 * A.unit()
        worst = max(worst, float(np.max(np.abs(value))))
    return worst


def blocks(S: SubspaceSpec, n: int, coords: np.ndarray) -> np.ndarray:
    """Reshape ``(..., (m+1)n)`` coordinates to ``(..., n, m+1)``."""
    coords = np.asarray(coords, dtype=float)
    if coords.shape[-1] != S.ambient_dim(n):
        raise DimensionMismatchError(
            f"Point has {coords.shape[-1]} coordinates, expected (m+1)n = {S.ambient_dim(n)}")
    return coords.reshape(coords.shape[:-1] + (n, S.block))


def embed_block(S: SubspaceSpec, block: np.ndarray) -> np.ndarray:
    """sum_s x_s v_s for block coordinates of shape ``(..., m+1)``."""
    return np.asarray(block, dtype=float) @ S.basis_vectors


def embed(S: SubspaceSpec, j: int, p, n: Optional[int] = None) -> np.ndarray:
    if isinstance(p, MultiPoint):
        n = p.n
        coords = p.check(S)
    else:
        coords = np.asarray(p, dtype=float)
        n = n if n is not None else coords.shape[-1] // S.block
    if not 1 <= j <= n:
        raise IndexRangeError(f"Variable index j={j} outside 1..{n}")
    return embed_block(S, blocks(S, n, coords)[..., j - 1, :])


def embed_all(S: SubspaceSpec, n: int, coords: np.ndarray) -> np.ndarray:
    """Embedding of every variable, shape ``(..., n, dim)``."""
    return embed_block(S, blocks(S, n, coords))


def trace_inner_product_residual(S: SubspaceSpec, samples: int = 200, seed: int = 42) -> float:
    """max |t(x y^c) - 2<x,y>| for random x, y in M."""
    A = S.algebra
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((samples, S.block))
    b = rng.standard_normal((samples, S.block))
    x, y = embed_block(S, a), embed_block(S, b)
    t = trace(A, mul(A, x, conj(A, y)))
    expected = 2.0 * np.sum(x * y, axis=-1)[:, None] * A.unit()
    return float(np.max(np.abs(t - expected)))
