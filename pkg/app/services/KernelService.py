"""Cauchy and Bochner-Martinelli kernels, the Laplace fundamental solution and their identities.

Points are real coordinate arrays of shape ``(..., D)`` with D = (m+1)n;
kernel values are algebra coefficient arrays ``(..., dim)``.
"""
import logging
from typing import Optional, Tuple

import numpy as np

from app.models.FieldFunctionModel import DiracMethod, FieldFunction
from app.models.KernelContextModel import KernelContext
from app.models.SubspaceModel import SubspaceSpec
from app.services.AlgebraCoreService import associator, conj, mul
from app.services.FunctionsService import conj_dirac_apply, dirac_apply, laplacian_apply, right_dirac_apply
from app.services.HypercomplexService import blocks, embed_all, embed_block
from app.utils.exceptions import ConfigurationError, IndexRangeError, SingularityError
from app.utils.gauss_rules import sphere_area

logger = logging.getLogger(__name__)


def build_kernel_context(S: SubspaceSpec, n: int) -> KernelContext:
    if n < 1:
        raise ConfigurationError(f"Number of variables must be positive, got {n}")
    D = S.ambient_dim(n)
    return KernelContext(subspace=S, n=n, D=D, sigma_D=sphere_area(D), sigma_M=sphere_area(S.block))


def _radius(x: np.ndarray, what: str) -> np.ndarray:
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0.0):
        raise SingularityError(f"{what} is singular at the origin")
    return r


def cauchy_kernel_values(ctx: KernelContext, w: np.ndarray) -> np.ndarray:
    """E(w) = w^c / (sigma_{m+1} |w|^{m+1}) for block coordinates ``(..., m+1)``."""
    S = ctx.subspace
    w = np.asarray(w, dtype=float)
    r = _radius(w, "Cauchy kernel")
    return conj(S.algebra, embed_block(S, w)) / (ctx.sigma_M * r[..., None] ** S.block)


def cauchy_kernel_gradient(ctx: KernelContext, w: np.ndarray) -> np.ndarray:
    """Partials of E with respect to the block coordinates, ``(..., m+1, dim)``."""
    S = ctx.subspace
    A = S.algebra
    w = np.asarray(w, dtype=float)
    r = _radius(w, "Cauchy kernel")
    p = S.block
    value = conj(A, embed_block(S, w))
    vc = conj(A, S.basis_vectors)
    first = vc / (ctx.sigma_M * r[..., None, None] ** p)
    second = p * w[..., :, None] * value[..., None, :] / (ctx.sigma_M * r[..., None, None] ** (p + 2))
    return first - second


def cauchy_kernel(ctx: KernelContext, x) -> np.ndarray:
    if ctx.n != 1:
        raise ConfigurationError(f"cauchy_kernel needs n = 1, context has n = {ctx.n}")
    return cauchy_kernel_values(ctx, np.asarray(x, dtype=float))


def bm_component(ctx: KernelContext, j: int, x) -> np.ndarray:
    """K_j(x) = x_j^c / (sigma_D |x|^D)."""
    if not 1 <= j <= ctx.n:
        raise IndexRangeError(f"Variable index j={j} outside 1..{ctx.n}")
    S = ctx.subspace
    x = np.asarray(x, dtype=float)
    r = _radius(x, "Bochner-Martinelli kernel")
    xj = blocks(S, ctx.n, x)[..., j - 1, :]
    return conj(S.algebra, embed_block(S, xj)) / (ctx.sigma_D * r[..., None] ** ctx.D)


def bm_components(ctx: KernelContext, x: np.ndarray) -> np.ndarray:
    """All K_j at once, ``(..., n, dim)``."""
    S = ctx.subspace
    x = np.asarray(x, dtype=float)
    r = _radius(x, "Bochner-Martinelli kernel")
    return conj(S.algebra, embed_all(S, ctx.n, x)) / (ctx.sigma_D * r[..., None, None] ** ctx.D)


def bm_component_gradient(ctx: KernelContext, j: int, x) -> np.ndarray:
    """All D partials of K_j, ``(..., D, dim)``."""
    S = ctx.subspace
    A = S.algebra
    x = np.asarray(x, dtype=float)
    r = _radius(x, "Bochner-Martinelli kernel")
    value = bm_component(ctx, j, x)
    grad = -ctx.D * x[..., :, None] * value[..., None, :] / r[..., None, None] ** 2
    start = (j - 1) * S.block
    grad[..., start:start + S.block, :] += conj(A, S.basis_vectors) / (ctx.sigma_D * r[..., None, None] ** ctx.D)
    return grad


def fundamental_solution(ctx: KernelContext, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    r = _radius(x, "Fundamental solution")
    if ctx.D < 2:
        raise ConfigurationError(f"Fundamental solution needs D >= 2, got {ctx.D}")
    if ctx.D == 2:
        return -np.log(r) / (2.0 * np.pi)
    return r ** (2 - ctx.D) / ((2 - ctx.D) * ctx.sigma_D)


def bm_divergence(ctx: KernelContext, x) -> Tuple[np.ndarray, np.ndarray]:
    """Closed-form sum_j dbar_j K_j(x) and its per-j terms.

    Returns ``(total, per_j)`` with shapes ``(..., dim)`` and ``(..., n, dim)``;
    each term is the real scalar ((m+1)/sigma_D)(|x|^2 - n|x_j|^2)/|x|^{D+2}.
    """
    S = ctx.subspace
    x = np.asarray(x, dtype=float)
    _radius(x, "Bochner-Martinelli divergence")
    block_sq = np.sum(blocks(S, ctx.n, x) ** 2, axis=-1)
    r2 = np.sum(block_sq, axis=-1)
    scalars = (S.block / ctx.sigma_D) * (r2[..., None] - ctx.n * block_sq) / r2[..., None] ** (ctx.D / 2 + 1)
    per_j = scalars[..., None] * S.algebra.unit()
    return np.sum(per_j, axis=-2), per_j


def bm_pair(ctx: KernelContext, x: np.ndarray, points: np.ndarray, normals: np.ndarray, fvals: np.ndarray,
            weights: np.ndarray) -> np.ndarray:
    """Sum_j K_j(y - x) (nu_j(y) f(y)) w for a batch of boundary nodes, ``(B, dim)``."""
    S = ctx.subspace
    A = S.algebra
    offsets = np.asarray(points) - np.asarray(x)
    if np.any(np.linalg.norm(offsets, axis=-1) == 0.0):
        raise SingularityError("Boundary node coincides with the evaluation point")
    kernels = bm_components(ctx, offsets)
    nus = embed_all(S, ctx.n, normals)
    total = np.zeros(fvals.shape)
    for j in range(ctx.n):
        total = total + mul(A, kernels[..., j, :], mul(A, nus[..., j, :], fvals))
    return total * np.asarray(weights)[..., None]


def volume_pair(ctx: KernelContext, x: np.ndarray, points: np.ndarray, dbar_values: np.ndarray) -> np.ndarray:
    """Sum_j K_j(y - x) (dbar_j f(y)) for dbar values of shape ``(B, n, dim)``."""
    A = ctx.algebra
    kernels = bm_components(ctx, np.asarray(points) - np.asarray(x))
    total = np.zeros(dbar_values.shape[:-2] + (A.dim,))
    for j in range(ctx.n):
        total = total + mul(A, kernels[..., j, :], dbar_values[..., j, :])
    return total


def kernel_function(ctx: KernelContext, j: int) -> FieldFunction:
    return FieldFunction(eval=lambda y: bm_component(ctx, j, y), label=f"K{j}", n=ctx.n,
                         gradient=lambda y: bm_component_gradient(ctx, j, y))


def fundamental_function(ctx: KernelContext) -> FieldFunction:
    one = ctx.algebra.unit()
    return FieldFunction(eval=lambda y: fundamental_solution(ctx, y)[..., None] * one, label="G", n=ctx.n)


# ---------------------------------------------------------------------------
# Identity checks
# ---------------------------------------------------------------------------

def divergence_residual(ctx: KernelContext, points: np.ndarray) -> float:
    """max |sum_j dbar_j K_j| relative to the largest per-j term."""
    total, per_j = bm_divergence(ctx, points)
    scale = np.maximum(1.0, np.max(np.linalg.norm(per_j, axis=-1), axis=-1))
    return float(np.max(np.linalg.norm(total, axis=-1) / scale))


def divergence_fd_residual(ctx: KernelContext, points: np.ndarray, h: Optional[float] = None) -> float:
    """max |closed-form dbar_j K_j - FD dbar_j K_j| over j and points."""
    _, per_j = bm_divergence(ctx, points)
    worst = 0.0
    for j in range(1, ctx.n + 1):
        K = FieldFunction(eval=lambda y, j=j: bm_component(ctx, j, y), label=f"K{j}", n=ctx.n)
        fd = dirac_apply(ctx.subspace, K, j, points, h=h, method=DiracMethod.FD).value
        worst = max(worst, float(np.max(np.linalg.norm(fd - per_j[..., j - 1, :], axis=-1))))
    return worst


def right_divergence_residual(ctx: KernelContext, points: np.ndarray, h: Optional[float] = None) -> float:
    """max |sum_j K_j dbar_j| by finite differences."""
    total = 0.0
    for j in range(1, ctx.n + 1):
        K = FieldFunction(eval=lambda y, j=j: bm_component(ctx, j, y), label=f"K{j}", n=ctx.n)
        total = total + right_dirac_apply(ctx.subspace, K, j, points, h=h, method=DiracMethod.FD).value
    return float(np.max(np.linalg.norm(total, axis=-1)))


def harmonic_residual(ctx: KernelContext, points: np.ndarray, h: Optional[float] = None) -> float:
    """FD Laplacian of every K_j relative to |K_j|/|x|^2."""
    S = ctx.subspace
    points = np.asarray(points, dtype=float)
    r = np.linalg.norm(points, axis=-1)
    worst = 0.0
    for j in range(1, ctx.n + 1):
        K = kernel_function(ctx, j)
        laplacian = sum(laplacian_apply(S, K, i, points, h=h).value for i in range(1, ctx.n + 1))
        scale = np.linalg.norm(bm_component(ctx, j, points), axis=-1) / r ** 2
        worst = max(worst, float(np.max(np.linalg.norm(laplacian, axis=-1) / np.maximum(scale, 1e-300))))
    return worst


def gradient_relation_residual(ctx: KernelContext, points: np.ndarray, h: Optional[float] = None) -> float:
    """max |K_j - partial_j G| with partial_j G by finite differences."""
    G = fundamental_function(ctx)
    worst = 0.0
    for j in range(1, ctx.n + 1):
        fd = conj_dirac_apply(ctx.subspace, G, j, points, h=h, method=DiracMethod.FD).value
        worst = max(worst, float(np.max(np.linalg.norm(fd - bm_component(ctx, j, points), axis=-1))))
    return worst


def associator_lemma_residual(ctx: KernelContext, j: int, points: np.ndarray, a: np.ndarray) -> float:
    """max |sum_{s>=1} [v_s, dbar_j phi_s, a]| for phi = K_j written as sum_s phi_s v_s."""
    S = ctx.subspace
    A = S.algebra
    grad = bm_component_gradient(ctx, j, points)
    # real components phi_s of K_j in the basis of M
    coords = grad @ np.linalg.pinv(S.basis_vectors)
    start = (j - 1) * S.block
    total = np.zeros(np.shape(points)[:-1] + (A.dim,))
    for s in range(1, S.block):
        partials = coords[..., start:start + S.block, s]
        dbar_phi_s = partials @ S.basis_vectors
        total = total + associator(A, S.basis_vectors[s], dbar_phi_s, a)
    return float(np.max(np.linalg.norm(total, axis=-1)))


def kernel_subspace_residual(ctx: KernelContext, points: np.ndarray) -> float:
    """Largest coefficient of K_j outside the span of M."""
    S = ctx.subspace
    values = bm_components(ctx, points)
    projector = np.linalg.pinv(S.basis_vectors) @ S.basis_vectors
    return float(np.max(np.abs(values - values @ projector)))
