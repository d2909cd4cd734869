"""Bochner-Martinelli integrals, boundary limits and volume potentials.

Every product inside an integrand keeps its stated parenthesization
(K_j (nu_j f), K_j (dbar_j f), E (f)); nothing is re-associated, so the
results stay valid in non-associative algebras.
"""
import logging
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import null_space

from app.models.DomainModel import DomainSpec, IntegrationResult, NodeBatch
from app.models.FieldFunctionModel import DiracMethod, FieldFunction
from app.models.IntegralModel import ApproachSpec, Extrapolation, ExtrapolationResult, FarFieldResult, JumpResult, PVConfig
from app.models.KernelContextModel import KernelContext
from app.models.QuadratureConfigModel import QuadratureConfig
from app.models.SubspaceModel import MultiPoint
from app.services.AlgebraCoreService import associator, mul
from app.services.FunctionsService import combine_partials, dirac_apply, pointwise
from app.services.HypercomplexService import embed_block
from app.services.KernelService import bm_pair, cauchy_kernel_values, volume_pair
from app.services.QuadratureService import (
    boundary_nodes,
    integrate_batches,
    near_boundary_nodes,
    target_boundary_nodes,
    volume_nodes,
    volume_nodes_around,
)
from app.utils.exceptions import (
    ConfigurationError,
    DimensionMismatchError,
    DomainError,
    SingularityError,
)
from app.utils.extrapolation import extrapolate_to_zero
from app.utils.finite_difference import partial_derivatives

logger = logging.getLogger(__name__)

# smallest admissible |cos| between the approach direction and the normal
MIN_NORMAL_COSINE = 0.1


def _point(D: DomainSpec, x) -> np.ndarray:
    return D.check_point(x.coords if isinstance(x, MultiPoint) else x)


def _check_context(ctx: KernelContext, D: DomainSpec) -> None:
    if ctx.D != D.ambient_dim:
        raise DimensionMismatchError(f"Kernel context lives in R^{ctx.D}, domain in R^{D.ambient_dim}")


def _dbar_stack(ctx: KernelContext, f: FieldFunction, points: np.ndarray) -> np.ndarray:
    return np.stack([dirac_apply(ctx.subspace, f, j, points).value for j in range(1, ctx.n + 1)], axis=-2)


def _boundary_integrand(ctx: KernelContext, x: np.ndarray, f: FieldFunction):
    def integrand(batch: NodeBatch) -> np.ndarray:
        return bm_pair(ctx, x, batch.points, batch.normals, f(batch.points), np.ones(len(batch)))
    return integrand


def _combine(first: IntegrationResult, second: IntegrationResult, sign: float = 1.0) -> IntegrationResult:
    return IntegrationResult(value=first.value + sign * second.value,
                             std_error=np.sqrt(first.std_error ** 2 + second.std_error ** 2),
                             nodes=first.nodes + second.nodes)


# ---------------------------------------------------------------------------
# Bochner-Martinelli integral and Cauchy-Pompeiu representation
# ---------------------------------------------------------------------------

def bm_integral(ctx: KernelContext, D: DomainSpec, Q: QuadratureConfig, f: FieldFunction, x,
                with_error: bool = False) -> Union[np.ndarray, IntegrationResult]:
    """C_Gamma[f](x) = int_Gamma sum_j K_j(y - x) (nu_j(y) f(y)) dS(y) for x off the boundary."""
    _check_context(ctx, D)
    x = _point(D, x)
    if D.on_boundary(x):
        raise SingularityError("Target lies on the boundary; use bm_singular_pv")
    result = integrate_batches(target_boundary_nodes(D, Q, x), _boundary_integrand(ctx, x, f), Q.threads,
                               Q.boundary.rule == "monte_carlo")
    return result if with_error else result.value


def cauchy_pompeiu(ctx: KernelContext, D: DomainSpec, Q: QuadratureConfig, f: FieldFunction, x,
                   with_error: bool = False) -> Union[np.ndarray, IntegrationResult]:
    """Boundary integral minus int_Omega sum_j K_j(y - x) (dbar_j f(y)) dV(y)."""
    _check_context(ctx, D)
    x = _point(D, x)
    boundary = bm_integral(ctx, D, Q, f, x, with_error=True)

    def integrand(batch: NodeBatch) -> np.ndarray:
        return volume_pair(ctx, x, batch.points, _dbar_stack(ctx, f, batch.points))

    volume = integrate_batches(volume_nodes_around(D, Q, x), integrand, Q.threads, Q.volume.rule == "monte_carlo")
    result = _combine(boundary, volume, sign=-1.0)
    return result if with_error else result.value


# ---------------------------------------------------------------------------
# Boundary points
# ---------------------------------------------------------------------------

def solid_angle(D: DomainSpec, x, method: str = "analytic", samples: int = 20000, seed: int = 42,
                with_error: bool = False) -> Union[float, Tuple[float, float]]:
    """Fraction of small spheres about a boundary point that lies inside the domain."""
    x = _point(D, x)
    if not D.on_boundary(x):
        raise DomainError("Solid angle is defined for boundary points only")
    if method == "analytic":
        value = 0.5 if D.kind == "ball" else 2.0 ** -D.active_constraints(x)
        return (value, 0.0) if with_error else value
    if method not in ("mc", "monte_carlo"):
        raise ConfigurationError(f"Unknown solid angle method '{method}', expected analytic or mc")

    rng = np.random.default_rng(seed)
    scale = float(np.min(D.half_widths))
    # curvature bias of a ball boundary is O(radius)
    radius = 1e-3 * scale
    directions = rng.standard_normal((samples, D.ambient_dim))
    directions /= np.linalg.norm(directions, axis=-1, keepdims=True)
    inside = D.signed_distance(x + radius * directions) <= 0
    estimate = float(np.mean(inside))
    error = float(np.sqrt(max(estimate * (1.0 - estimate), 1e-300) / samples))
    logger.debug(f"Solid angle estimate {estimate:.5f} +/- {error:.5f} at radius {radius:.2e}")
    return (estimate, error) if with_error else estimate


def bm_singular_pv(ctx: KernelContext, D: DomainSpec, Q: QuadratureConfig, pv: Optional[PVConfig],
                   f: FieldFunction, x) -> ExtrapolationResult:
    """Principal value of C_Gamma[f] at a boundary point: exclude B(x, eps) and let eps -> 0."""
    _check_context(ctx, D)
    pv = pv or PVConfig(epsilons=list(Q.pv_epsilons))
    x = D.snap_to_boundary(_point(D, x))
    integrand = _boundary_integrand(ctx, x, f)
    values, worst_std = [], 0.0
    for eps in pv.epsilons:
        result = integrate_batches(near_boundary_nodes(D, Q, x, exclusion=eps), integrand, Q.threads,
                                   Q.boundary.rule == "monte_carlo")
        values.append(result.value)
        worst_std = max(worst_std, float(np.max(result.std_error)))
        logger.debug(f"PV rung eps={eps}: {np.round(result.value, 12).tolist()}")
    limit = extrapolate_to_zero(pv.epsilons, values, pv.extrapolation == Extrapolation.RICHARDSON)
    limit.est_error = max(limit.est_error, 3.0 * worst_std)
    return limit


def approach_direction(D: DomainSpec, x: np.ndarray, approach: ApproachSpec) -> np.ndarray:
    """Unit vector pointing into the domain from the boundary point ``x``."""
    normal = None
    if D.kind == "ball" or D.active_constraints(x) == 1:
        normal = D.outward_normal(x)
    if approach.direction is not None:
        direction = np.asarray(approach.direction, dtype=float)
        if direction.shape != (D.ambient_dim,) or np.linalg.norm(direction) == 0:
            raise DimensionMismatchError(f"Approach direction needs {D.ambient_dim} non-zero coordinates")
        direction = direction / np.linalg.norm(direction)
    elif normal is None:
        raise DomainError("Normal is undefined at box edges and corners; pass an explicit approach direction")
    else:
        direction = -normal
    if approach.oblique_degrees > 0.0:
        tangent = null_space(direction[None, :])[:, 0]
        angle = np.deg2rad(approach.oblique_degrees)
        direction = np.cos(angle) * direction + np.sin(angle) * tangent
    if normal is not None and abs(float(direction @ normal)) < MIN_NORMAL_COSINE:
        raise DomainError("Approach direction is tangential to the boundary")
    return direction


def plemelj_limits(ctx: KernelContext, D: DomainSpec, Q: QuadratureConfig, pv: Optional[PVConfig], f: FieldFunction,
                   x, approach: Optional[ApproachSpec] = None) -> JumpResult:
    """Interior and exterior boundary limits of C_Gamma[f] next to its principal value."""
    _check_context(ctx, D)
    approach = approach or ApproachSpec()
    x = D.snap_to_boundary(_point(D, x))
    direction = approach_direction(D, x, approach)
    steps = approach.steps()
    inner_points = x + steps[:, None] * direction
    outer_points = x - steps[:, None] * direction
    if not np.all(D.contains(inner_points)) or np.any(D.signed_distance(outer_points) <= 0):
        raise DomainError("Approach points cross the boundary; reduce h0 or change the direction")

    inner = [bm_integral(ctx, D, Q, f, point) for point in inner_points]
    outer = [bm_integral(ctx, D, Q, f, point) for point in outer_points]
    interior = extrapolate_to_zero(steps, inner)
    exterior = extrapolate_to_zero(steps, outer)
    boundary = bm_singular_pv(ctx, D, Q, pv, f, x)
    tau = solid_angle(D, x)
    result = JumpResult(interior_limit=interior.value, exterior_limit=exterior.value, boundary_value=boundary.value,
                        tau=tau, f_value=np.asarray(f(x), dtype=float),
                        est_error=max(interior.est_error, exterior.est_error, boundary.est_error),
                        details={"steps": steps.tolist(), "direction": direction.tolist(),
                                 "pv_epsilons": boundary.steps.tolist()})
    logger.info(f"Boundary limits at {np.round(x, 6).tolist()}: {result.residuals()}")
    return result


# ---------------------------------------------------------------------------
# Volume potential (n = 1)
# ---------------------------------------------------------------------------

def teodorescu(ctx: KernelContext, D: DomainSpec, Q: QuadratureConfig, f: FieldFunction, x,
               with_error: bool = False) -> Union[np.ndarray, IntegrationResult]:
    """T[f](x) = -int_Omega E(y - x) f(y) dV(y) for an interior point x."""
    if ctx.n != 1:
        raise ConfigurationError(f"The Teodorescu transform needs n = 1, context has n = {ctx.n}")
    _check_context(ctx, D)
    x = _point(D, x)
    if float(D.signed_distance(x)) >= 0:
        raise DomainError("The Teodorescu transform is evaluated at interior points only")
    A = ctx.algebra

    def integrand(batch: NodeBatch) -> np.ndarray:
        return -mul(A, cauchy_kernel_values(ctx, batch.points - x), f(batch.points))

    result = integrate_batches(volume_nodes_around(D, Q, x), integrand, Q.threads, Q.volume.rule == "monte_carlo")
    return result if with_error else result.value


def teodorescu_function(ctx: KernelContext, D: DomainSpec, Q: QuadratureConfig, f: FieldFunction) -> FieldFunction:
    evaluate = pointwise(lambda point: teodorescu(ctx, D, Q, f, point), ctx.algebra.dim)
    return FieldFunction(eval=evaluate, label=f"T[{f.label}]", n=1)


def teodorescu_inverse_residual(ctx: KernelContext, D: DomainSpec, Q: QuadratureConfig, f: FieldFunction,
                                points, h: Optional[float] = None) -> float:
    """max |dbar T[f] - f| over ``points``, dbar by finite differences."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    T = teodorescu_function(ctx, D, Q, f)
    dbar = dirac_apply(ctx.subspace, T, 1, points, h=h, method=DiracMethod.FD).value
    return float(np.max(np.linalg.norm(dbar - f(points), axis=-1)))


# ---------------------------------------------------------------------------
# Supporting identities
# ---------------------------------------------------------------------------

def _block_partials(ctx: KernelContext, phi: FieldFunction, j: int, points: np.ndarray) -> np.ndarray:
    S = ctx.subspace
    start = (j - 1) * S.block
    if phi.gradient is not None:
        return phi.gradient(points)[..., start:start + S.block, :]
    partials, _ = partial_derivatives(phi.eval, points, list(range(start, start + S.block)))
    return partials


def stokes_residual(ctx: KernelContext, D: DomainSpec, Q: QuadratureConfig, phi: FieldFunction, f: FieldFunction,
                    j: int) -> float:
    """Relative gap in int_Gamma phi (nu_j f) dS = int_Omega ((phi dbar_j) f + phi (dbar_j f)
    - sum_s [v_s, dbar_j phi_s, f]) dV for M-valued phi."""
    _check_context(ctx, D)
    S = ctx.subspace
    A = S.algebra
    start = (j - 1) * S.block
    to_components = np.linalg.pinv(S.basis_vectors)

    def boundary_integrand(batch: NodeBatch) -> np.ndarray:
        nu_j = embed_block(S, batch.normals[..., start:start + S.block])
        return mul(A, phi(batch.points), mul(A, nu_j, f(batch.points)))

    def volume_integrand(batch: NodeBatch) -> np.ndarray:
        partials = _block_partials(ctx, phi, j, batch.points)
        fvals = f(batch.points)
        right = combine_partials(S, partials, right=True)
        total = mul(A, right, fvals) + mul(A, phi(batch.points), dirac_apply(S, f, j, batch.points).value)
        # dbar_j phi_s = sum_t v_t d_t phi_s
        dbar_components = np.einsum('...ts,td->...sd', partials @ to_components, S.basis_vectors)
        for s in range(1, S.block):
            total = total - associator(A, S.basis_vectors[s], dbar_components[..., s, :], fvals)
        return total

    monte_carlo = Q.boundary.rule == "monte_carlo"
    lhs = integrate_batches(boundary_nodes(D, Q), boundary_integrand, Q.threads, monte_carlo).value
    rhs = integrate_batches(volume_nodes(D, Q), volume_integrand, Q.threads, Q.volume.rule == "monte_carlo").value
    return float(np.linalg.norm(lhs - rhs) / max(1.0, float(np.linalg.norm(lhs))))


def far_field_decay(ctx: KernelContext, D: DomainSpec, Q: QuadratureConfig, f: FieldFunction,
                    direction: Optional[Sequence[float]] = None,
                    radii: Sequence[float] = (8.0, 16.0, 32.0)) -> FarFieldResult:
    """Fit |C_Gamma[f](c + r d)| ~ r^p; the expected exponent is 1 - D."""
    _check_context(ctx, D)
    d = np.zeros(D.ambient_dim) if direction is None else np.asarray(direction, dtype=float)
    if direction is None:
        d[0] = 1.0
    d = d / np.linalg.norm(d)
    radii = np.asarray(radii, dtype=float)
    magnitudes = np.array([np.linalg.norm(bm_integral(ctx, D, Q, f, D.middle + r * d)) for r in radii])
    if np.any(magnitudes <= 1e-300):
        logger.warning("⚠️ Bochner-Martinelli integral vanishes in the far field; no decay exponent")
        exponent = float("nan")
    else:
        exponent = float(np.polyfit(np.log(radii), np.log(magnitudes), 1)[0])
    return FarFieldResult(radii=radii, magnitudes=magnitudes, exponent=exponent, expected=float(1 - D.ambient_dim))
