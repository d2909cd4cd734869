"""The inhomogeneous Dirac system dbar_j f = g_j (n >= 2) and the Hartogs extension built on it."""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.models.DomainModel import DomainSpec, NodeBatch
from app.models.FieldFunctionModel import DiracMethod, FieldFunction, Smoothness
from app.models.IntegralModel import CompatibilityReport, HartogsReport
from app.models.KernelContextModel import KernelContext
from app.models.QuadratureConfigModel import QuadratureConfig, RuleSpec
from app.services.AlgebraCoreService import mul
from app.services.FunctionsService import conj_dirac_apply, dirac_apply, laplacian_apply, pointwise
from app.services.KernelService import cauchy_kernel_values
from app.services.QuadratureService import integrate_batches, volume_nodes_around
from app.utils.constants import CUTOFF_PLATEAU, CUTOFF_SUPPORT, HARTOGS_PANELS, HARTOGS_Q, SUPPORT_INFLATION
from app.utils.exceptions import ConfigurationError, DimensionMismatchError, DomainError
from app.utils.finite_difference import partial_derivatives

logger = logging.getLogger(__name__)


def _check_system(ctx: KernelContext, g: Sequence[FieldFunction]) -> None:
    if ctx.n < 2:
        raise ConfigurationError(f"The inhomogeneous system needs n >= 2, context has n = {ctx.n}")
    if len(g) != ctx.n:
        raise DimensionMismatchError(f"Expected {ctx.n} right-hand sides, got {len(g)}")


def _support_box(functions: Sequence[FieldFunction]) -> Tuple[np.ndarray, np.ndarray]:
    """Bounding box of the union of the supports."""
    for func in functions:
        if func.support is None:
            raise ConfigurationError(f"{func.label} lacks compact-support metadata")
    lo = np.min([np.asarray(func.support[0], dtype=float) for func in functions], axis=0)
    hi = np.max([np.asarray(func.support[1], dtype=float) for func in functions], axis=0)
    return lo, hi


def _first_variable_integral(ctx: KernelContext, Q: QuadratureConfig, support: Tuple[np.ndarray, np.ndarray],
                             x: np.ndarray, density) -> np.ndarray:
    """int_M E(z - x_1) density(z, x^0) dz over the first-variable projection of ``support``.

    ``density`` maps full coordinates ``(B, D)`` to ``(B, dim)``; the kernel
    product is applied as E (density).
    """
    S = ctx.subspace
    A = S.algebra
    b = S.block
    lo, hi = support
    x1, x0 = x[:b], x[b:]
    if np.any(x0 < lo[b:]) or np.any(x0 > hi[b:]):
        return np.zeros(A.dim)
    box = DomainSpec.box(lo[:b], hi[:b]).inflate(1.0 + SUPPORT_INFLATION)

    def integrand(batch: NodeBatch) -> np.ndarray:
        coords = np.concatenate([batch.points, np.broadcast_to(x0, (len(batch), x0.size))], axis=-1)
        return mul(A, cauchy_kernel_values(ctx, batch.points - x1), density(coords))

    return integrate_batches(volume_nodes_around(box, Q, x1), integrand, Q.threads,
                             Q.volume.rule == "monte_carlo").value


def solve_inhomogeneous(ctx: KernelContext, g: Sequence[FieldFunction], x,
                        Q: Optional[QuadratureConfig] = None) -> np.ndarray:
    """f(x) = -int_M E(y_1) g_1(y_1 + x_1, x^0) dy_1.

    Vanishes when x^0 lies outside the projection of supp g_1.
    """
    _check_system(ctx, g)
    x = np.asarray(x, dtype=float)
    if x.shape != (ctx.D,):
        raise DimensionMismatchError(f"Point has shape {x.shape}, expected ({ctx.D},)")
    Q = Q or QuadratureConfig()
    return -_first_variable_integral(ctx, Q, _support_box([g[0]]), x, g[0].eval)


def inhomogeneous_solution(ctx: KernelContext, g: Sequence[FieldFunction],
                           Q: Optional[QuadratureConfig] = None) -> FieldFunction:
    _check_system(ctx, g)
    _support_box([g[0]])
    evaluate = pointwise(lambda point: solve_inhomogeneous(ctx, g, point, Q), ctx.algebra.dim)
    return FieldFunction(eval=evaluate, label="dbar^-1(g)", n=ctx.n, smoothness=Smoothness.C_INFINITY)


def check_compatibility(ctx: KernelContext, g: Sequence[FieldFunction], points, h: Optional[float] = None,
                        integral: bool = False, Q: Optional[QuadratureConfig] = None) -> CompatibilityReport:
    """max over (i, j, points) of |dbar_i (d_j g_j) - Delta_j g_i| by nested finite differences."""
    _check_system(ctx, g)
    S = ctx.subspace
    points = np.atleast_2d(np.asarray(points, dtype=float))
    worst, worst_pair = 0.0, None
    for j in range(1, ctx.n + 1):
        inner = FieldFunction(eval=lambda y, j=j: conj_dirac_apply(S, g[j - 1], j, y, h=h).value,
                              label=f"d{j}(g{j})", n=ctx.n)
        for i in range(1, ctx.n + 1):
            lhs = dirac_apply(S, inner, i, points, h=h, method=DiracMethod.FD).value
            rhs = laplacian_apply(S, g[i - 1], j, points, h=h).value
            residual = float(np.max(np.linalg.norm(lhs - rhs, axis=-1)))
            if worst_pair is None or residual > worst:
                worst, worst_pair = residual, [i, j]
    report = CompatibilityReport(residual=worst, worst_pair=worst_pair, samples=points.shape[0])
    if integral:
        report.integral_residual = integral_compatibility_residual(ctx, g, points, Q)
    logger.info(f"Compatibility residual {worst:.3e} (worst pair {worst_pair})")
    return report


def _partial(func: FieldFunction, coords: np.ndarray, index: int) -> np.ndarray:
    if func.gradient is not None:
        return func.gradient(coords)[..., index, :]
    partials, _ = partial_derivatives(func.eval, coords, [index])
    return partials[..., 0, :]


def integral_compatibility_residual(ctx: KernelContext, g: Sequence[FieldFunction], points,
                                    Q: Optional[QuadratureConfig] = None) -> float:
    """max |int_M sum_s v_s (E(y_1)(d_{1,s} g_j - d_{j,s} g_1)(y_1 + x_1, x^0)) dy_1| over j >= 2."""
    _check_system(ctx, g)
    S = ctx.subspace
    A = S.algebra
    b = S.block
    Q = Q or QuadratureConfig()
    points = np.atleast_2d(np.asarray(points, dtype=float))
    worst = 0.0
    for j in range(2, ctx.n + 1):
        support = _support_box([g[0], g[j - 1]])
        for x in points:
            x1 = x[:b]
            total = np.zeros(A.dim)
            for s in range(b):
                def density(coords, s=s):
                    return _partial(g[j - 1], coords, s) - _partial(g[0], coords, (j - 1) * b + s)
                total = total + mul(A, S.basis_vectors[s], _first_variable_integral(ctx, Q, support, x, density))
            worst = max(worst, float(np.linalg.norm(total)))
    return worst


# ---------------------------------------------------------------------------
# Hartogs extension
# ---------------------------------------------------------------------------

def _psi(u: np.ndarray) -> np.ndarray:
    positive = u > 0
    return np.where(positive, np.exp(-1.0 / np.where(positive, u, 1.0)), 0.0)


def _dpsi(u: np.ndarray) -> np.ndarray:
    positive = u > 0
    safe = np.where(positive, u, 1.0)
    return np.where(positive, np.exp(-1.0 / safe) / safe ** 2, 0.0)


def smooth_step(u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """C-infinity step rising from 0 at u <= 0 to 1 at u >= 1, with its derivative."""
    u = np.asarray(u, dtype=float)
    left, right = _psi(u), _psi(1.0 - u)
    total = left + right
    value = left / total
    derivative = (_dpsi(u) * right + left * _dpsi(1.0 - u)) / total ** 2
    return value, derivative


def plateau(u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """1 for |u| <= CUTOFF_PLATEAU, 0 for |u| >= CUTOFF_SUPPORT."""
    u = np.asarray(u, dtype=float)
    width = CUTOFF_SUPPORT - CUTOFF_PLATEAU
    value, slope = smooth_step((CUTOFF_SUPPORT - np.abs(u)) / width)
    return value, -np.sign(u) * slope / width


def cutoff(K: DomainSpec, x) -> Tuple[np.ndarray, np.ndarray]:
    """Real cutoff equal to 1 near K and supported in K inflated by CUTOFF_SUPPORT.

    Returns values ``(...)`` and gradients ``(..., D)``.
    """
    x = K.check_point(x)
    if K.kind == "box":
        u = (x - K.middle) / K.half_widths
        values, slopes = plateau(u)
        total = np.prod(values, axis=-1)
        gradient = np.empty(x.shape)
        for i in range(K.ambient_dim):
            others = np.prod(np.delete(values, i, axis=-1), axis=-1)
            gradient[..., i] = slopes[..., i] / K.half_widths[i] * others
        return total, gradient
    offset = x - K.center
    r = np.linalg.norm(offset, axis=-1)
    value, slope = plateau(r / K.radius)
    direction = offset / np.where(r > 0, r, 1.0)[..., None]
    return value, (slope / K.radius)[..., None] * direction


def _cutoff_support(K: DomainSpec) -> DomainSpec:
    return K.inflate(CUTOFF_SUPPORT)


def hartogs_quadrature(seed: int = 42, threads: int = 1) -> QuadratureConfig:
    return QuadratureConfig(volume=RuleSpec(q=HARTOGS_Q, panels=HARTOGS_PANELS), seed=seed, threads=threads)


def hartogs_data(ctx: KernelContext, K: DomainSpec, f: FieldFunction) -> List[FieldFunction]:
    """h_j = dbar_j((1 - phi) f) = -sum_s d_{j,s} phi (v_s f), supported where grad phi is non-zero."""
    S = ctx.subspace
    A = S.algebra
    b = S.block
    support = _cutoff_support(K)
    lo, hi = (support.lo, support.hi) if support.kind == "box" else (support.center - support.radius,
                                                                      support.center + support.radius)
    data = []
    for j in range(1, ctx.n + 1):
        def evaluate(y, j=j):
            y = np.asarray(y, dtype=float)
            _, gradient = cutoff(K, y)
            partials = gradient[..., (j - 1) * b:j * b]
            out = np.zeros(y.shape[:-1] + (A.dim,))
            active = np.any(partials != 0.0, axis=-1)
            if np.any(active):
                fvals = f(y[active])
                total = np.zeros(fvals.shape)
                for s in range(b):
                    total = total - partials[active][..., s, None] * mul(A, S.basis_vectors[s], fvals)
                out[active] = total
            return out
        data.append(FieldFunction(eval=evaluate, label=f"h{j}", n=ctx.n, smoothness=Smoothness.C_INFINITY,
                                  support=(lo, hi)))
    return data


def hartogs_extend(ctx: KernelContext, Omega: DomainSpec, K: DomainSpec, f: FieldFunction,
                   Q: Optional[QuadratureConfig] = None) -> FieldFunction:
    """Monogenic extension across K of f, monogenic on Omega minus K: (1 - phi) f - g with dbar_j g = h_j."""
    if ctx.n < 2:
        raise ConfigurationError(f"Hartogs extension needs n >= 2, context has n = {ctx.n}")
    if Omega.ambient_dim != ctx.D or K.ambient_dim != ctx.D:
        raise DimensionMismatchError(f"Domains must live in R^{ctx.D}")
    if not Omega.contains_domain(K, strict=True):
        raise DomainError("K must lie strictly inside Omega")
    if not Omega.contains_domain(_cutoff_support(K), strict=True):
        raise DomainError(f"Cutoff support (K inflated by {CUTOFF_SUPPORT}) escapes Omega")
    Q = Q or hartogs_quadrature()
    A = ctx.algebra
    g = inhomogeneous_solution(ctx, hartogs_data(ctx, K, f), Q)

    def evaluate(y):
        y = np.asarray(y, dtype=float)
        phi, _ = cutoff(K, y)
        out = -g(y)
        outside = phi < 1.0
        if np.any(outside):
            out[outside] = out[outside] + (1.0 - phi[outside])[..., None] * f(y[outside])
        return out

    return FieldFunction(eval=evaluate, label=f"hartogs({f.label})", n=ctx.n, smoothness=Smoothness.C_INFINITY)


def hartogs_sample_points(Omega: DomainSpec, K: DomainSpec, count: int = 10,
                          seed: int = 42) -> Tuple[np.ndarray, np.ndarray]:
    """``count`` points inside K and ``count`` points in Omega minus K, away from both boundaries."""
    rng = np.random.default_rng(seed)
    shrunk_K = K.inflate(0.9)
    shrunk_Omega = Omega.inflate(0.9)

    def draw(domain: DomainSpec, accept) -> np.ndarray:
        chosen = []
        lo = domain.middle - domain.half_widths
        while len(chosen) < count:
            candidates = lo + 2.0 * domain.half_widths * rng.random((4 * count, domain.ambient_dim))
            chosen.extend(point for point in candidates if domain.contains(point) and accept(point))
        return np.array(chosen[:count])

    inside = draw(shrunk_K, lambda point: True)
    outside = draw(shrunk_Omega, lambda point: not K.inflate(1.05).contains(point))
    return inside, outside


def hartogs_report(ctx: KernelContext, Omega: DomainSpec, K: DomainSpec, f: FieldFunction,
                   reference: Optional[FieldFunction] = None, count: int = 10, seed: int = 42,
                   Q: Optional[QuadratureConfig] = None, h: Optional[float] = None) -> HartogsReport:
    """Compare the extension with ``reference`` (default f) and measure its monogenicity."""
    extension = hartogs_extend(ctx, Omega, K, f, Q)
    reference = reference or f
    inside, outside = hartogs_sample_points(Omega, K, count, seed)
    inside_error = float(np.max(np.linalg.norm(extension(inside) - reference(inside), axis=-1)))
    outside_error = float(np.max(np.linalg.norm(extension(outside) - reference(outside), axis=-1)))
    samples = np.concatenate([inside, outside])
    residual = 0.0
    for j in range(1, ctx.n + 1):
        dbar = dirac_apply(ctx.subspace, extension, j, samples, h=h, method=DiracMethod.FD).value
        residual = max(residual, float(np.max(np.linalg.norm(dbar, axis=-1))))
    report = HartogsReport(inside_error=inside_error, outside_error=outside_error, monogenic_residual=residual,
                           points_inside=inside.shape[0], points_outside=outside.shape[0])
    logger.info(f"Hartogs extension: inside {inside_error:.3e}, outside {outside_error:.3e}, "
                f"dbar {residual:.3e}")
    return report
