"""Theorem procedures of the verification harness.

Each procedure maps a case setup and one quadrature rung to an
:class:`Outcome` whose residual is zero when the identity holds exactly.
"""
import logging
from typing import Callable, Dict, Tuple

import numpy as np

from app.models.DomainModel import DomainSpec
from app.models.FieldFunctionModel import FieldFunction
from app.models.IntegralModel import PVConfig
from app.models.KernelContextModel import KernelContext
from app.models.QuadratureConfigModel import QuadratureConfig
from app.models.SubspaceModel import SubspaceSpec
from app.models.VerificationModel import CaseSetup, Outcome, Theorem
from app.services.AlgebraCoreService import (
    algebra_law_residuals,
    build_algebra,
    mul,
    norm_bound_constant,
    validate_algebra,
)
from app.services.FunctionsService import dirac_image, function_from_spec
from app.services.HypercomplexService import subspace_preset
from app.services.InhomogeneousService import (
    check_compatibility,
    hartogs_report,
    solve_inhomogeneous,
)
from app.services.IntegralFormulaService import (
    bm_integral,
    bm_singular_pv,
    cauchy_pompeiu,
    plemelj_limits,
    solid_angle,
    teodorescu_inverse_residual,
)
from app.services.KernelService import (
    associator_lemma_residual,
    build_kernel_context,
    divergence_fd_residual,
    divergence_residual,
    gradient_relation_residual,
    harmonic_residual,
    right_divergence_residual,
)
from app.services.QuadratureService import integrate_boundary, integrate_volume
from app.utils.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

Procedure = Callable[[CaseSetup, QuadratureConfig], Outcome]


def prepare(setup: CaseSetup) -> Tuple[SubspaceSpec, KernelContext, DomainSpec]:
    S = subspace_preset(setup.subspace)
    ctx = build_kernel_context(S, setup.n)
    D = DomainSpec.from_dict(setup.domain, ctx.D)
    if D.ambient_dim != ctx.D:
        raise ConfigurationError(f"Domain lives in R^{D.ambient_dim} but (m+1)n = {ctx.D}")
    return S, ctx, D


def _pattern(D: DomainSpec) -> np.ndarray:
    pattern = np.cos(np.arange(1, D.ambient_dim + 1))
    return pattern / np.max(np.abs(pattern))


def interior_point(D: DomainSpec) -> np.ndarray:
    if D.kind == "box":
        return D.middle + 0.3 * D.half_widths * _pattern(D)
    return D.center + 0.3 * D.radius * _pattern(D) / np.linalg.norm(_pattern(D))


def exterior_point(D: DomainSpec) -> np.ndarray:
    point = interior_point(D)
    point[0] = D.middle[0] + 1.6 * D.half_widths[0]
    return point


def boundary_point(D: DomainSpec) -> np.ndarray:
    point = D.middle.copy()
    point[0] = point[0] + D.half_widths[0]
    return point


def _point(setup: CaseSetup, default: np.ndarray) -> np.ndarray:
    return default if setup.point is None else np.asarray(setup.point, dtype=float)


def _function(S: SubspaceSpec, setup: CaseSetup) -> FieldFunction:
    return function_from_spec(S, setup.n, setup.function)


def shell_points(D: int, count: int, seed: int) -> np.ndarray:
    """Random points with |x| in [1, 2]."""
    rng = np.random.default_rng(seed)
    directions = rng.standard_normal((count, D))
    directions /= np.linalg.norm(directions, axis=-1, keepdims=True)
    return directions * rng.uniform(1.0, 2.0, size=(count, 1))


# ---------------------------------------------------------------------------
# Kernel identities
# ---------------------------------------------------------------------------

def kernel_divergence(setup: CaseSetup, Q: QuadratureConfig) -> Outcome:
    S, ctx, _ = prepare(setup)
    points = shell_points(ctx.D, setup.samples, Q.seed)
    if setup.variant == "fd":
        return Outcome(residual=divergence_fd_residual(ctx, points))
    if setup.variant == "right":
        return Outcome(residual=right_divergence_residual(ctx, points))
    if setup.variant == "associator":
        a = np.random.default_rng(Q.seed + 7).standard_normal(S.algebra.dim)
        residual = max(associator_lemma_residual(ctx, j, points, a) for j in range(1, ctx.n + 1))
        return Outcome(residual=residual)
    return Outcome(residual=divergence_residual(ctx, points))


def kernel_harmonic(setup: CaseSetup, Q: QuadratureConfig) -> Outcome:
    _, ctx, _ = prepare(setup)
    return Outcome(residual=harmonic_residual(ctx, shell_points(ctx.D, setup.samples, Q.seed)))


def kernel_gradient_relation(setup: CaseSetup, Q: QuadratureConfig) -> Outcome:
    _, ctx, _ = prepare(setup)
    return Outcome(residual=gradient_relation_residual(ctx, shell_points(ctx.D, setup.samples, Q.seed)))


# ---------------------------------------------------------------------------
# Boundary and volume integrals
# ---------------------------------------------------------------------------

def bm_reproduce(setup: CaseSetup, Q: QuadratureConfig) -> Outcome:
    S, ctx, D = prepare(setup)
    f = _function(S, setup)
    x = _point(setup, interior_point(D))
    result = bm_integral(ctx, D, Q, f, x, with_error=True)
    return Outcome(residual=float(np.linalg.norm(result.value - f(x))),
                   std_error=float(np.linalg.norm(result.std_error)), detail={"nodes": result.nodes})


def bm_exterior(setup: CaseSetup, Q: QuadratureConfig) -> Outcome:
    S, ctx, D = prepare(setup)
    f = _function(S, setup)
    result = bm_integral(ctx, D, Q, f, _point(setup, exterior_point(D)), with_error=True)
    return Outcome(residual=float(np.linalg.norm(result.value)), std_error=float(np.linalg.norm(result.std_error)),
                   detail={"nodes": result.nodes})


def cauchy_pompeiu_case(setup: CaseSetup, Q: QuadratureConfig) -> Outcome:
    S, ctx, D = prepare(setup)
    f = _function(S, setup)
    x = _point(setup, interior_point(D))
    result = cauchy_pompeiu(ctx, D, Q, f, x, with_error=True)
    expected = f(x) if D.contains(x) else np.zeros(S.algebra.dim)
    return Outcome(residual=float(np.linalg.norm(result.value - expected)),
                   std_error=float(np.linalg.norm(result.std_error)), detail={"nodes": result.nodes})


def _pv_config(setup: CaseSetup, Q: QuadratureConfig) -> PVConfig:
    return PVConfig(epsilons=setup.pv_epsilons or list(Q.pv_epsilons))


def pv_constant(setup: CaseSetup, Q: QuadratureConfig) -> Outcome:
    S, ctx, D = prepare(setup)
    f = _function(S, setup)
    x = _point(setup, boundary_point(D))
    limit = bm_singular_pv(ctx, D, Q, _pv_config(setup, Q), f, x)
    tau = solid_angle(D, x)
    residual = float(np.linalg.norm(limit.value - tau * f(x)))
    return Outcome(residual=residual, detail={"tau": tau, "extrapolation_error": limit.est_error,
                                              "rate": limit.rate})


def plemelj_jump(setup: CaseSetup, Q: QuadratureConfig) -> Outcome:
    S, ctx, D = prepare(setup)
    f = _function(S, setup)
    jump = plemelj_limits(ctx, D, Q, _pv_config(setup, Q), f, _point(setup, boundary_point(D)), setup.approach)
    residuals = jump.residuals()
    return Outcome(residual=max(residuals.values()), detail={**residuals, "tau": jump.tau,
                                                            "extrapolation_error": jump.est_error})


def teodorescu_inverse(setup: CaseSetup, Q: QuadratureConfig) -> Outcome:
    S, ctx, D = prepare(setup)
    f = _function(S, setup)
    offsets = np.array(np.meshgrid(*[[-0.5, 0.0, 0.5]] * ctx.D, indexing="ij")).reshape(ctx.D, -1).T
    grid = D.middle + offsets * D.half_widths
    if D.kind == "ball":
        grid = D.center + offsets * D.radius / np.sqrt(ctx.D)
    grid = grid[:setup.samples]
    return Outcome(residual=teodorescu_inverse_residual(ctx, D, Q, f, grid), detail={"points": int(grid.shape[0])})


def integral_laws(setup: CaseSetup, Q: QuadratureConfig) -> Outcome:
    """Left-multiplication law, triangle inequality, additivity and boundary area."""
    S, ctx, D = prepare(setup)
    A = S.algebra
    f = _function(S, setup)
    a = np.random.default_rng(Q.seed).standard_normal(A.dim)

    plain = integrate_volume(D, Q, lambda batch: f(batch.points))
    scaled = integrate_volume(D, Q, lambda batch: mul(A, a, f(batch.points)))
    left_law = float(np.linalg.norm(scaled - mul(A, a, plain)))
    absolute = integrate_volume(D, Q, lambda batch: np.linalg.norm(f(batch.points), axis=-1))
    triangle = max(0.0, float(np.linalg.norm(plain) - absolute[0]))

    area = integrate_boundary(D, Q, lambda batch: np.ones(len(batch)))[0]
    area_gap = abs(area - D.boundary_area()) / D.boundary_area()

    additivity = 0.0
    if D.kind == "box":
        cut = D.middle[0]
        left_hi, right_lo = D.hi.copy(), D.lo.copy()
        left_hi[0], right_lo[0] = cut, cut
        pieces = [DomainSpec.box(D.lo, left_hi), DomainSpec.box(right_lo, D.hi)]
        total = sum(integrate_volume(piece, Q, lambda batch: f(batch.points)) for piece in pieces)
        additivity = float(np.linalg.norm(total - plain))
    detail = {"left_multiplication": left_law, "triangle": triangle, "boundary_area": area_gap,
              "additivity": additivity}
    return Outcome(residual=max(detail.values()), detail=detail)


# ---------------------------------------------------------------------------
# Inhomogeneous system and Hartogs extension
# ---------------------------------------------------------------------------

def _bump_system(S: SubspaceSpec, setup: CaseSetup):
    F = _function(S, setup)
    if F.support is None:
        raise ConfigurationError("The inhomogeneous system needs a compactly supported function such as bump")
    return F, [dirac_image(S, F, j) for j in range(1, setup.n + 1)]


def inhomogeneous_solve(setup: CaseSetup, Q: QuadratureConfig) -> Outcome:
    S, ctx, _ = prepare(setup)
    F, g = _bump_system(S, setup)
    lo, hi = F.support
    center, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    rng = np.random.default_rng(Q.seed)
    inside = center + 0.6 * half * rng.uniform(-1.0, 1.0, size=(setup.samples, ctx.D))
    inside_error = max(float(np.linalg.norm(solve_inhomogeneous(ctx, g, x, Q) - F(x))) for x in inside)
    # x^0 beyond the support projection
    outside = inside[: max(1, setup.samples // 4)].copy()
    outside[:, S.block:] = hi[S.block:] + 0.5 * half[S.block:]
    outside_value = max(float(np.linalg.norm(solve_inhomogeneous(ctx, g, x, Q))) for x in outside)
    return Outcome(residual=max(inside_error, outside_value),
                   detail={"inside_error": inside_error, "outside_value": outside_value})


def compatibility(setup: CaseSetup, Q: QuadratureConfig) -> Outcome:
    S, ctx, _ = prepare(setup)
    F, g = _bump_system(S, setup)
    lo, hi = F.support
    rng = np.random.default_rng(Q.seed)
    points = lo + (hi - lo) * rng.uniform(0.2, 0.8, size=(setup.samples, ctx.D))
    report = check_compatibility(ctx, g, points, integral=setup.variant == "integral", Q=Q)
    residual = report.residual if report.integral_residual is None else max(report.residual,
                                                                            report.integral_residual)
    return Outcome(residual=residual, detail=report.to_dict())


def hartogs(setup: CaseSetup, Q: QuadratureConfig) -> Outcome:
    S, ctx, Omega = prepare(setup)
    K = DomainSpec.from_dict(setup.compact_set or {"kind": "box", "half": 0.3}, ctx.D)
    f = _function(S, setup)
    report = hartogs_report(ctx, Omega, K, f, count=setup.samples, seed=Q.seed, Q=Q)
    return Outcome(residual=report.worst, detail=report.to_dict())


# ---------------------------------------------------------------------------
# Algebra
# ---------------------------------------------------------------------------

def algebra_laws(setup: CaseSetup, Q: QuadratureConfig) -> Outcome:
    A = build_algebra(setup.algebra) if setup.algebra else subspace_preset(setup.subspace).algebra
    report = validate_algebra(A)
    if not report.is_valid:
        return Outcome(residual=float("inf"), detail={"errors": report.errors})
    laws = algebra_law_residuals(A, samples=setup.samples, seed=Q.seed)
    return Outcome(residual=max(laws.values()), detail=laws)


def norm_bound(setup: CaseSetup, Q: QuadratureConfig) -> Outcome:
    S = subspace_preset(setup.subspace)
    A = S.algebra
    estimate, used = norm_bound_constant(A, S, samples=setup.samples, seed=Q.seed)
    if setup.variant == "multiplicative":
        return Outcome(residual=abs(estimate - 1.0), detail={"estimate": estimate, "samples": used})
    rng = np.random.default_rng(Q.seed + 1)
    x = rng.standard_normal((setup.samples, S.block)) @ S.basis_vectors
    y = rng.standard_normal((setup.samples, A.dim))
    ratio = np.linalg.norm(mul(A, x, y), axis=-1) / (np.linalg.norm(x, axis=-1) * np.linalg.norm(y, axis=-1))
    return Outcome(residual=max(0.0, float(np.max(ratio)) - estimate),
                   detail={"estimate": estimate, "samples": used})


PROCEDURES: Dict[Theorem, Procedure] = {
    Theorem.BM_REPRODUCE: bm_reproduce,
    Theorem.BM_EXTERIOR: bm_exterior,
    Theorem.CAUCHY_POMPEIU: cauchy_pompeiu_case,
    Theorem.KERNEL_DIVERGENCE: kernel_divergence,
    Theorem.KERNEL_HARMONIC: kernel_harmonic,
    Theorem.KERNEL_GRADIENT_RELATION: kernel_gradient_relation,
    Theorem.PV_CONSTANT: pv_constant,
    Theorem.PLEMELJ_JUMP: plemelj_jump,
    Theorem.TEODORESCU_INVERSE: teodorescu_inverse,
    Theorem.INHOMOGENEOUS_SOLVE: inhomogeneous_solve,
    Theorem.COMPATIBILITY: compatibility,
    Theorem.HARTOGS: hartogs,
    Theorem.ALGEBRA_LAWS: algebra_laws,
    Theorem.INTEGRAL_LAWS: integral_laws,
    Theorem.NORM_BOUND: norm_bound,
}
