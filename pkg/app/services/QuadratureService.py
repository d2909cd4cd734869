"""Boundary and volume node streams for boxes and balls, and their reductions.

Regular rules follow the usual layout: one Gauss-Legendre tensor grid per box
face, hyperspherical tensor rules on balls up to D = 4 and Monte Carlo
otherwise. Targets on or near the boundary get a singularity-adapted stream
(polar pyramids about the target on box faces, pole-aligned angles on spheres),
and volume integrals with a kernel singular at an interior point use the
star-shaped decomposition about that point so the Jacobian t^{D-1} cancels the
kernel growth.
"""
import concurrent.futures
import logging
from typing import Callable, Iterable, Iterator, Optional, Tuple

import numpy as np
from scipy.linalg import null_space

from app.models.DomainModel import DomainSpec, IntegrationResult, NodeBatch
from app.models.QuadratureConfigModel import QuadratureConfig, RuleSpec
from app.utils.constants import NODE_BATCH
from app.utils.exceptions import AlternaException, QuadratureError, SingularityError
from app.utils.gauss_rules import (
    box_faces,
    gauss_interval,
    sample_sphere,
    sphere_area,
    sphere_rule,
    tensor_grid,
    unit_interval,
)

logger = logging.getLogger(__name__)

Integrand = Callable[[NodeBatch], np.ndarray]

# radial floor of the log variable, relative to the target's distance
NEAR_FLOOR = 1e-5


def _emit(points: np.ndarray, weights: np.ndarray, normals: Optional[np.ndarray], offset: int) -> Iterator[NodeBatch]:
    for start in range(0, weights.shape[0], NODE_BATCH):
        stop = min(start + NODE_BATCH, weights.shape[0])
        yield NodeBatch(points=points[start:stop], weights=weights[start:stop],
                        normals=None if normals is None else normals[start:stop], offset=offset + start)


def _face_grid(lo: np.ndarray, hi: np.ndarray, rule: RuleSpec) -> Tuple[np.ndarray, np.ndarray]:
    return tensor_grid([gauss_interval(rule.q, a, b, rule.panels) for a, b in zip(lo, hi)])


def _lift(face_points: np.ndarray, axis: int, value: float) -> np.ndarray:
    return np.insert(face_points, axis, value, axis=-1)


def _face_allocation(areas: np.ndarray, samples: int) -> np.ndarray:
    counts = np.floor(samples * areas / np.sum(areas)).astype(int)
    counts[: samples - int(np.sum(counts))] += 1
    return np.maximum(counts, 1)


# ---------------------------------------------------------------------------
# Regular node streams
# ---------------------------------------------------------------------------

def boundary_nodes(D: DomainSpec, Q: QuadratureConfig) -> Iterator[NodeBatch]:
    rule = Q.boundary
    dim = D.ambient_dim
    offset = 0
    if D.kind == "box":
        faces = list(box_faces(D.lo, D.hi))
        areas = np.array([np.prod(np.delete(D.hi - D.lo, axis)) for axis, _, _ in faces])
        counts = _face_allocation(areas, rule.samples) if rule.rule == "monte_carlo" else None
        rng = np.random.default_rng(rule.seed)
        for index, (axis, side, value) in enumerate(faces):
            lo, hi = np.delete(D.lo, axis), np.delete(D.hi, axis)
            if rule.rule == "gauss":
                face_points, weights = _face_grid(lo, hi, rule)
            else:
                face_points = lo + (hi - lo) * rng.random((counts[index], dim - 1))
                weights = np.full(counts[index], areas[index] / counts[index])
            normals = np.zeros((weights.shape[0], dim))
            normals[:, axis] = 1.0 if side == 1 else -1.0
            yield from _emit(_lift(face_points, axis, value), weights, normals, offset)
            offset += weights.shape[0]
        return

    if rule.rule == "gauss":
        if dim > 4:
            raise QuadratureError(f"Tensor sphere rule is limited to D <= 4, got D = {dim}; use monte_carlo")
        directions, weights = sphere_rule(dim, rule.q)
    else:
        rng = np.random.default_rng(rule.seed)
        directions = sample_sphere(rng, dim, rule.samples)
        weights = np.full(rule.samples, sphere_area(dim) / rule.samples)
    yield from _emit(D.center + D.radius * directions, weights * D.radius ** (dim - 1), directions, 0)


def volume_nodes(D: DomainSpec, Q: QuadratureConfig) -> Iterator[NodeBatch]:
    rule = Q.volume
    dim = D.ambient_dim
    if D.kind == "box":
        if rule.rule == "gauss":
            points, weights = _face_grid(D.lo, D.hi, rule)
        else:
            rng = np.random.default_rng(rule.seed)
            points = D.lo + (D.hi - D.lo) * rng.random((rule.samples, dim))
            weights = np.full(rule.samples, D.volume() / rule.samples)
        yield from _emit(points, weights, None, 0)
        return

    if rule.rule == "gauss":
        if dim > 4:
            raise QuadratureError(f"Tensor ball rule is limited to D <= 4, got D = {dim}; use monte_carlo")
        directions, dir_weights = sphere_rule(dim, rule.q)
        radii, radial_weights = gauss_interval(rule.q, 0.0, D.radius, rule.panels)
        points = D.center + radii[:, None, None] * directions[None, :, :]
        weights = (radial_weights * radii ** (dim - 1))[:, None] * dir_weights[None, :]
        yield from _emit(points.reshape(-1, dim), weights.ravel(), None, 0)
    else:
        rng = np.random.default_rng(rule.seed)
        directions = sample_sphere(rng, dim, rule.samples)
        radii = D.radius * rng.random(rule.samples) ** (1.0 / dim)
        weights = np.full(rule.samples, D.volume() / rule.samples)
        yield from _emit(D.center + radii[:, None] * directions, weights, None, 0)


# ---------------------------------------------------------------------------
# Singularity-adapted streams
# ---------------------------------------------------------------------------

def _log_radial(t_lo: np.ndarray, rule: RuleSpec, radial_panel: float) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes t in [t_lo, 1] through s = log t; returns ``(t, w)`` with shape ``(U, R)``.

    The weights include dt = t ds.
    """
    span = -np.log(t_lo)
    panels = max(1, int(np.ceil(np.max(span) / radial_panel)))
    tau, w_tau = unit_interval(rule.q, panels)
    s = -span[:, None] * (1.0 - tau[None, :])
    t = np.exp(s)
    return t, span[:, None] * w_tau[None, :] * t


def _pyramid_face(face_lo: np.ndarray, face_hi: np.ndarray, apex: np.ndarray, rule: RuleSpec,
                  radial_panel: float, distance: float, exclusion: float) -> Tuple[np.ndarray, np.ndarray]:
    """Polar rule on a (k)-dimensional box face about ``apex`` (a point of the face closure).

    ``distance`` is the target's distance to ``apex``; with ``distance == 0``
    the ball of radius ``exclusion`` about the apex is cut out exactly.
    """
    k = face_lo.shape[0]
    all_points, all_weights = [], []
    for facet_axis in range(k):
        for bound in (face_lo[facet_axis], face_hi[facet_axis]):
            height = abs(apex[facet_axis] - bound)
            if height <= 1e-14 * max(1.0, float(np.max(face_hi - face_lo))):
                continue
            others_lo = np.delete(face_lo, facet_axis)
            others_hi = np.delete(face_hi, facet_axis)
            facet_points, facet_weights = _face_grid(others_lo, others_hi, rule)
            u = _lift(facet_points, facet_axis, bound)
            reach = np.linalg.norm(u - apex, axis=-1)
            if distance == 0.0:
                if exclusion <= 0.0:
                    raise SingularityError("Target lies on the boundary; a principal-value exclusion is required")
                if exclusion >= height:
                    raise QuadratureError(f"Exclusion radius {exclusion} exceeds the face geometry ({height:.3g})")
                t_lo = exclusion / reach
            else:
                t_lo = np.minimum(NEAR_FLOOR * distance / reach, 0.5)
            t, w_t = _log_radial(t_lo, rule, radial_panel)
            points = apex + t[:, :, None] * (u - apex)[:, None, :]
            weights = facet_weights[:, None] * w_t * height * t ** (k - 1)
            all_points.append(points.reshape(-1, k))
            all_weights.append(weights.ravel())
    return np.concatenate(all_points), np.concatenate(all_weights)


def _near_box_faces(D: DomainSpec, Q: QuadratureConfig, x: np.ndarray, exclusion: float) -> Iterator[NodeBatch]:
    rule = Q.boundary
    dim = D.ambient_dim
    offset = 0
    for axis, side, value in box_faces(D.lo, D.hi):
        lo, hi = np.delete(D.lo, axis), np.delete(D.hi, axis)
        inside = np.delete(x, axis)
        apex = np.clip(inside, lo, hi)
        distance = float(np.hypot(abs(x[axis] - value), np.linalg.norm(inside - apex)))
        half = 0.5 * float(np.min(hi - lo))
        if distance == 0.0 or distance < Q.near_ratio * half:
            if exclusion > 0.0 and 0.0 < distance < exclusion:
                raise QuadratureError(
                    f"Exclusion radius {exclusion} reaches a face not containing the target (distance {distance:.3g})")
            face_points, weights = _pyramid_face(lo, hi, apex, rule, Q.radial_panel, distance, exclusion)
        else:
            if exclusion > distance:
                raise QuadratureError(f"Exclusion radius {exclusion} reaches a distant face")
            face_points, weights = _face_grid(lo, hi, rule)
        normals = np.zeros((weights.shape[0], dim))
        normals[:, axis] = 1.0 if side == 1 else -1.0
        yield from _emit(_lift(face_points, axis, value), weights, normals, offset)
        offset += weights.shape[0]


def _near_sphere(D: DomainSpec, Q: QuadratureConfig, x: np.ndarray, exclusion: float) -> Iterator[NodeBatch]:
    rule = Q.boundary
    dim = D.ambient_dim
    R = D.radius
    offset_vec = x - D.center
    rho = float(np.linalg.norm(offset_vec))
    distance = abs(rho - R)
    scale = max(1.0, R)
    on_sphere = distance <= 1e-12 * scale
    if rho <= 1e-14 * scale or (not on_sphere and distance >= Q.near_ratio * R):
        if exclusion > 0.0:
            raise QuadratureError("Exclusion requested for a target away from the sphere")
        yield from boundary_nodes(D, Q)
        return
    pole = offset_vec / rho
    frame = null_space(pole[None, :])
    if on_sphere:
        if exclusion <= 0.0:
            raise SingularityError("Target lies on the sphere; a principal-value exclusion is required")
        if exclusion >= 2.0 * R:
            raise QuadratureError(f"Exclusion radius {exclusion} swallows the sphere")
        psi_lo = 2.0 * np.arcsin(exclusion / (2.0 * R))
    else:
        psi_lo = NEAR_FLOOR * distance / R
    if dim - 1 <= 3:
        omega, w_omega = sphere_rule(dim - 1, rule.q)
    else:
        rng = np.random.default_rng(rule.seed)
        omega = sample_sphere(rng, dim - 1, rule.samples)
        w_omega = np.full(rule.samples, sphere_area(dim - 1) / rule.samples)
    span = np.log(np.pi) - np.log(psi_lo)
    panels = max(1, int(np.ceil(span / Q.radial_panel)))
    tau, w_tau = unit_interval(rule.q, panels)
    psi = np.exp(np.log(psi_lo) + span * tau)
    w_psi = span * w_tau * psi * np.sin(psi) ** (dim - 2)
    directions = (np.cos(psi)[:, None, None] * pole[None, None, :]
                  + np.sin(psi)[:, None, None] * (omega @ frame.T)[None, :, :]).reshape(-1, dim)
    weights = (w_psi[:, None] * w_omega[None, :]).ravel() * R ** (dim - 1)
    yield from _emit(D.center + R * directions, weights, directions, 0)


def near_boundary_nodes(D: DomainSpec, Q: QuadratureConfig, x: np.ndarray, exclusion: float = 0.0) -> Iterator[NodeBatch]:
    """Boundary stream adapted to a target ``x`` on or near the boundary, minus B(x, exclusion)."""
    x = D.check_point(x)
    if D.kind == "box":
        return _near_box_faces(D, Q, x, exclusion)
    return _near_sphere(D, Q, x, exclusion)


def node_spacing(D: DomainSpec, Q: QuadratureConfig) -> float:
    rule = Q.boundary
    if D.kind == "box":
        width = float(np.max(D.hi - D.lo))
        return width / (rule.q * rule.panels) if rule.rule == "gauss" else width * rule.samples ** (-1.0 / max(1, D.ambient_dim - 1))
    return np.pi * D.radius / rule.q if rule.rule == "gauss" else D.radius * rule.samples ** (-1.0 / max(1, D.ambient_dim - 1))


def target_boundary_nodes(D: DomainSpec, Q: QuadratureConfig, x: np.ndarray) -> Iterator[NodeBatch]:
    """Regular stream for well-separated targets, adapted stream near the boundary."""
    x = D.check_point(x)
    gap = abs(float(D.signed_distance(x)))
    if gap == 0.0:
        raise SingularityError("Target lies on the boundary; use the principal-value integral")
    if D.kind == "box":
        near = gap < Q.near_ratio * 0.5 * float(np.min(D.hi - D.lo))
    else:
        near = gap < Q.near_ratio * D.radius
    if not near:
        return boundary_nodes(D, Q)
    if Q.near_field:
        return near_boundary_nodes(D, Q, x)
    spacing = node_spacing(D, Q)
    if gap < spacing:
        logger.warning(f"⚠️ Target at distance {gap:.3e} from the boundary is within the node spacing "
                       f"{spacing:.3e}; expect errors of order {(spacing / gap) ** (D.ambient_dim - 1):.1e}")
    return boundary_nodes(D, Q)


def volume_nodes_around(D: DomainSpec, Q: QuadratureConfig, apex: np.ndarray) -> Iterator[NodeBatch]:
    """Volume stream whose Jacobian vanishes like |y - apex|^{D-1} at an interior apex."""
    rule = Q.volume
    apex = D.check_point(apex)
    if float(D.signed_distance(apex)) > 0:
        return volume_nodes(D, Q)
    return _star_box(D, rule, apex) if D.kind == "box" else _star_ball(D, rule, apex)


def _star_box(D: DomainSpec, rule: RuleSpec, apex: np.ndarray) -> Iterator[NodeBatch]:
    dim = D.ambient_dim
    t, w_t = unit_interval(rule.q, rule.panels)
    faces = list(box_faces(D.lo, D.hi))
    heights = np.array([abs(apex[axis] - value) for axis, _, value in faces])
    areas = np.array([np.prod(np.delete(D.hi - D.lo, axis)) for axis, _, _ in faces])
    counts = _face_allocation(heights * areas + 1e-300, rule.samples) if rule.rule == "monte_carlo" else None
    rng = np.random.default_rng(rule.seed)
    offset = 0
    for index, (axis, _, value) in enumerate(faces):
        height = heights[index]
        if height <= 1e-14 * max(1.0, float(np.max(D.hi - D.lo))):
            continue
        lo, hi = np.delete(D.lo, axis), np.delete(D.hi, axis)
        if rule.rule == "gauss":
            face_points, face_weights = _face_grid(lo, hi, rule)
        else:
            face_points = lo + (hi - lo) * rng.random((counts[index], dim - 1))
            face_weights = np.full(counts[index], areas[index] / counts[index])
        u = _lift(face_points, axis, value)
        points = apex + t[None, :, None] * (u - apex)[:, None, :]
        weights = face_weights[:, None] * (w_t * t ** (dim - 1))[None, :] * height
        yield from _emit(points.reshape(-1, dim), weights.ravel(), None, offset)
        offset += weights.size


def _star_ball(D: DomainSpec, rule: RuleSpec, apex: np.ndarray) -> Iterator[NodeBatch]:
    dim = D.ambient_dim
    if rule.rule == "gauss" and dim <= 4:
        directions, dir_weights = sphere_rule(dim, rule.q)
    else:
        rng = np.random.default_rng(rule.seed)
        directions = sample_sphere(rng, dim, rule.samples)
        dir_weights = np.full(rule.samples, sphere_area(dim) / rule.samples)
    t, w_t = unit_interval(rule.q, rule.panels)
    offset = apex - D.center
    b = directions @ offset
    reach = -b + np.sqrt(b ** 2 + D.radius ** 2 - offset @ offset)
    points = apex + (reach[:, None, None] * t[None, :, None]) * directions[:, None, :]
    weights = (dir_weights * reach ** dim)[:, None] * (w_t * t ** (dim - 1))[None, :]
    yield from _emit(points.reshape(-1, dim), weights.ravel(), None, 0)


# ---------------------------------------------------------------------------
# Reductions
# ---------------------------------------------------------------------------

def _reduce_batch(batch: NodeBatch, g: Integrand) -> Tuple[np.ndarray, np.ndarray, int]:
    values = np.asarray(g(batch), dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if not np.all(np.isfinite(values)):
        bad = int(np.argwhere(~np.all(np.isfinite(values), axis=-1))[0, 0])
        raise QuadratureError(f"Non-finite integrand at node {batch.offset + bad}",
                              node=batch.offset + bad, point=batch.points[bad].tolist())
    contributions = values * batch.weights[:, None]
    return np.sum(contributions, axis=0), np.sum(contributions ** 2, axis=0), len(batch)


def integrate_batches(batches: Iterable[NodeBatch], g: Integrand, threads: int = 1,
                      monte_carlo: bool = False) -> IntegrationResult:
    """Componentwise weighted sum; partial sums are added in batch order for any thread count."""
    try:
        if threads > 1:
            with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
                partials = list(pool.map(lambda batch: _reduce_batch(batch, g), batches))
        else:
            partials = [_reduce_batch(batch, g) for batch in batches]
    except AlternaException:
        raise
    except Exception as e:
        raise QuadratureError(f"Failed to evaluate integrand: {str(e)}")
    if not partials:
        raise QuadratureError("Quadrature produced no nodes")
    total = partials[0][0].copy()
    squares = partials[0][1].copy()
    count = partials[0][2]
    for value, square, size in partials[1:]:
        total = total + value
        squares = squares + square
        count += size
    std_error = np.zeros_like(total)
    if monte_carlo and count > 1:
        variance = (count * squares - total ** 2) / (count - 1)
        std_error = np.sqrt(np.maximum(variance, 0.0))
    return IntegrationResult(value=total, std_error=std_error, nodes=count)


def integrate_boundary(D: DomainSpec, Q: QuadratureConfig, g: Integrand, with_error: bool = False):
    result = integrate_batches(boundary_nodes(D, Q), g, Q.threads, Q.boundary.rule == "monte_carlo")
    return result if with_error else result.value


def integrate_volume(D: DomainSpec, Q: QuadratureConfig, g: Integrand, with_error: bool = False):
    result = integrate_batches(volume_nodes(D, Q), g, Q.threads, Q.volume.rule == "monte_carlo")
    return result if with_error else result.value


def total_weight(batches: Iterable[NodeBatch]) -> float:
    return float(sum(np.sum(batch.weights) for batch in batches))
