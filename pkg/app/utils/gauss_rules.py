"""Gauss-Legendre, tensor and sphere rules shared by the quadrature service."""
import itertools
from functools import lru_cache
from typing import List, Tuple

import numpy as np
from scipy.special import gammaln


@lru_cache(maxsize=64)
def _leggauss(q: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(q)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_interval(q: int, a: float, b: float, panels: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule with ``panels`` equal panels on [a, b]."""
    ref_x, ref_w = _leggauss(q)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * ref_x[None, :]).ravel()
    weights = (half[:, None] * ref_w[None, :]).ravel()
    return nodes, weights


def unit_interval(q: int, panels: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    return gauss_interval(q, 0.0, 1.0, panels)


def tensor_grid(axes: List[Tuple[np.ndarray, np.ndarray]]) -> Tuple[np.ndarray, np.ndarray]:
    """Tensor product of 1-D rules; an empty axis list gives the single empty point."""
    if not axes:
        return np.zeros((1, 0)), np.ones(1)
    mesh = np.meshgrid(*[nodes for nodes, _ in axes], indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=-1)
    weights = np.ones(points.shape[0])
    wmesh = np.meshgrid(*[w for _, w in axes], indexing="ij")
    for w in wmesh:
        weights = weights * w.ravel()
    return points, weights


def sphere_area(k: int) -> float:
    """Surface area of the unit sphere S^{k-1} in R^k, 2 pi^{k/2} / Gamma(k/2)."""
    return float(np.exp(np.log(2.0) + 0.5 * k * np.log(np.pi) - gammaln(0.5 * k)))


def ball_volume(k: int) -> float:
    return sphere_area(k) / k


@lru_cache(maxsize=32)
def _sphere_rule_cached(k: int, q: int) -> Tuple[np.ndarray, np.ndarray]:
    if k == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if k == 2:
        count = 2 * q
        phi = 2.0 * np.pi * np.arange(count) / count
        return np.stack([np.cos(phi), np.sin(phi)], axis=-1), np.full(count, 2.0 * np.pi / count)
    theta, wt = gauss_interval(q, 0.0, np.pi)
    wt = wt * np.sin(theta) ** (k - 2)
    sub_points, sub_weights = _sphere_rule_cached(k - 1, q)
    points = np.empty((q * sub_points.shape[0], k))
    weights = np.empty(q * sub_points.shape[0])
    for i, (angle, w) in enumerate(zip(theta, wt)):
        block = slice(i * sub_points.shape[0], (i + 1) * sub_points.shape[0])
        points[block, 0] = np.cos(angle)
        points[block, 1:] = np.sin(angle) * sub_points
        weights[block] = w * sub_weights
    return points, weights


def sphere_rule(k: int, q: int) -> Tuple[np.ndarray, np.ndarray]:
    """Hyperspherical tensor rule on S^{k-1}; weights sum to :func:`sphere_area`."""
    points, weights = _sphere_rule_cached(k, q)
    return points.copy(), weights.copy()


def sample_sphere(rng: np.random.Generator, k: int, samples: int) -> np.ndarray:
    directions = rng.standard_normal((samples, k))
    return directions / np.linalg.norm(directions, axis=-1, keepdims=True)


def box_faces(lo: np.ndarray, hi: np.ndarray):
    """Yield ``(axis, side, value)`` for the 2D faces of a box in fixed order."""
    for axis, side in itertools.product(range(len(lo)), (0, 1)):
        yield axis, side, (lo[axis] if side == 0 else hi[axis])
