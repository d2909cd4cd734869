"""Central finite differences with one Richardson level.

Functions here take batched points: ``x`` has shape ``(..., D)`` and the
differentiated callable must accept any leading shape and return
``(..., dim)``.
"""
import logging
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from app.config import get_fd_step
from app.utils.exceptions import StepUnderflowError

logger = logging.getLogger(__name__)

FIRST_OFFSETS = np.array([2.0, 1.0, -1.0, -2.0])
FIRST_WEIGHTS = np.array([-1.0, 8.0, -8.0, 1.0]) / 12.0

SECOND_OFFSETS = np.array([2.0, 1.0, 0.0, -1.0, -2.0])
SECOND_WEIGHTS = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0

# h and h/2
LEVELS = np.array([1.0, 0.5])
RICHARDSON = 2.0 ** 4 - 1.0


def default_step(x: np.ndarray, rel: Optional[float] = None) -> np.ndarray:
    rel = get_fd_step() if rel is None else rel
    return rel * np.maximum(1.0, np.linalg.norm(x, axis=-1))


def _resolve_step(x: np.ndarray, h: Optional[float]) -> np.ndarray:
    scale = np.maximum(1.0, np.linalg.norm(x, axis=-1))
    step = default_step(x) if h is None else np.broadcast_to(np.asarray(h, dtype=float), scale.shape)
    if np.any(step <= 1e-12 * scale):
        raise StepUnderflowError(f"Finite-difference step {np.min(step):.3e} underflows at |x|={np.max(scale):.3e}")
    return step


def _stencil_points(x: np.ndarray, indices: Sequence[int], offsets: np.ndarray, step: np.ndarray) -> np.ndarray:
    D = x.shape[-1]
    unit = np.zeros((len(indices), D))
    unit[np.arange(len(indices)), list(indices)] = 1.0
    # shift[l, a, k, :] = level_l * offset_a * e_{indices[k]}
    shift = LEVELS[:, None, None, None] * offsets[None, :, None, None] * unit[None, None, :, :]
    return x[..., None, None, None, :] + step[..., None, None, None, None] * shift


def partial_derivatives(func: Callable[[np.ndarray], np.ndarray], x: np.ndarray, indices: Sequence[int],
                        h: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """First partials along ``indices``.

    Returns ``(derivs, errors)`` with shapes ``(..., K, dim)`` and ``(..., K)``.
    """
    x = np.asarray(x, dtype=float)
    step = _resolve_step(x, h)
    values = np.asarray(func(_stencil_points(x, indices, FIRST_OFFSETS, step)))
    # values: (..., 2, 4, K, dim)
    combined = np.einsum('...lakd,a->...lkd', values, FIRST_WEIGHTS)
    combined = combined / (LEVELS[:, None, None] * step[..., None, None, None])
    coarse, fine = combined[..., 0, :, :], combined[..., 1, :, :]
    derivs = fine + (fine - coarse) / RICHARDSON
    errors = np.linalg.norm(fine - coarse, axis=-1) / RICHARDSON
    return derivs, errors


def second_derivatives(func: Callable[[np.ndarray], np.ndarray], x: np.ndarray, indices: Sequence[int],
                       h: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Unmixed second partials along ``indices``; same shapes as :func:`partial_derivatives`."""
    x = np.asarray(x, dtype=float)
    step = _resolve_step(x, h)
    values = np.asarray(func(_stencil_points(x, indices, SECOND_OFFSETS, step)))
    combined = np.einsum('...lakd,a->...lkd', values, SECOND_WEIGHTS)
    combined = combined / (LEVELS[:, None, None] * step[..., None, None, None]) ** 2
    coarse, fine = combined[..., 0, :, :], combined[..., 1, :, :]
    derivs = fine + (fine - coarse) / RICHARDSON
    errors = np.linalg.norm(fine - coarse, axis=-1) / RICHARDSON
    return derivs, errors
