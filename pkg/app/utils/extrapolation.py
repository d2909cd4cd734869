"""Limits of ladders ``values[k]`` at steps ``steps[k] -> 0``.

The model is A + B * step^beta with beta fitted on the most varying
component and bounded to [0.25, 4]; A is then solved per component by linear
least squares.
"""
import logging
from typing import Sequence

import numpy as np
from scipy.optimize import curve_fit

from app.models.IntegralModel import ExtrapolationResult
from app.utils.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

BETA_BOUNDS = (0.25, 4.0)
FLAT_TOL = 1e-11


def _power_model(step, A, B, beta):
    return A + B * step ** beta


def _linear_limit(steps: np.ndarray, values: np.ndarray, beta: float):
    design = np.stack([np.ones_like(steps), steps ** beta], axis=-1)
    coeffs, *_ = np.linalg.lstsq(design, values, rcond=None)
    misfit = float(np.max(np.linalg.norm(design @ coeffs - values, axis=-1)))
    return coeffs[0], misfit


def extrapolate_to_zero(steps: Sequence[float], values, extrapolate: bool = True) -> ExtrapolationResult:
    steps = np.asarray(steps, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if steps.ndim != 1 or steps.shape[0] != values.shape[0] or steps.shape[0] == 0:
        raise ConfigurationError("Extrapolation needs one value per step")
    if np.any(steps <= 0) or np.any(np.diff(steps) >= 0):
        raise ConfigurationError("Extrapolation steps must be positive and strictly decreasing")
    last = values[-1]
    tail = float(np.linalg.norm(values[-1] - values[-2])) if values.shape[0] > 1 else 0.0
    if not extrapolate or values.shape[0] < 3:
        return ExtrapolationResult(value=last.copy(), est_error=tail, steps=steps, values=values)

    spread = np.max(values, axis=0) - np.min(values, axis=0)
    scale = max(1.0, float(np.max(np.abs(values))))
    if float(np.max(spread)) <= FLAT_TOL * scale:
        return ExtrapolationResult(value=last.copy(), est_error=float(np.max(spread)), steps=steps, values=values)

    k = int(np.argmax(spread))
    slope = (values[0, k] - values[-1, k]) / (steps[0] - steps[-1])
    try:
        params, _ = curve_fit(_power_model, steps, values[:, k], p0=(values[-1, k], slope, 1.0),
                              bounds=([-np.inf, -np.inf, BETA_BOUNDS[0]], [np.inf, np.inf, BETA_BOUNDS[1]]),
                              maxfev=5000)
        beta = float(params[2])
    except (RuntimeError, ValueError) as e:
        logger.warning(f"⚠️ Power-law fit failed ({str(e)}); extrapolating with beta = 1")
        beta = 1.0
    limit, misfit = _linear_limit(steps, values, beta)
    est_error = misfit
    if values.shape[0] >= 4:
        # sensitivity to the coarsest rung
        reduced, _ = _linear_limit(steps[1:], values[1:], beta)
        est_error = max(est_error, float(np.linalg.norm(limit - reduced)))
    return ExtrapolationResult(value=limit, est_error=est_error, steps=steps, values=values, rate=beta)
