"""Single operator evaluations behind the ``eval`` subcommand."""
import logging
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import orjson
from pydantic import ValidationError

from app.models.CliConfigModel import EvalOp, EvalRequest
from app.models.FieldFunctionModel import DiracMethod
from app.models.IntegralModel import PVConfig
from app.services.FunctionsService import dirac_apply, dirac_image, function_from_spec
from app.services.InhomogeneousService import solve_inhomogeneous
from app.services.IntegralFormulaService import (
    bm_integral,
    bm_singular_pv,
    cauchy_pompeiu,
    plemelj_limits,
    solid_angle,
    teodorescu,
)
from app.services.KernelService import cauchy_kernel, fundamental_solution
from app.services.TheoremService import boundary_point, interior_point, prepare
from app.utils.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

BOUNDARY_OPS = (EvalOp.SOLID_ANGLE, EvalOp.BM_SINGULAR_PV, EvalOp.PLEMELJ_LIMITS)


def load_request(path: Optional[str], overrides: Dict[str, Any]) -> EvalRequest:
    raw: Dict[str, Any] = {}
    if path:
        try:
            raw = orjson.loads(Path(path).read_bytes())
        except FileNotFoundError:
            raise ConfigurationError(f"Config file not found: {path}")
        except orjson.JSONDecodeError as e:
            raise ConfigurationError(f"Config file is not valid JSON: {str(e)}")
    raw.update({key: value for key, value in overrides.items() if value is not None})
    try:
        return EvalRequest.model_validate(raw)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid eval config: {e.errors()[0]['msg']}", errors=e.errors())


def evaluate(request: EvalRequest, seed: int = 42, threads: int = 1) -> Dict[str, Any]:
    """Run ``request.op`` and return ``{"value", "est_error", "config_echo"}``."""
    Q = request.quadrature.model_copy(update={"threads": threads})
    S, ctx, D = prepare(request)
    default = boundary_point(D) if request.op in BOUNDARY_OPS else interior_point(D)
    x = default if request.point is None else np.asarray(request.point, dtype=float)
    logger.info(f"Evaluating {request.op.value} at {np.round(x, 6).tolist()} on {D.kind} in R^{ctx.D}")
    est_error: Any = 0.0

    if request.op == EvalOp.SOLID_ANGLE:
        value, est_error = solid_angle(D, x, method=request.method, seed=seed, with_error=True)
    elif request.op == EvalOp.CAUCHY_KERNEL:
        value = cauchy_kernel(ctx, x)
    elif request.op == EvalOp.FUNDAMENTAL_SOLUTION:
        value = fundamental_solution(ctx, x)
    else:
        f = function_from_spec(S, request.n, request.function)
        if request.op == EvalOp.BM_INTEGRAL:
            result = bm_integral(ctx, D, Q, f, x, with_error=True)
            value, est_error = result.value, result.std_error
        elif request.op == EvalOp.CAUCHY_POMPEIU:
            result = cauchy_pompeiu(ctx, D, Q, f, x, with_error=True)
            value, est_error = result.value, result.std_error
        elif request.op == EvalOp.BM_SINGULAR_PV:
            pv = PVConfig(epsilons=request.pv_epsilons or list(Q.pv_epsilons))
            limit = bm_singular_pv(ctx, D, Q, pv, f, x)
            value, est_error = limit.value, limit.est_error
        elif request.op == EvalOp.PLEMELJ_LIMITS:
            pv = PVConfig(epsilons=request.pv_epsilons or list(Q.pv_epsilons))
            jump = plemelj_limits(ctx, D, Q, pv, f, x, request.approach)
            value = {"interior": jump.interior_limit, "exterior": jump.exterior_limit,
                     "boundary": jump.boundary_value, "tau": jump.tau, "residuals": jump.residuals()}
            est_error = jump.est_error
        elif request.op == EvalOp.TEODORESCU:
            result = teodorescu(ctx, D, Q, f, x, with_error=True)
            value, est_error = result.value, result.std_error
        elif request.op == EvalOp.SOLVE_INHOMOGENEOUS:
            if f.support is None:
                raise ConfigurationError("solve_inhomogeneous needs a compactly supported function such as bump")
            g = [dirac_image(S, f, j) for j in range(1, request.n + 1)]
            value = solve_inhomogeneous(ctx, g, x, Q)
        else:
            result = dirac_apply(S, f, request.block, x, method=DiracMethod.FD)
            value, est_error = result.value, result.est_error

    return {"value": value, "est_error": est_error,
            "config_echo": {**request.model_dump(mode="json"), "point": np.asarray(x).tolist(), "seed": seed}}
