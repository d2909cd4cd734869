import logging
from typing import Optional

import typer

from app.models.CliConfigModel import CliConfig
from app.services.EvalService import evaluate, load_request
from app.utils.constants import ERROR, SUCCESS
from app.utils.exceptions import AlternaException
from app.utils.helper_functions import parse_float_list
from app.utils.returns_data import returnsdata

logger = logging.getLogger(__name__)


def eval_operator(
    ctx: typer.Context,
    op: Optional[str] = typer.Option(None, "--op", help="bm_integral, cauchy_pompeiu, solid_angle, bm_singular_pv, "
                                                         "plemelj_limits, teodorescu, solve_inhomogeneous, "
                                                         "cauchy_kernel, fundamental_solution or dbar"),
    config: Optional[str] = typer.Option(None, "--config", help="JSON file with the evaluation setup"),
    point: Optional[str] = typer.Option(None, "--point", help="Comma-separated coordinates"),
    function: Optional[str] = typer.Option(None, "--function", help="Catalog spec such as fueter:1,1"),
    subspace: Optional[str] = typer.Option(None, "--subspace", help="Subspace preset"),
    n: Optional[int] = typer.Option(None, "--n", help="Number of variable blocks"),
):
    """Evaluate a single operator and print one JSON record."""
    settings: CliConfig = ctx.obj
    try:
        overrides = {"op": op, "function": function, "subspace": subspace, "n": n,
                     "point": parse_float_list(point) if point else None}
        request = load_request(config, overrides)
        result = evaluate(request, seed=settings.seed, threads=settings.threads)
        returnsdata.write(returnsdata.record(result["value"], result["est_error"], result["config_echo"],
                                             f"Evaluated {request.op.value}", SUCCESS))
    except AlternaException as e:
        logger.error(f"❌ eval failed: {e.detail}")
        returnsdata.write(returnsdata.error_msg(e.detail, ERROR, e.status_code, data=e.to_dict()))
        raise typer.Exit(code=2 if e.status_code == 400 else 1)
