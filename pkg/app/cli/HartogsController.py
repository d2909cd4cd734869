import logging

import typer

from app.models.CliConfigModel import CliConfig
from app.models.VerificationModel import CaseSetup, VerificationCase
from app.services.VerifyHarnessService import SuiteRunner, load_suite
from app.utils.constants import ERROR, SUCCESS
from app.utils.exceptions import AlternaException
from app.utils.returns_data import returnsdata

logger = logging.getLogger(__name__)

DEMO_CASE = "hartogs_default"


def hartogs(
    ctx: typer.Context,
    demo: bool = typer.Option(False, "--demo", help="Run the bundled Hartogs case"),
    function: str = typer.Option("fueter:1,1", "--function", help="Function monogenic outside K"),
    k_half: float = typer.Option(0.3, "--k-half", help="Half width of the compact box K"),
    samples: int = typer.Option(10, "--samples", help="Sample points inside and outside K"),
):
    """Extend a function across a compact hole and print the extension residuals."""
    settings: CliConfig = ctx.obj
    try:
        if demo:
            case = next(case for case in load_suite("default") if case.id == DEMO_CASE)
        else:
            case = VerificationCase(id="hartogs_cli", theorem="hartogs", tolerance=1e-3,
                                    setup=CaseSetup(function=function, samples=samples,
                                                    compact_set={"kind": "box", "half": k_half}),
                                    quadrature={"volume": {"rule": "gauss", "q": 16, "panels": 8}})
        report = SuiteRunner(seed=settings.seed, threads=settings.threads).run_case(case)
    except AlternaException as e:
        logger.error(f"❌ hartogs failed: {e.detail}")
        returnsdata.write(returnsdata.error_msg(e.detail, ERROR, e.status_code))
        raise typer.Exit(code=2)
    data = {"case": case.id, "residual": report.final_residual, "tolerance": report.tolerance,
            "passed": report.passed, **report.detail}
    returnsdata.write(returnsdata.success(data, "Hartogs extension", SUCCESS))
    if not report.passed:
        typer.echo(f"First failing case: {case.id}", err=True)
        raise typer.Exit(code=1)
