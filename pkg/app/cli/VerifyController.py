import logging
from typing import List, Optional, Sequence

import typer
from rich.console import Console
from rich.table import Table

from app.models.CliConfigModel import CliConfig
from app.models.VerificationModel import ConvergenceReport
from app.services.VerifyHarnessService import (
    SuiteRunner,
    converge_case,
    emit,
    first_failure,
    load_suite,
    write_reports,
)
from app.utils.constants import ERROR
from app.utils.exceptions import AlternaException, ConfigurationError
from app.utils.helper_functions import parse_ladder
from app.utils.returns_data import returnsdata

logger = logging.getLogger(__name__)

console = Console(stderr=True)


def summarize(reports: Sequence[ConvergenceReport]) -> None:
    table = Table(title="Verification summary")
    for column in ("case", "theorem", "residual", "tolerance", "status"):
        table.add_column(column)
    for report in reports:
        table.add_row(report.case_id, report.theorem, f"{report.final_residual:.3e}", f"{report.tolerance:.1e}",
                      "[green]pass[/green]" if report.passed else "[red]FAIL[/red]")
    console.print(table)


def _finish(reports: Sequence[ConvergenceReport], fmt: str, timings: bool) -> None:
    typer.echo(emit(reports, fmt, timings).decode(), nl=False)
    summarize(reports)
    failed = first_failure(reports)
    if failed is not None:
        logger.error(f"❌ First failing case: {failed.case_id}")
        typer.echo(f"First failing case: {failed.case_id}", err=True)
        raise typer.Exit(code=1)


def verify(
    ctx: typer.Context,
    suite: str = typer.Option("default", "--suite", help="Bundled suite name or path to a suite JSON file"),
    tags: Optional[List[str]] = typer.Option(None, "--filter", help="Run only cases carrying this tag"),
):
    """Run a verification suite and write results/<suite>/<case>.{json,csv}."""
    settings: CliConfig = ctx.obj
    try:
        runner = SuiteRunner(seed=settings.seed, threads=settings.threads, timings=settings.timings)
        reports = runner.run_suite(load_suite(suite), tags)
        write_reports(reports, suite, settings.results_dir, settings.timings)
    except AlternaException as e:
        logger.error(f"❌ verify failed: {e.detail}")
        returnsdata.write(returnsdata.error_msg(e.detail, ERROR, e.status_code))
        raise typer.Exit(code=2)
    _finish(reports, settings.output_format("json"), settings.timings)


def converge(
    ctx: typer.Context,
    case_id: str = typer.Option(..., "--case", help="Case id from the suite"),
    ladder: str = typer.Option(..., "--ladder", help="Refinement ladder such as q=8,12,16,24"),
    suite: str = typer.Option("default", "--suite", help="Suite holding the case"),
):
    """Re-run one case over a custom ladder and print its convergence table."""
    settings: CliConfig = ctx.obj
    try:
        key, values = parse_ladder(ladder)
        matches = [case for case in load_suite(suite) if case.id == case_id]
        if not matches:
            raise ConfigurationError(f"Unknown case '{case_id}' in suite {suite}")
        runner = SuiteRunner(seed=settings.seed, threads=settings.threads, timings=settings.timings)
        reports = [runner.run_case(converge_case(matches[0], key, values))]
    except AlternaException as e:
        logger.error(f"❌ converge failed: {e.detail}")
        returnsdata.write(returnsdata.error_msg(e.detail, ERROR, e.status_code))
        raise typer.Exit(code=2)
    _finish(reports, settings.output_format("csv"), settings.timings)
