import logging
from typing import Optional

import typer

from app.config import configure_logging
from app.models.CliConfigModel import CliConfig
from app.routes import cli_router

logger = logging.getLogger(__name__)

app = cli_router


@app.callback()
def main(
    ctx: typer.Context,
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed for every Monte Carlo component (default 42)"),
    threads: Optional[int] = typer.Option(None, "--threads", help="Worker threads; falls back to ALTERNA_THREADS"),
    fmt: Optional[str] = typer.Option(None, "--format", help="json or csv"),
    log_level: str = typer.Option("INFO", "--log-level", help="Logging level; logs go to stderr"),
    results_dir: Optional[str] = typer.Option(None, "--results-dir", help="Directory for suite reports"),
    timings: bool = typer.Option(False, "--timings", help="Record wall-clock seconds in reports"),
):
    if threads is not None and threads < 1:
        raise typer.BadParameter(f"threads must be >= 1, got {threads}", param_hint="--threads")
    if fmt is not None and fmt not in ("json", "csv"):
        raise typer.BadParameter(f"format must be json or csv, got {fmt}", param_hint="--format")
    configure_logging(log_level)
    ctx.obj = CliConfig.from_flags(seed, threads, fmt, log_level, results_dir, timings)
    ctx.obj.command = ctx.invoked_subcommand
    logger.debug(f"Settings: {ctx.obj.model_dump()}")


def run() -> None:
    app()
