import typer

from app.cli import AlgebraController, EvalController, HartogsController, VerifyController

cli_router = typer.Typer(
    help="Monogenic function toolkit over alternative *-algebras.",
    no_args_is_help=True,
    add_completion=False,
)

cli_router.add_typer(AlgebraController.router, name="algebra")
cli_router.command("eval")(EvalController.eval_operator)
cli_router.command("verify")(VerifyController.verify)
cli_router.command("converge")(VerifyController.converge)
cli_router.command("hartogs")(HartogsController.hartogs)
