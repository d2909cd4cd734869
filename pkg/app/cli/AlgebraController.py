import logging
from typing import Optional

import typer

from app.services.AlgebraCoreService import (
    alt_residuals,
    build_algebra,
    load_algebra,
    nonassociative_triples,
    table_rows,
    validate_algebra,
)
from app.utils.constants import ERROR, SUCCESS
from app.utils.exceptions import AlgebraValidationError, AlternaException
from app.utils.returns_data import returnsdata

logger = logging.getLogger(__name__)

router = typer.Typer(help="Inspect and validate structure-constant algebras.", no_args_is_help=True)


@router.command("inspect")
def inspect_algebra(
    kind: str = typer.Option("quaternions", "--kind", help="complex, quaternions, octonions or clifford(m)"),
    rows: Optional[int] = typer.Option(None, "--rows", help="Print only the first N table rows"),
):
    """Print the dimension, multiplication table and alternativity check of a built-in algebra."""
    try:
        algebra = build_algebra(kind)
        report = validate_algebra(algebra)
        table = table_rows(algebra)
        data = {
            "name": algebra.name,
            "dim": algebra.dim,
            "labels": list(algebra.labels),
            "table": table if rows is None else table[:rows],
            "alternative": report.is_valid,
            "alternativity_residual": max(alt_residuals(algebra, True), alt_residuals(algebra, False)),
            "associative": not nonassociative_triples(algebra, limit=1),
        }
        returnsdata.write(returnsdata.success(data, f"Algebra {algebra.name} of dimension {algebra.dim}", SUCCESS))
    except AlternaException as e:
        returnsdata.write(returnsdata.error_msg(e.detail, ERROR, e.status_code, data=e.to_dict()))
        raise typer.Exit(code=2)


@router.command("validate")
def validate_algebra_file(file: str = typer.Option(..., "--file", help="JSON file with dim, structure and involution")):
    """Load an algebra file and report every violated invariant."""
    try:
        algebra = load_algebra(file)
        returnsdata.write(returnsdata.success(validate_algebra(algebra).to_dict(),
                                              f"Algebra {algebra.name} is a valid alternative *-algebra", SUCCESS))
    except AlgebraValidationError as e:
        logger.error(f"❌ {file}: {e.detail}")
        returnsdata.write(returnsdata.error_msg(e.detail, ERROR, e.status_code, data=e.to_dict()))
        raise typer.Exit(code=1)
    except AlternaException as e:
        returnsdata.write(returnsdata.error_msg(e.detail, ERROR, e.status_code))
        raise typer.Exit(code=2)
