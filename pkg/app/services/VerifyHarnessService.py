import csv
import io
import logging
import math
import time
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import orjson
from pydantic import ValidationError

from app.models.VerificationModel import CSV_COLUMNS, ConvergenceReport, RungResult, Theorem, VerificationCase
from app.services.FunctionsService import function_from_spec
from app.services.TheoremService import PROCEDURES, prepare
from app.utils.exceptions import AlternaException, ConfigurationError

logger = logging.getLogger(__name__)

SUITE_DIR = Path(__file__).resolve().parent.parent / "suites"


def suite_path(suite: str) -> Path:
    candidate = Path(suite)
    if candidate.suffix == ".json" and candidate.exists():
        return candidate
    bundled = SUITE_DIR / f"{suite}.json"
    if not bundled.exists():
        raise ConfigurationError(f"Unknown suite '{suite}'")
    return bundled


def load_suite(suite: str = "default") -> List[VerificationCase]:
    path = suite_path(suite)
    try:
        raw = orjson.loads(path.read_bytes())
        cases = [VerificationCase.model_validate(entry) for entry in raw.get("cases", [])]
    except ValidationError as e:
        raise ConfigurationError(f"Invalid suite {path.name}: {str(e)}")
    except orjson.JSONDecodeError as e:
        raise ConfigurationError(f"Suite {path.name} is not valid JSON: {str(e)}")
    ids = [case.id for case in cases]
    if len(set(ids)) != len(ids):
        raise ConfigurationError(f"Suite {path.name} repeats case ids")
    return cases


def theorem_coverage(cases: Sequence[VerificationCase]) -> List[str]:
    """Theorems without a case in ``cases``."""
    covered = {case.theorem for case in cases}
    return [theorem.value for theorem in Theorem if theorem not in covered]


def filter_cases(cases: Sequence[VerificationCase], tags: Optional[Sequence[str]] = None) -> List[VerificationCase]:
    if not tags:
        return list(cases)
    known = {tag for case in cases for tag in case.all_tags()}
    unknown = [tag for tag in tags if tag not in known]
    if unknown:
        raise ConfigurationError(f"Unknown tag(s): {', '.join(unknown)}")
    return [case for case in cases if any(tag in case.all_tags() for tag in tags)]


def check_case(case: VerificationCase) -> None:
    """Surface setup inconsistencies before any computation."""
    if case.theorem in (Theorem.ALGEBRA_LAWS, Theorem.NORM_BOUND):
        return
    S, ctx, _ = prepare(case.setup)
    function_from_spec(S, case.setup.n, case.setup.function)
    if case.setup.point is not None and len(case.setup.point) != ctx.D:
        raise ConfigurationError(f"Case {case.id}: point needs {ctx.D} coordinates")
    if case.theorem == Theorem.TEODORESCU_INVERSE and ctx.n != 1:
        raise ConfigurationError(f"Case {case.id}: the Teodorescu transform needs n = 1")
    if case.theorem in (Theorem.INHOMOGENEOUS_SOLVE, Theorem.COMPATIBILITY, Theorem.HARTOGS) and ctx.n < 2:
        raise ConfigurationError(f"Case {case.id}: {case.theorem.value} needs n >= 2")


def order_estimates(sizes: Sequence[int], residuals: Sequence[float]) -> List[Optional[float]]:
    """log(r_{k-1}/r_k) / log(size_k/size_{k-1}); None where undefined."""
    orders = [None]
    for k in range(1, len(residuals)):
        previous, current = residuals[k - 1], residuals[k]
        if previous > 0 and current > 0 and sizes[k] != sizes[k - 1] and math.isfinite(previous + current):
            orders.append(math.log(previous / current) / math.log(sizes[k] / sizes[k - 1]))
        else:
            orders.append(None)
    return orders


class SuiteRunner:
    """Runs verification cases over their refinement ladders."""

    def __init__(self, seed: Optional[int] = None, threads: Optional[int] = None, timings: bool = False):
        self.seed = seed
        self.threads = threads
        self.timings = timings

    def run_case(self, case: VerificationCase) -> ConvergenceReport:
        check_case(case)
        procedure = PROCEDURES[case.theorem]
        report = ConvergenceReport(case_id=case.id, theorem=case.theorem.value, tolerance=case.tolerance)
        logger.info(f"▶️ Case {case.id} ({case.theorem.value}), {len(case.ladder)} rung(s)")
        sizes, residuals = [], []
        for index in range(len(case.ladder)):
            Q = case.rung_config(index, seed=self.seed, threads=self.threads)
            report.monte_carlo = "monte_carlo" in (Q.boundary.rule, Q.volume.rule)
            started = time.perf_counter()
            try:
                outcome = procedure(case.setup, Q)
            except AlternaException as e:
                logger.error(f"❌ Case {case.id} failed at rung {index}: {e.detail}")
                report.detail = {"error": e.to_dict(), "rung": index}
                report.rungs.append(RungResult(rung=index, size=case.ladder[index], residual=float("inf")))
                return report.finalize()
            elapsed = time.perf_counter() - started
            sizes.append(case.ladder[index])
            residuals.append(outcome.residual)
            report.rungs.append(RungResult(rung=index, size=case.ladder[index], residual=outcome.residual,
                                           seconds=elapsed if self.timings else None,
                                           std_error=outcome.std_error))
            report.detail = outcome.detail
            logger.info(f"Case {case.id} rung {index} ({case.ladder_key}={case.ladder[index]}): "
                        f"residual {outcome.residual:.3e}")
        for rung, order in zip(report.rungs, order_estimates(sizes, residuals)):
            rung.order_est = order
        report.finalize()
        status = "✅ passed" if report.passed else "❌ failed"
        logger.info(f"{status} {case.id}: residual {report.final_residual:.3e} vs tolerance {case.tolerance:.1e}")
        return report

    def run_suite(self, cases: Iterable[VerificationCase], tags: Optional[Sequence[str]] = None) -> List[ConvergenceReport]:
        selected = filter_cases(list(cases), tags)
        for case in selected:
            check_case(case)
        return [self.run_case(case) for case in selected]


def converge_case(case: VerificationCase, key: str, values: Sequence[int]) -> VerificationCase:
    """Copy of ``case`` with its ladder replaced."""
    return case.model_copy(update={"ladder_key": key, "ladder": list(values)})


def emit(reports: Sequence[ConvergenceReport], fmt: str = "json", timings: bool = False) -> bytes:
    if fmt == "json":
        payload = [report.to_dict() for report in reports]
        if not timings:
            for entry in payload:
                for rung in entry["rungs"]:
                    rung["seconds"] = None
        return orjson.dumps(payload, option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2)
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for report in reports:
            writer.writerows(report.csv_rows(timings))
        return buffer.getvalue().encode()
    raise ConfigurationError(f"Unknown report format '{fmt}', expected json or csv")


def write_reports(reports: Sequence[ConvergenceReport], suite: str, results_dir: str,
                  timings: bool = False) -> Path:
    """results/<suite>/<case>.{json,csv}"""
    target = Path(results_dir) / Path(suite).stem
    target.mkdir(parents=True, exist_ok=True)
    for report in reports:
        (target / f"{report.case_id}.json").write_bytes(emit([report], "json", timings))
        (target / f"{report.case_id}.csv").write_bytes(emit([report], "csv", timings))
    logger.info(f"📁 Wrote {len(reports)} report(s) to {target}")
    return target


def first_failure(reports: Sequence[ConvergenceReport]) -> Optional[ConvergenceReport]:
    return next((report for report in reports if not report.passed), None)
