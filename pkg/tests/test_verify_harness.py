import math

import orjson
import pytest

from app.models.VerificationModel import CSV_COLUMNS, ConvergenceReport, RungResult, VerificationCase
from app.services.VerifyHarnessService import (
    SuiteRunner,
    check_case,
    converge_case,
    emit,
    filter_cases,
    first_failure,
    load_suite,
    order_estimates,
    theorem_coverage,
    write_reports,
)
from app.utils.exceptions import ConfigurationError


@pytest.fixture(scope="module")
def suite():
    return load_suite("default")


def _case(suite, case_id):
    return next(case for case in suite if case.id == case_id)


def test_default_suite_covers_every_theorem(suite):
    assert theorem_coverage(suite) == []
    assert len({case.id for case in suite}) == len(suite)


def test_every_bundled_case_is_consistent(suite):
    for case in suite:
        check_case(case)


def test_filter_by_tag_and_id(suite):
    smoke = filter_cases(suite, ["smoke"])
    assert smoke and all("smoke" in case.tags for case in smoke)
    assert [case.id for case in filter_cases(suite, ["kernel_divergence_hcj_n2"])] == ["kernel_divergence_hcj_n2"]
    assert filter_cases(suite, None) == list(suite)
    with pytest.raises(ConfigurationError):
        filter_cases(suite, ["no_such_tag"])


def test_unknown_suite():
    with pytest.raises(ConfigurationError):
        load_suite("missing_suite")


def test_broken_suite_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"cases": [{"id": "x", "theorem": "kernel_divergence"}]}')
    with pytest.raises(ConfigurationError):
        load_suite(str(path))


def test_teodorescu_case_needs_single_variable():
    case = VerificationCase(id="bad", theorem="teodorescu_inverse", tolerance=1e-3,
                            setup={"subspace": "H-CJ", "n": 2})
    with pytest.raises(ConfigurationError):
        check_case(case)


def test_order_estimates():
    orders = order_estimates([8, 16, 32], [1e-2, 1e-4, 0.0])
    assert orders[0] is None
    assert orders[1] == pytest.approx(math.log(100) / math.log(2))
    assert orders[2] is None


def test_run_case_is_deterministic(suite):
    case = _case(suite, "kernel_divergence_hcj_n2")
    first = SuiteRunner(seed=42).run_case(case)
    second = SuiteRunner(seed=42).run_case(case)
    assert first.passed
    assert emit([first]) == emit([second])
    assert emit([first], "csv") == emit([second], "csv")


def test_csv_layout(suite):
    report = SuiteRunner(seed=42).run_case(_case(suite, "kernel_divergence_hcj_n2"))
    lines = emit([report], "csv").decode().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    fields = lines[1].split(",")
    assert fields[0] == "kernel_divergence_hcj_n2"
    assert fields[1] == "0"
    assert fields[-1] == ""


def test_timings_recorded_only_on_request(suite):
    case = _case(suite, "kernel_divergence_hcj_n2")
    report = SuiteRunner(timings=True).run_case(case)
    assert report.rungs[0].seconds is not None
    assert orjson.loads(emit([report]))[0]["rungs"][0]["seconds"] is None
    assert orjson.loads(emit([report], timings=True))[0]["rungs"][0]["seconds"] is not None


def test_unknown_format(suite):
    with pytest.raises(ConfigurationError):
        emit([], "xml")


def test_failure_is_reported(suite, tmp_path):
    strict = _case(suite, "kernel_divergence_fd_hcj").model_copy(update={"tolerance": 1e-15})
    passing = _case(suite, "kernel_divergence_hcj_n2")
    reports = SuiteRunner().run_suite([passing, strict])
    assert first_failure(reports).case_id == "kernel_divergence_fd_hcj"
    target = write_reports(reports, "default", str(tmp_path))
    assert (target / "kernel_divergence_fd_hcj.json").exists()
    assert (target / "kernel_divergence_hcj_n2.csv").exists()
    written = orjson.loads((target / "kernel_divergence_fd_hcj.json").read_bytes())
    assert written[0]["passed"] is False


def test_converge_replaces_ladder(suite):
    case = converge_case(_case(suite, "bm_reproduce_constant"), "q", [4, 8])
    assert case.ladder == [4, 8]
    report = SuiteRunner().run_case(case)
    assert [rung.size for rung in report.rungs] == [4, 8]
    assert report.rungs[1].order_est is None or math.isfinite(report.rungs[1].order_est)


def _report(residual, std_error, monte_carlo):
    report = ConvergenceReport(case_id="mc", theorem="bm_reproduce", tolerance=0.03, monte_carlo=monte_carlo)
    report.rungs.append(RungResult(rung=0, size=20000, residual=residual, std_error=std_error))
    return report.finalize()


def test_monte_carlo_rungs_pass_within_three_sigma():
    within = _report(0.05, 0.02, monte_carlo=True)
    assert within.passed
    assert within.detail["three_sigma"] == pytest.approx(0.06)
    assert not _report(0.08, 0.02, monte_carlo=True).passed
    assert not _report(0.05, 0.02, monte_carlo=False).passed
    assert "three_sigma" not in _report(0.01, 0.0, monte_carlo=False).detail


def test_octonion_case_is_flagged_monte_carlo(suite):
    case = converge_case(_case(suite, "octonion_bm_exterior"), "samples", [2000])
    report = SuiteRunner(seed=42).run_case(case)
    assert report.monte_carlo
    assert report.detail["three_sigma"] == pytest.approx(3.0 * report.rungs[-1].std_error)
    assert not SuiteRunner(seed=42).run_case(_case(suite, "kernel_divergence_hcj_n2")).monte_carlo


def test_octonion_stress_repeats_kernel_and_reproduction_checks(suite):
    octonion = {case.theorem.value for case in suite if case.setup.subspace == "O-full"}
    assert {"kernel_divergence", "kernel_harmonic", "kernel_gradient_relation", "bm_reproduce", "bm_exterior"} <= octonion
    assert any(case.setup.variant == "associator" for case in filter_cases(suite, ["octonion_stress"]))
