import orjson
import pytest
from typer.testing import CliRunner

from app.config import configure_logging
from app.main import app
from app.models.CliConfigModel import CliConfig

runner = CliRunner()

QUIET = ["--log-level", "ERROR"]


@pytest.fixture(autouse=True)
def reset_logging():
    yield
    # the runner swaps stderr; point the root handler back at the real stream
    configure_logging("WARNING")


def test_inspect_quaternions():
    result = runner.invoke(app, [*QUIET, "algebra", "inspect", "--kind", "quaternions"])
    assert result.exit_code == 0
    payload = orjson.loads(result.stdout)
    assert payload["data"]["dim"] == 4
    assert "i*j = k" in payload["data"]["table"]
    assert payload["data"]["associative"] is True


def test_inspect_unknown_kind():
    result = runner.invoke(app, [*QUIET, "algebra", "inspect", "--kind", "sedenions"])
    assert result.exit_code == 2


def test_validate_broken_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    result = runner.invoke(app, [*QUIET, "algebra", "validate", "--file", str(path)])
    assert result.exit_code == 1


def test_eval_solid_angle_at_corner():
    result = runner.invoke(app, [*QUIET, "eval", "--op", "solid_angle", "--point", "1,1,1,1"])
    assert result.exit_code == 0
    payload = orjson.loads(result.stdout)
    assert payload["data"]["value_coeffs"] == pytest.approx(0.0625)
    assert payload["data"]["config_echo"]["seed"] == 42


def test_eval_from_config_file(tmp_path):
    path = tmp_path / "eval.json"
    path.write_bytes(orjson.dumps({"op": "cauchy_kernel", "subspace": "H-full", "n": 1, "point": [2, 0, 0, 0]}))
    result = runner.invoke(app, [*QUIET, "eval", "--config", str(path)])
    assert result.exit_code == 0
    value = orjson.loads(result.stdout)["data"]["value_coeffs"]
    assert value[0] == pytest.approx(1.0 / (16.0 * 3.141592653589793 ** 2))


def test_eval_unknown_operator():
    result = runner.invoke(app, [*QUIET, "eval", "--op", "nope"])
    assert result.exit_code == 2


def test_bad_global_flags():
    assert runner.invoke(app, ["--format", "xml", "verify"]).exit_code == 2
    assert runner.invoke(app, ["verify", "--bogus"]).exit_code == 2


def test_verify_writes_identical_reports(tmp_path):
    args = [*QUIET, "--results-dir", str(tmp_path), "verify", "--filter", "kernel_divergence_hcj_n2"]
    first = runner.invoke(app, args)
    assert first.exit_code == 0
    json_path = tmp_path / "default" / "kernel_divergence_hcj_n2.json"
    csv_path = tmp_path / "default" / "kernel_divergence_hcj_n2.csv"
    saved = json_path.read_bytes(), csv_path.read_bytes()
    second = runner.invoke(app, args)
    assert second.exit_code == 0
    assert (json_path.read_bytes(), csv_path.read_bytes()) == saved
    assert orjson.loads(saved[0])[0]["passed"] is True


def test_verify_unknown_filter(tmp_path):
    result = runner.invoke(app, [*QUIET, "--results-dir", str(tmp_path), "verify", "--filter", "no_such_tag"])
    assert result.exit_code == 2


def test_converge_prints_csv():
    result = runner.invoke(app, [*QUIET, "converge", "--case", "kernel_divergence_hcj_n2", "--ladder", "q=8,16"])
    assert result.exit_code == 0
    assert "case_id,rung,q_or_samples,residual,order_est,seconds" in result.output


def test_converge_unknown_case():
    result = runner.invoke(app, [*QUIET, "converge", "--case", "missing", "--ladder", "q=8"])
    assert result.exit_code == 2


def test_flags_override_environment(monkeypatch):
    monkeypatch.setattr("app.config.ALTERNA_SEED", "9")
    config = CliConfig.from_flags(None, 2, "csv", "ERROR", None, False)
    assert config.seed == 9
    assert config.output_format() == "csv"
    assert CliConfig.from_flags(5, None, None, "ERROR", None, False).seed == 5
    assert set(config.model_dump()) == {"command", "format", "seed", "threads", "log_level", "results_dir",
                                         "timings"}
