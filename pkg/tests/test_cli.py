import csv
import json

import pytest

from weakcyc.circle import load_measure
from weakcyc.cli import EXIT_FAIL, EXIT_INTERNAL, EXIT_OK, EXIT_USAGE, main


def load(path):
    d = json.loads(path.read_text())
    d.pop("timestamp")
    return d


def test_criteria_writes_report_and_series(tmp_path):
    rc = main(["--out", str(tmp_path), "criteria", "--family", "chan-sanders", "--stat", "hyper",
               "--kmax", "2", "--horizon", "200"])
    assert rc == EXIT_OK
    rep = load(tmp_path / "criteria.json")
    assert rep["verdict"] == "violated"
    with open(tmp_path / "criteria_series.csv") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) > 1


def test_reports_are_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["--out", str(d), "criteria", "--family", "prop19", "--p", "3", "--horizon", "300"]) == EXIT_OK
    assert load(a / "criteria.json") == load(b / "criteria.json")
    assert (a / "criteria_series.csv").read_bytes() == (b / "criteria_series.csv").read_bytes()


def test_certify_pass_and_fail(tmp_path):
    assert main(["--out", str(tmp_path / "p3"), "certify", "--cert", "theorem15", "--p", "3",
                 "--horizon", "20000"]) == EXIT_OK
    assert main(["--out", str(tmp_path / "p2"), "certify", "--cert", "theorem15", "--p", "2",
                 "--horizon", "20000"]) == EXIT_FAIL
    rep = load(tmp_path / "p3" / "certify.json")
    assert rep["overall"] is True and set(rep["conditions"]) == {"W1", "W2", "W3", "W4"}


def test_certify_closedness(tmp_path):
    assert main(["--out", str(tmp_path), "certify", "--cert", "closedness", "--space", "banach",
                 "--growth", "2", "0", "--horizon", "200"]) == EXIT_OK
    assert main(["--out", str(tmp_path), "certify", "--cert", "closedness", "--space", "hilbert",
                 "--growth", "1", "0.5", "--horizon", "2000"]) == EXIT_FAIL


def test_certify_generic_horizon_limit_is_a_usage_error(tmp_path):
    assert main(["--out", str(tmp_path), "certify", "--cert", "prop19", "--p", "3",
                 "--horizon", "100000"]) == EXIT_USAGE


def test_measure_small_run(tmp_path):
    assert main(["--out", str(tmp_path), "measure", "--stages", "2", "--h-count", "2"]) == EXIT_OK
    mu = load_measure((tmp_path / "measure.txt").read_text())
    assert mu.is_probability()
    rep = load(tmp_path / "measure.json")
    assert rep
    assert (tmp_path / "measure_checks.csv").exists() and (tmp_path / "measure_fourier.csv").exists()


def test_measure_budget_failure(tmp_path):
    rc = main(["--out", str(tmp_path), "measure", "--stages", "5", "--time-budget", "0.000001"])
    assert rc == EXIT_INTERNAL
    assert "error" in load(tmp_path / "measure.json")


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"family": "unweighted", "horizon": 50, "kmax": 1}))
    assert main(["--config", str(cfg), "--out", str(tmp_path), "criteria", "--horizon", "60"]) == EXIT_OK
    rep = load(tmp_path / "criteria.json")
    assert rep["params"]["horizon"] == 60


@pytest.mark.parametrize("argv", [
    ["criteria", "--bogus"],
    ["nosuch"],
    ["measure", "--stages", "0"],
    ["measure", "--delta", "2"],
    ["certify", "--cert", "closedness", "--growth", "-1", "0"],
])
def test_usage_errors(tmp_path, argv):
    assert main(["--out", str(tmp_path)] + argv) == EXIT_USAGE


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"nonsense": 1}))
    assert main(["--config", str(cfg), "--out", str(tmp_path), "criteria"]) == EXIT_USAGE
