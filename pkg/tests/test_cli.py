import csv
import json
import math

import pytest

from bakerbound import epsilon, lower_bound
from bakerbound.cli import main
from bakerbound.engine import AxiomParams, certificate


def run(capsys, *argv) -> tuple[int, str]:
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_certificate_case3(capsys):
    code, out = run(
        capsys, "certificate", "--case", "3", "--m", "1", "--a", "1",
        "--c", "1", "--d", "0", "--Nmin", "1", "--json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["constants"]["A3"] == 2.0
    assert payload["constants"]["B3"] == 1.0
    assert payload["F"] == pytest.approx(1 / (2 * math.e), rel=1e-14)
    assert payload["G"] == pytest.approx(math.e, rel=1e-14)
    assert payload["exponent"] == 1.0


def test_certificate_text_output(capsys):
    code, out = run(
        capsys, "certificate", "--case", "1", "--m", "1", "--a", "1",
        "--c", "2",
    )
    assert code == 0
    assert "exponent" in out and "0.5" in out


def test_witness_pi(capsys, tmp_path):
    out_file = tmp_path / "w.json"
    code, _ = run(
        capsys, "witness", "--D", "1", "--theta", "3.14159265358979",
        "--H", "1", "--out", str(out_file),
    )
    assert code == 0
    payload = json.loads(out_file.read_text())
    assert payload["value"] == pytest.approx(0.14159265358979, rel=1e-9)
    assert payload["radius"] == pytest.approx(4 / math.pi, rel=1e-12)


def test_epsilon_curve_zero_and_round_trip(capsys, tmp_path):
    out_file = tmp_path / "curve.csv"
    code, _ = run(
        capsys, "epsilon-curve", "--case", "1", "--m", "1", "--a", "1",
        "--c", "2", "--Nmin", "1", "--hmax", "1e8", "--points", "20",
        "--out", str(out_file),
    )
    assert code == 0
    text = out_file.read_text()
    assert "\r" not in text
    rows = list(csv.DictReader(text.splitlines()))
    assert len(rows) == 20
    cert = certificate(AxiomParams(m=1, case=1, a=1.0, c=2.0, n_min=1))
    for row in rows:
        h = float(row["H"])
        assert float(row["epsilon"]) == 0.0
        recomputed = lower_bound(cert, [h / 2.0])
        assert float(row["bound"]) == pytest.approx(recomputed, rel=1e-12)
        assert float(row["epsilon"]) == pytest.approx(
            epsilon(cert, h), abs=1e-12
        )


def test_corollary_curve(capsys, tmp_path):
    out_file = tmp_path / "cor.csv"
    code, _ = run(
        capsys, "corollary-curve", "--case", "2", "--m", "1", "--a", "1",
        "--c", "2", "--Nmin", "1", "--hmin", "1e7", "--hmax", "1e12",
        "--points", "10", "--out", str(out_file),
    )
    assert code == 0
    rows = list(csv.DictReader(out_file.read_text().splitlines()))
    for row in rows:
        assert float(row["corollary"]) <= float(row["bound"]) * (1 + 1e-9)


def test_schedule_json(capsys):
    code, out = run(
        capsys, "schedule", "--case", "1", "--m", "1", "--a", "1",
        "--c", "2", "--H", "28",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["half_ok"] is True
    assert payload["N_used"] == sum(payload["sigma"]) + 1
    assert abs(sum(payload["s"]) - payload["S"]) <= 1e-9


def test_pade_fit_chain(capsys, tmp_path):
    paths = []
    for n in range(2, 8):
        p = tmp_path / f"t{n}.json"
        code, _ = run(
            capsys, "pade", "--system", "log", "--z0", "1/2",
            "--n", str(n), "--out", str(p),
        )
        assert code == 0
        paths.append(str(p))
    code, out = run(capsys, "fit", "--tables", *paths, "--case", "1")
    assert code == 0
    payload = json.loads(out)
    assert payload["params"]["a"] > 0
    assert payload["params"]["c"] > 0
    assert payload["params"]["n_min"] == 2


def test_shidlovskii_cmd(capsys):
    code, out = run(
        capsys, "shidlovskii", "--theta", "1.41421356237",
        "--theta", "1.73205080757", "--H", "6",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["value"] <= payload["radius"]


def test_verify_cmd(capsys, tmp_path):
    prefix = tmp_path / "report"
    code, out = run(
        capsys, "verify", "--system", "log", "--z0", "1/2", "--case", "1",
        "--n-max", "10", "--height-max", "40", "--grid-points", "5",
        "--out", str(prefix),
    )
    assert code == 0
    assert "failures=0" in out
    data = json.loads((tmp_path / "report.json").read_text())
    assert data["failures"] == 0
    csv_rows = list(
        csv.DictReader((tmp_path / "report.csv").read_text().splitlines())
    )
    assert len(csv_rows) == len(data["rows"])


def test_verify_cmd_failure_exit_code(capsys, tmp_path):
    # a deliberately false parameter record: nearly flat exponent and a
    # large prefactor exceed the oracle on admissible heights
    pfile = tmp_path / "params.json"
    pfile.write_text(json.dumps({
        "m": 1, "case": 1, "a": 0.001, "c": 5.0, "n_min": 100,
    }))
    code, out = run(
        capsys, "verify", "--system", "log", "--z0", "1/2",
        "--params", str(pfile), "--n-max", "6", "--height-max", "100",
        "--grid-points", "4",
    )
    assert code == 3
    assert "fail" in out


def test_usage_error_exit_code(capsys):
    assert main(["no-such-command"]) == 1
    assert main([]) == 1


def test_domain_error_exit_code(capsys):
    code = main(["certificate", "--case", "1", "--m", "1", "--a", "0",
                 "--c", "1"])
    assert code == 2
    err = capsys.readouterr().err
    assert "a must be positive" in err


def test_cap_exceeded_exit_code(capsys):
    code = main([
        "witness", "--D", "1", "--theta", "1.5,0.25", "--theta", "2.5",
        "--theta", "0.7,1.1", "--H", "40,40,40", "--cap", "1000",
    ])
    assert code == 4


def test_config_file_and_env(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# parameters\ncase = 3\nm = 1\na = 1\nc = 1\nNmin = 1\n",
        encoding="utf-8",
    )
    code, out = run(
        capsys, "--config", str(cfg), "certificate", "--json",
    )
    assert code == 0
    assert json.loads(out)["constants"]["A3"] == 2.0
    # explicit flag beats the file
    code, out = run(
        capsys, "--config", str(cfg), "certificate", "--json", "--a", "2",
    )
    assert json.loads(out)["constants"]["A3"] == 4.0
    # environment variable switches on extended rendering
    monkeypatch.setenv("BB_PRECISION", "extended")
    code, out = run(
        capsys, "--config", str(cfg), "certificate", "--json",
    )
    assert code == 0
    assert "digits30" in json.loads(out)
    monkeypatch.setenv("BB_PRECISION", "bogus")
    assert main(["--config", str(cfg), "certificate", "--json"]) == 2
