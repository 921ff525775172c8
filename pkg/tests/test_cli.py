import json
import subprocess
import sys

import pytest

from conetrap.cli import main, run_command
from conetrap.config import parse_config
from conetrap.tables import loads_table, read_table

GEOM = """
[geometry]
alpha_degrees = 120

[material]
eps_plus = 1.0
eps_minus = -1.9

[numerics]
n_elements = 96
m_max = 0
"""


def _write(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_exponents_golden(tmp_path, capsys):
    code = main(["exponents", "--config", _write(tmp_path, GEOM)])
    assert code == 0
    table = loads_table(capsys.readouterr().out)
    assert table.header["status"] == "ok"
    ((m, eta, D, beta0, beta_max, slope),) = table.rows
    assert m == 0
    assert eta == pytest.approx(0.9648, abs=1e-4)
    assert D == pytest.approx(-0.24098, abs=1e-4)
    assert beta0 == pytest.approx(0.5, abs=1e-6)
    assert slope == pytest.approx(1.2601, abs=1e-3)


def test_sweep_json_output_file(tmp_path):
    cfg = _write(tmp_path, GEOM + "[sweep]\ndeltas = [0.0, 0.01]\n")
    out = tmp_path / "sweep.json"
    assert main(["sweep-delta", "--config", cfg, "--out", str(out), "--format", "json"]) == 0
    doc = json.loads(out.read_text())
    assert doc["command"] == "sweep-delta"
    rows = doc["rows"]
    assert rows[0]["re_lambda"] == -0.5
    assert rows[1]["re_lambda"] == pytest.approx(-0.4874, abs=1e-3)
    assert all(r["in_window"] for r in rows)


def test_flux_check_residual(tmp_path, capsys):
    cfg = _write(tmp_path, GEOM + "[sweep]\ntaus = [0.1, 0.5]\n")
    assert main(["flux-check", "--config", cfg]) == 0
    table = loads_table(capsys.readouterr().out)
    assert len(table.rows) == 2
    assert max(table.column("residual_identity")) <= 1e-10
    assert table.column("im_surface")[0] == pytest.approx(table.column("im_surface")[1], rel=1e-9)


def test_scan_without_pairs_exits_zero(tmp_path, capsys):
    text = "[geometry]\nalpha_degrees = 90\n[numerics]\nn_elements = 48\nm_max = 1\n[sweep]\nkappas = [-2.0, -0.5]\n"
    assert main(["scan-contrast", "--config", _write(tmp_path, text)]) == 0
    table = loads_table(capsys.readouterr().out)
    assert all(v is None for v in table.column("eta_or_empty"))
    assert table.header["critical_intervals"] == []
    assert table.header["endpoints"] == []


def test_scan_reports_interval(tmp_path, capsys):
    text = "[geometry]\nalpha_degrees = 120\n[numerics]\nn_elements = 64\nm_max = 0\n[sweep]\nkappas = [-3.0, -2.0, -1.5]\n"
    assert main(["scan-contrast", "--config", _write(tmp_path, text)]) == 0
    table = loads_table(capsys.readouterr().out)
    assert table.column("eta_or_empty")[0] is None
    assert table.column("eta_or_empty")[1] is not None
    assert len(table.header["endpoints"]) == 1
    (interval,) = table.header["critical_intervals"]
    assert interval == {"mode_m": 0, "kappa_min": -2.0, "kappa_max": -1.5}


def test_jobs_env_gives_identical_output(tmp_path, monkeypatch):
    cfg = _write(tmp_path, GEOM.replace("m_max = 0", "m_max = 2"))
    main(["exponents", "--config", cfg, "--out", str(tmp_path / "a.csv")])
    monkeypatch.setenv("CONETRAP_JOBS", "3")
    main(["exponents", "--config", cfg, "--out", str(tmp_path / "b.csv"), "--jobs", "1"])
    assert (tmp_path / "a.csv").read_text() == (tmp_path / "b.csv").read_text()


def test_bad_jobs_env(tmp_path, monkeypatch):
    monkeypatch.setenv("CONETRAP_JOBS", "many")
    with pytest.raises(SystemExit):
        main(["exponents", "--config", _write(tmp_path, GEOM)])


def test_config_errors_exit_one(tmp_path, capsys):
    assert main(["exponents", "--config", _write(tmp_path, "[geometry]\nalpha_degrees = 120\n")]) == 1
    assert "material" in capsys.readouterr().err
    assert main(["exponents", "--config", str(tmp_path / "missing.toml")]) == 1
    assert main(["exponents", "--config", _write(tmp_path, "[geometry\n")]) == 1


def test_sweep_without_pair_is_empty():
    # a lossy run on the right-angle cap has no pair to follow: empty table, exit 0
    cfg = parse_config("[geometry]\nalpha_degrees = 90\n[material]\neps_plus = 1\neps_minus = -2\n[numerics]\nn_elements = 32\nm_max = 0\n[sweep]\ndeltas = [0, 0.1]\n", "sweep-delta")
    table, code = run_command(cfg)
    assert code == 0 and table.rows == []


def test_module_error_status(monkeypatch):
    from conetrap import cli
    from conetrap.errors import EndpointDegeneracy

    def boom(cfg, table, map_fn, flags):
        raise EndpointDegeneracy("forced")

    monkeypatch.setitem(cli._RUNNERS, "exponents", boom)
    table, code = run_command(parse_config(GEOM))
    assert code == 1
    assert table.header["status"] == "error"
    assert table.header["error_code"] == "endpoint_degeneracy"


def test_degenerate_flag_exits_two(monkeypatch):
    from conetrap import cli

    def flagged(cfg, table, map_fn, flags):
        flags.add("endpoint_degeneracy")

    monkeypatch.setitem(cli._RUNNERS, "exponents", flagged)
    table, code = run_command(parse_config(GEOM))
    assert code == 2
    assert table.header["status"] == "degenerate"
    assert table.header["warnings"] == ["endpoint_degeneracy"]


def test_console_entry_point(tmp_path):
    out = tmp_path / "t.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "conetrap.cli", "exponents", "--config", _write(tmp_path, GEOM), "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert read_table(out).header["command"] == "exponents"
