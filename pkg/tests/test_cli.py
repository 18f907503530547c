import json

import numpy as np
import pytest

from cqed_stirap.cli import main
from cqed_stirap.csvio import read_csv


def write(tmp_path, text, name="c.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_table_default(tmp_path):
    status = main(["table", "--out", str(tmp_path)])
    header, rows = read_csv(tmp_path / "table1_comparison.csv")
    assert header == ["quantity", "computed", "paper_value", "abs_dev", "pass"]
    assert len(rows) == 12
    matrix_rows = {r[0]: r for r in rows if not r[0].startswith("gamma")}
    assert all(r[4] == "true" for r in matrix_rows.values())
    # exit status follows the pass column
    assert status == (0 if all(r[4] == "true" for r in rows) else 1)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "table" and manifest["deterministic"] is True
    assert manifest["config_path"] is None and manifest["version"]


def test_table_outside_nesting(tmp_path):
    cfg = write(tmp_path, "[system]\nomega_d_ghz = 5.0\n")
    out = tmp_path / "o"
    assert main(["table", "--config", cfg, "--out", str(out)]) == 1
    _, rows = read_csv(out / "table1_comparison.csv")
    assert rows[-1][0] == "nesting_ok" and rows[-1][4] == "false"


def test_table_negative_kappa(tmp_path, capsys):
    cfg = write(tmp_path, "[system]\nkappa_mhz = -3\n")
    out = tmp_path / "o"
    assert main(["table", "--config", cfg, "--out", str(out)]) == 2
    assert not (out / "table1_comparison.csv").exists()


def test_run_outputs(tmp_path):
    cfg = write(tmp_path, "[drive]\ncd_enabled = true\n[integrator]\nt0_ns = -60\ntf_ns = 60\n")
    assert main(["run", "--config", cfg, "--out", str(tmp_path)]) == 0
    header, rows = read_csv(tmp_path / "populations.csv")
    assert header == ["t_ns", "P1", "P2", "P3"]
    rows = np.array(rows)
    assert len(rows) == 12001 and rows[0, 0] == -60.0 and rows[-1, 0] == 60.0
    np.testing.assert_allclose(rows[:, 1:].sum(axis=1), 1.0, atol=1e-8)
    _, summary = read_csv(tmp_path / "summary.csv")
    summary = dict(summary)
    assert summary["final_p2"] == rows[-1, 2]
    assert summary["fidelity_unsquared"] == pytest.approx(np.sqrt(summary["final_p2"]), abs=1e-9)
    assert summary["cd_enabled"] == "true" and summary["status"] == "ok"


def test_run_zero_drive(tmp_path):
    cfg = write(tmp_path, "[pulses]\nomega_p_mhz = 0\nomega_s_mhz = 0\n[integrator]\nt0_ns = -1\ntf_ns = 1\n")
    assert main(["run", "--config", cfg, "--out", str(tmp_path)]) == 0
    _, rows = read_csv(tmp_path / "populations.csv")
    assert all(r[1:] == [1.0, 0.0, 0.0] for r in rows)


def test_run_divergence_exit(tmp_path):
    cfg = write(tmp_path, "[pulses]\nomega_p_mhz = 2000\nomega_s_mhz = 2000\n"
                          "[integrator]\nt0_ns = -100\ntf_ns = 100\ndt_ns = 2\n")
    assert main(["run", "--config", cfg, "--out", str(tmp_path)]) == 1
    _, summary = read_csv(tmp_path / "summary.csv")
    assert dict(summary)["status"] == "diverged"


def test_sweep_single_cell_matches_run(tmp_path):
    base = "[integrator]\nt0_ns = -60\ntf_ns = 60\n"
    cfg = write(tmp_path, base + "[sweep]\naxis1 = sigma\naxis1_values = 20\n"
                                 "axis2 = ts_over_sigma\naxis2_values = 1.5\n")
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "s")]) == 0
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "r")]) == 0
    header, rows = read_csv(tmp_path / "s" / "sweep.csv")
    assert header == ["axis1_name", "axis1_value", "axis2_name", "axis2_value", "metric", "value"]
    assert rows == [["sigma", 20.0, "ts_over_sigma", 1.5, "final_p2", rows[0][5]]]
    summary = dict(read_csv(tmp_path / "r" / "summary.csv")[1])
    assert rows[0][5] == pytest.approx(summary["final_p2"], abs=1e-12)


def test_sweep_order_and_metric_flag(tmp_path):
    cfg = write(tmp_path, "[integrator]\nt0_ns = -60\ntf_ns = 60\ndt_ns = 0.02\n"
                          "[sweep]\naxis1 = delta_1\naxis1_values = -2, 2\naxis2 = delta_2\n"
                          "axis2_values = -1, 0, 1\n")
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path), "--metric", "max_p2",
                 "--threads", "2"]) == 0
    _, rows = read_csv(tmp_path / "sweep.csv")
    assert [(r[1], r[3]) for r in rows] == [(a, b) for a in (-2.0, 2.0) for b in (-1.0, 0.0, 1.0)]
    assert {r[4] for r in rows} == {"max_p2"}


def test_sweep_without_section(tmp_path):
    assert main(["sweep", "--out", str(tmp_path)]) == 2


def test_sweep_empty_axis(tmp_path):
    cfg = write(tmp_path, "[sweep]\naxis1 = sigma\naxis1_values =\naxis2 = delta_1\naxis2_values = 0\n")
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_bad_threads(tmp_path):
    assert main(["sweep", "--out", str(tmp_path), "--threads", "0"]) == 2


def test_unknown_command():
    with pytest.raises(SystemExit):
        main(["plot"])
