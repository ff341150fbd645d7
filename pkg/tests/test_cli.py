import json
import os

import numpy as np
import pytest

from dgadapt.cli import EXIT_CONFIG, EXIT_DIVERGED, EXIT_OK, main


def read_csv(path):
    with open(path) as fh:
        lines = fh.read().strip().splitlines()
    assert lines[0].startswith("# schema=dgadapt.")
    header = lines[1].split(",")
    rows = [line.split(",") for line in lines[2:]]
    return header, rows


def test_list_command(capsys):
    assert main(["list"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "density_wave_1d" in out and "kpp" in out


def test_run_density_wave_defaults(tmp_path):
    code = main(["run", "--testcase", "density_wave_1d",
                 "--set", "cells=8", "--set", "t_final=0.05",
                 "--output-dir", str(tmp_path)])
    assert code == EXIT_OK
    header, rows = read_csv(tmp_path / "timeseries.csv")
    assert header == ["t", "total_entropy", "entropy_drift", "min_rho",
                      "min_p", "n_wf", "n_fd"]
    assert len(rows) > 2
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["status"] == "completed"
    assert report["t_end"] == pytest.approx(0.05)
    assert (tmp_path / "solution_final.npz").exists()
    assert (tmp_path / "stages.csv").exists()
    assert (tmp_path / "cost.csv").exists()


def test_run_config_file_and_override(tmp_path):
    cfg = tmp_path / "case.ini"
    cfg.write_text("""
[run]
testcase = burgers_sine
cells = 16
t_final = 0.02
volume_mode = fd
""")
    out = tmp_path / "out"
    code = main(["run", str(cfg), "--output-dir", str(out),
                 "--set", "t_final=0.01"])
    assert code == EXIT_OK
    report = json.loads((out / "report.json").read_text())
    assert report["t_end"] == pytest.approx(0.01)


def test_run_reports_divergence_with_crash_time(tmp_path):
    # density wave with a far-too-large fixed step blows up -> exit code 3
    code = main(["run", "--testcase", "density_wave_1d",
                 "--set", "cells=8", "--set", "dt=0.5",
                 "--set", "t_final=5.0", "--output-dir", str(tmp_path)])
    assert code == EXIT_DIVERGED
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["status"] == "diverged"
    assert np.isfinite(report["t_crash"])


def test_bad_config_exit_codes(tmp_path):
    assert main(["run", "--testcase", "not_a_case"]) == EXIT_CONFIG
    assert main(["run", "--testcase", "kpp",
                 "--set", "volume_mode=nope"]) == EXIT_CONFIG
    bad = tmp_path / "bad.ini"
    bad.write_text("[run\ntestcase=")
    assert main(["run", str(bad)]) == EXIT_CONFIG


def test_convergence_command(tmp_path):
    code = main(["convergence", "--testcase", "density_wave_1d",
                 "--set", "grids=4,8", "--set", "t_final=0.05",
                 "--set", "volume_mode=fd", "--output-dir", str(tmp_path)])
    assert code == EXIT_OK
    header, rows = read_csv(tmp_path / "errors.csv")
    assert header == ["grid", "l2", "linf", "order_l2", "order_linf"]
    assert [int(r[0]) for r in rows] == [4, 8]
    assert float(rows[1][1]) < float(rows[0][1])  # error decreases


def test_spectrum_command(tmp_path):
    code = main(["spectrum", "--testcase", "density_wave_1d",
                 "--set", "cells=3", "--set", "p=2",
                 "--set", "modes=wf,fd", "--output-dir", str(tmp_path)])
    assert code == EXIT_OK
    summary = json.loads((tmp_path / "spectrum_summary.json").read_text())
    assert set(summary) == {"wf", "fd"}
    header, rows = read_csv(tmp_path / "spectrum_wf.csv")
    assert header == ["re", "im"]
    assert len(rows) == 3 * 3 * 3  # cells * nodes * nvars


def test_bench_flux_command(tmp_path):
    code = main(["bench-flux", "--n", "2000", "--seed", "1",
                 "--output-dir", str(tmp_path)])
    assert code == EXIT_OK
    header, rows = read_csv(tmp_path / "bench_flux.csv")
    assert header == ["equation", "flux", "ns_per_eval"]
    assert len(rows) == 6
    assert all(float(r[2]) > 0 for r in rows)


def test_bench_flux_rejects_zero_n():
    assert main(["bench-flux", "--n", "0"]) == EXIT_CONFIG


def test_output_dir_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("DGADAPT_OUTPUT_DIR", str(tmp_path / "env_out"))
    code = main(["run", "--testcase", "density_wave_1d",
                 "--set", "cells=4", "--set", "t_final=0.01"])
    assert code == EXIT_OK
    assert (tmp_path / "env_out" / "report.json").exists()


def test_deterministic_run_is_reproducible(tmp_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        code = main(["run", "--testcase", "burgers_sine",
                     "--set", "cells=16", "--set", "t_final=0.02",
                     "--deterministic", "--output-dir", str(out)])
        assert code == EXIT_OK
        outs.append((out / "timeseries.csv").read_bytes())
    assert outs[0] == outs[1]
