import json
import subprocess

import numpy as np
import pytest

from rankspectra import __version__
from rankspectra.cli import main
from rankspectra.data import monotone_transform, sample_matrix
from rankspectra.errors import DomainError, ValidationError
from rankspectra.faststats import correlation_matrix
from rankspectra.harness import (
    ExperimentConfig,
    run_experiment,
    run_stieltjes_convergence,
    run_variance_scan,
    validate_summary,
)
from rankspectra.kernels import kernel_eval
from rankspectra.limitlaw import corollary_radius, sc_stieltjes

TINY = dict(statistic="hoeffding-d", n=20, p=10, seed=3)


def test_config_validation():
    with pytest.raises(ValidationError):
        ExperimentConfig(statistic="hoeffding-d", n=4, p=10)
    with pytest.raises(ValidationError):
        ExperimentConfig(statistic="hoeffding-d", n=20, p=1)
    with pytest.raises(ValidationError):
        ExperimentConfig(statistic="hoeffding-d", n=20, p=10, bins=5)
    with pytest.raises(DomainError):
        ExperimentConfig(statistic="hoeffding-d", n=20, p=10, z_probes=(1.0,))
    with pytest.raises(ValidationError):
        ExperimentConfig(statistic="hoeffding-d", n=20, p=10, threads=0)
    with pytest.raises(ValidationError):
        ExperimentConfig(statistic="spearman", n=20, p=10)


def test_run_experiment_artifacts(tmp_path):
    cfg = ExperimentConfig(**TINY, out_dir=tmp_path, z_probes=(1j, 2j))
    result = run_experiment(cfg)
    assert result.gamma == 0.5
    assert result.radius == corollary_radius("hoeffding-d", 0.5)
    assert result.version == __version__

    eig_lines = (tmp_path / "eigenvalues.csv").read_text().splitlines()
    assert eig_lines[0] == "index,eigenvalue"
    eigs = [float(line.split(",")[1]) for line in eig_lines[1:]]
    assert len(eigs) == 10 and all(a >= b for a, b in zip(eigs, eigs[1:]))

    hist_lines = (tmp_path / "histogram.csv").read_text().splitlines()
    assert hist_lines[0] == "bin_lo,bin_hi,density,count"
    assert len(hist_lines) == 1 + cfg.bins

    st_lines = (tmp_path / "stieltjes.csv").read_text().splitlines()
    assert st_lines[0] == "re_z,im_z,re_s,im_s,re_m_theta,im_m_theta"
    assert len(st_lines) == 3

    summary = json.loads((tmp_path / "summary.json").read_text())
    validate_summary(summary)
    assert summary["gamma"] == 0.5
    assert summary["radius"] == result.radius
    assert len(summary["stieltjes_gaps"]) == 2


def test_run_experiment_deterministic(tmp_path):
    names = ("eigenvalues.csv", "histogram.csv", "stieltjes.csv")
    run_experiment(ExperimentConfig(**TINY, out_dir=tmp_path / "a"))
    run_experiment(ExperimentConfig(**TINY, out_dir=tmp_path / "b"))
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_run_experiment_thread_count_invariant(tmp_path):
    run_experiment(ExperimentConfig(**TINY, out_dir=tmp_path / "t1", threads=1))
    run_experiment(ExperimentConfig(**TINY, out_dir=tmp_path / "t2", threads=2))
    assert (tmp_path / "t1" / "eigenvalues.csv").read_bytes() == (
        tmp_path / "t2" / "eigenvalues.csv"
    ).read_bytes()


def test_monotone_margin_invariance_end_to_end():
    m = sample_matrix(25, 8, "uniform01", 9)
    base = correlation_matrix("hoeffding-d", m)
    warped = correlation_matrix("hoeffding-d", monotone_transform(m, "exp"))
    assert np.array_equal(base.entries, warped.entries)
    assert np.array_equal(
        np.linalg.eigvalsh(base.entries), np.linalg.eigvalsh(warped.entries)
    )


def test_minimal_bkr_runs_on_oracle_path():
    m = sample_matrix(6, 2, "uniform01", 30)
    cm = correlation_matrix("bkr-r", m)
    pts = np.stack([m.values[:, 0], m.values[:, 1]], axis=1)
    assert cm.entries[0, 1] == kernel_eval("bkr-r", pts)
    cfg = ExperimentConfig(statistic="bkr-r", n=6, p=2, seed=30)
    assert run_experiment(cfg).radius == corollary_radius("bkr-r", 2 / 6)


def test_truncation_mode(tmp_path):
    cfg = ExperimentConfig(**TINY, truncation_T=5, out_dir=tmp_path)
    result = run_experiment(cfg)
    summary = json.loads((tmp_path / "summary.json").read_text())
    validate_summary(summary)
    assert summary["ks"] == result.ks


def test_variance_scan_contract():
    scan = run_variance_scan("hoeffding-d", (20, 40), 1.0, 50, 1j, 3)
    assert [r.p for r in scan.rows] == [20, 40]
    assert all(r.variance > 0 for r in scan.rows)
    again = run_variance_scan("hoeffding-d", (20, 40), 1.0, 50, 1j, 3)
    assert [r.variance for r in again.rows] == [r.variance for r in scan.rows]
    with pytest.raises(ValidationError):
        run_variance_scan("hoeffding-d", (20,), 1.0, 10, 1j, 3)
    with pytest.raises(ValidationError):
        run_variance_scan("hoeffding-d", (4,), 1.0, 50, 1j, 3)


def test_stieltjes_convergence_contract():
    rows = run_stieltjes_convergence("hoeffding-d", 30, 30, 20, (1j, 3j), 5)
    assert len(rows) == 2
    assert all(r.gap >= 0 for r in rows)
    with pytest.raises(ValidationError):
        run_stieltjes_convergence("hoeffding-d", 30, 30, 5, (1j,), 5)


def test_stieltjes_wrong_law_control():
    rows = run_stieltjes_convergence("hoeffding-d", 100, 100, 20, (1j,), 5)
    own = rows[0].gap
    wrong = abs(rows[0].mean_s - sc_stieltjes(1j, corollary_radius("bdy-taustar", 1.0)))
    assert wrong >= 3 * own


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------


def test_cli_experiment_and_exit_codes(tmp_path, capsys):
    out = tmp_path / "res"
    assert main(["--stat", "hoeffding-d", "--n", "20", "--p", "10", "--seed", "3",
                 "--out", str(out)]) == 0
    assert (out / "summary.json").exists()
    assert "radius=" in capsys.readouterr().out

    # validation error: n below the kernel order
    assert main(["--stat", "hoeffding-d", "--n", "4", "--p", "10"]) == 2
    # missing required options
    assert main(["--stat", "hoeffding-d"]) == 2
    # unparseable z
    assert main(["--stat", "hoeffding-d", "--n", "20", "--p", "10", "--z", "nope"]) == 2


def test_cli_unknown_stat_exits_2():
    with pytest.raises(SystemExit) as err:
        main(["--stat", "pearson", "--n", "20", "--p", "10"])
    assert err.value.code == 2


def test_cli_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    rc = main(["--stat", "hoeffding-d", "--n", "20", "--p", "10",
               "--out", str(blocker / "sub")])
    assert rc == 4


def test_cli_config_file_and_override(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("stat=hoeffding-d\nn=20\np=10\nseed=3\nbins=12\n")
    out1 = tmp_path / "o1"
    assert main([str(cfg), "--out", str(out1)]) == 0
    summary = json.loads((out1 / "summary.json").read_text())
    assert summary["seed"] == 3

    out2 = tmp_path / "o2"
    assert main([str(cfg), "--seed", "8", "--out", str(out2)]) == 0
    assert json.loads((out2 / "summary.json").read_text())["seed"] == 8

    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense=1\n")
    assert main([str(bad)]) == 2


def test_cli_env_threads(tmp_path, monkeypatch):
    monkeypatch.setenv("RANKSPECTRA_THREADS", "1")
    out = tmp_path / "envrun"
    assert main(["--stat", "hoeffding-d", "--n", "20", "--p", "10", "--out", str(out)]) == 0
    monkeypatch.setenv("RANKSPECTRA_THREADS", "zebra")
    assert main(["--stat", "hoeffding-d", "--n", "20", "--p", "10"]) == 2


def test_cli_scan_modes(tmp_path, capsys):
    out = tmp_path / "scan"
    assert main(["--scan", "variance", "--stat", "hoeffding-d", "--p", "20,30",
                 "--trials", "50", "--seed", "2", "--out", str(out)]) == 0
    text = (out / "variance_scan.csv").read_text().splitlines()
    assert text[0] == "p,n,variance" and len(text) == 3
    assert "slope" in capsys.readouterr().out

    assert main(["--scan", "stieltjes", "--stat", "hoeffding-d", "--n", "25",
                 "--p", "12", "--trials", "20", "--seed", "2", "--out", str(out)]) == 0
    text = (out / "stieltjes_scan.csv").read_text().splitlines()
    assert text[0] == "re_z,im_z,re_mean_s,im_mean_s,re_m_theta,im_m_theta,gap"


def test_cli_installed_entry_point(tmp_path):
    # the console script is the published interface; exercise it end to end
    out = tmp_path / "sub"
    proc = subprocess.run(
        ["rankspectra", "--stat", "bdy-taustar", "--n", "15", "--p", "6",
         "--seed", "1", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (out / "eigenvalues.csv").exists()
