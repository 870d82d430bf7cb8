import csv
import math
import subprocess
import sys

import numpy as np
import pytest

from rjgarma.cli import main


def run_cli(*argv):
    return main(list(argv))


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# ------------------------------------------------------------- simulate ----

def test_simulate_writes_expected_shape(tmp_path):
    out = tmp_path / "sim.csv"
    code = run_cli("simulate", "--family", "poisson", "--p", "0", "--q", "0",
                   "--alpha", "0", "--n", "100", "--seed", "1",
                   "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t,y"
    assert len(lines) == 101
    assert lines[1].startswith("1,")


def test_simulate_binomial_requires_m(tmp_path, capsys):
    code = run_cli("simulate", "--family", "binomial", "--n", "10",
                   "--out", str(tmp_path / "x.csv"))
    assert code == 2
    assert "requires --m" in capsys.readouterr().err


def test_simulate_rejects_mismatched_hyperparameters(tmp_path):
    assert run_cli("simulate", "--family", "poisson", "--m", "5", "--n", "10",
                   "--out", str(tmp_path / "x.csv")) == 2
    assert run_cli("simulate", "--family", "negbinomial", "--m", "5",
                   "--n", "10", "--out", str(tmp_path / "x.csv")) == 2
    assert run_cli("simulate", "--family", "binomial", "--m", "5", "--p", "1",
                   "--n", "10", "--out", str(tmp_path / "x.csv")) == 2  # no phi


def test_simulate_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["simulate", "--family", "binomial", "--m", "15", "--p", "1",
            "--phi", "0.5", "--alpha", "1.0", "--n", "200", "--seed", "42"]
    assert run_cli(*args, "--out", str(a)) == 0
    assert run_cli(*args, "--out", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()


# ------------------------------------------------------------------ fit ----

@pytest.fixture(scope="module")
def poisson_data(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "series.csv"
    run_cli("simulate", "--family", "poisson", "--alpha", "0.5", "--n", "200",
            "--seed", "7", "--out", str(path))
    return path


def test_fit_round_trips_simulate_output(poisson_data, tmp_path, capsys):
    chain_csv = tmp_path / "chain.csv"
    summary_csv = tmp_path / "summary.csv"
    code = run_cli("fit", "--data", str(poisson_data), "--family", "poisson",
                   "--pmax", "1", "--qmax", "1", "--iters", "400",
                   "--burnin", "100", "--seed", "3",
                   "--out-chain", str(chain_csv),
                   "--out-summary", str(summary_csv))
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith("model,probability")
    assert "coef,geweke_z" in out

    rows = read_csv(chain_csv)
    assert len(rows) == 400
    assert list(rows[0]) == ["iter", "alpha", "phi_1", "theta_1",
                             "ind_phi_1", "ind_theta_1"]
    meta = (tmp_path / "chain.csv.meta").read_text()
    assert "iters = 400" in meta and "seed = 3" in meta
    assert "rj_scale = 5.0" in meta

    srows = read_csv(summary_csv)
    assert [r["name"] for r in srows] == ["alpha", "phi_1", "theta_1"]


def test_fit_rejects_burnin_not_below_iters(poisson_data, tmp_path):
    assert run_cli("fit", "--data", str(poisson_data), "--family", "poisson",
                   "--iters", "100", "--burnin", "100") == 2


def test_fit_rejects_bad_data(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,y\n1,2\n2,-3\n")
    assert run_cli("fit", "--data", str(bad), "--family", "poisson",
                   "--iters", "50", "--burnin", "0") == 2
    bad.write_text("t,count\n1,2\n")
    assert run_cli("fit", "--data", str(bad), "--family", "poisson",
                   "--iters", "50", "--burnin", "0") == 2
    bad.write_text("t,y\n1,\n")
    assert run_cli("fit", "--data", str(bad), "--family", "poisson",
                   "--iters", "50", "--burnin", "0") == 2


def test_fit_rejects_binomial_y_above_m(tmp_path):
    data = tmp_path / "d.csv"
    data.write_text("y\n3\n12\n")
    assert run_cli("fit", "--data", str(data), "--family", "binomial",
                   "--m", "10", "--iters", "50", "--burnin", "0") == 2


def test_fit_is_deterministic(poisson_data, tmp_path):
    outs = []
    for tag in ("a", "b"):
        chain_csv = tmp_path / f"chain_{tag}.csv"
        run_cli("fit", "--data", str(poisson_data), "--family", "poisson",
                "--pmax", "1", "--qmax", "0", "--iters", "300",
                "--burnin", "50", "--seed", "11",
                "--out-chain", str(chain_csv))
        outs.append(chain_csv.read_bytes())
    assert outs[0] == outs[1]


def test_fit_trend_covariates_become_coefficients(tmp_path):
    data = tmp_path / "d.csv"
    rng = np.random.default_rng(5)
    with open(data, "w") as fh:
        fh.write("t,y\n")
        for t, y in enumerate(rng.poisson(3.0, 80), 1):
            fh.write(f"{t},{y}\n")
    summary_csv = tmp_path / "s.csv"
    code = run_cli("fit", "--data", str(data), "--family", "poisson",
                   "--pmax", "0", "--qmax", "0", "--iters", "200",
                   "--burnin", "0", "--trend", "--logtrend",
                   "--out-summary", str(summary_csv))
    assert code == 0
    names = [r["name"] for r in read_csv(summary_csv)]
    assert names == ["alpha", "beta_trend", "beta_logtrend"]


def test_fit_selects_log_trend_over_linear_trend(tmp_path):
    # series generated with a log-trend drift; offer both trend columns and
    # let the jump sweep pick
    import rjgarma as rj
    n = 250
    X = np.log(np.arange(1, n + 1, dtype=float)).reshape(n, 1)
    series = rj.simulate_garma(rj.SimSpec(
        family=rj.Family.negbinomial(20.0),
        params=rj.ParamState(alpha=0.3, beta=[0.8], phi=[0.2]),
        n=n, warmup=0, seed=99, X=X))
    data = tmp_path / "trend.csv"
    with open(data, "w") as fh:
        fh.write("t,y\n")
        for t, y in enumerate(series.y, 1):
            fh.write(f"{t},{int(y)}\n")
    summary_csv = tmp_path / "s.csv"
    code = run_cli("fit", "--data", str(data), "--family", "negbinomial",
                   "--k", "20", "--pmax", "2", "--qmax", "1",
                   "--iters", "8000", "--burnin", "2000", "--seed", "17",
                   "--trend", "--logtrend", "--out-summary", str(summary_csv))
    assert code == 0
    rows = {r["name"]: r for r in read_csv(summary_csv)}
    assert float(rows["beta_logtrend"]["incl_freq"]) >= 0.9
    assert float(rows["beta_logtrend"]["hpd_lo"]) > 0.0
    assert float(rows["beta_trend"]["incl_freq"]) <= 0.2


def test_fit_intercept_only_hpd_covers_log_mean(tmp_path):
    hits = 0
    for seed in range(100):
        data = tmp_path / f"d{seed}.csv"
        run_cli("simulate", "--family", "poisson", "--alpha", "0.5",
                "--n", "200", "--seed", str(seed), "--out", str(data))
        y = np.array([int(r["y"]) for r in read_csv(data)])
        summary_csv = tmp_path / f"s{seed}.csv"
        run_cli("fit", "--data", str(data), "--family", "poisson",
                "--pmax", "0", "--qmax", "0", "--iters", "3000",
                "--burnin", "500", "--seed", str(1000 + seed),
                "--out-summary", str(summary_csv))
        row = read_csv(summary_csv)[0]
        if float(row["hpd_lo"]) <= math.log(y.mean()) <= float(row["hpd_hi"]):
            hits += 1
    assert hits >= 90


def test_fit_gar1_defaults_recover_phi1(tmp_path):
    # Table-style single fit: GAR(1) binomial truth, sampler defaults
    data = tmp_path / "gar1.csv"
    run_cli("simulate", "--family", "binomial", "--m", "15", "--p", "1",
            "--phi", "-0.4", "--alpha", "-0.5", "--n", "1000",
            "--seed", "2026", "--out", str(data))
    summary_csv = tmp_path / "gar1_summary.csv"
    code = run_cli("fit", "--data", str(data), "--family", "binomial",
                   "--m", "15", "--seed", "1", "--out-summary",
                   str(summary_csv))
    assert code == 0
    phi1 = {r["name"]: r for r in read_csv(summary_csv)}["phi_1"]
    assert abs(float(phi1["mean"]) - (-0.376)) < 0.05


# ------------------------------------------------------------------- mc ----

MINI_SCENARIO = """
name = mini
family = binomial
m = 10
alpha = 0.5
phi = 0.4
n = 60
replications = 2
warmup = 20
p_max = 2
q_max = 1
iters = 80
seed = 5
sigma_grid = 0.5, 2
burn_grid = 0, 20
thin_grid = 1
"""


def test_mc_writes_reports(tmp_path):
    scenario = tmp_path / "mini.scenario"
    scenario.write_text(MINI_SCENARIO)
    out = tmp_path / "reports"
    code = run_cli("mc", "--scenario", str(scenario), "--out", str(out))
    assert code == 0
    rows = read_csv(out / "report.csv")
    assert len(rows) == 4 * 4  # cells x coefficients
    assert (out / "report.txt").read_text().startswith("Scenario: mini")


def test_mc_parallel_degree_does_not_change_bytes(tmp_path):
    scenario = tmp_path / "mini.scenario"
    scenario.write_text(MINI_SCENARIO)
    outs = []
    for par, tag in (("1", "p1"), ("4", "p4")):
        out = tmp_path / tag
        assert run_cli("mc", "--scenario", str(scenario), "--out", str(out),
                       "--parallel", par) == 0
        outs.append((out / "report.csv").read_bytes())
    assert outs[0] == outs[1]


def test_mc_reps_override(tmp_path):
    scenario = tmp_path / "mini.scenario"
    scenario.write_text(MINI_SCENARIO)
    out = tmp_path / "r"
    assert run_cli("mc", "--scenario", str(scenario), "--out", str(out),
                   "--reps", "1") == 0
    assert all(r["n_reps"] == "1" for r in read_csv(out / "report.csv"))


def test_mc_rejects_bad_scenario(tmp_path):
    scenario = tmp_path / "bad.scenario"
    scenario.write_text("family = binomial\n")  # missing m
    assert run_cli("mc", "--scenario", str(scenario),
                   "--out", str(tmp_path / "o")) == 2
    assert run_cli("mc", "--scenario", str(tmp_path / "missing.scenario"),
                   "--out", str(tmp_path / "o")) == 2


# ------------------------------------------------------------- frontend ----

def test_version_and_usage_exit_codes():
    proc = subprocess.run([sys.executable, "-m", "rjgarma.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("rjgarma ")
    proc = subprocess.run([sys.executable, "-m", "rjgarma.cli", "simulate"],
                          capture_output=True, text=True)
    assert proc.returncode == 2  # argparse usage error: missing required flags
    assert proc.stdout == ""
