import csv
import json
import math

import pytest

from torusflow.cli import main, CONV_COLUMNS, TRAJ_COLUMNS


def run_cli(*argv):
    return main(list(argv))


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def test_tableau_ok_exit():
    assert run_cli("tableau", "ierk35", "--param", "1.2") == 0
    assert run_cli("tableau", "imex_euler") == 0


def test_tableau_outside_pd_range_fails(capsys):
    assert run_cli("tableau", "ierk23", "--param", "0.05") == 2
    assert "positive-definite" in capsys.readouterr().err


def test_tableau_unknown_name():
    assert run_cli("tableau", "rk4") == 2


def test_tableau_degenerate_param():
    assert run_cli("tableau", "ierk23", "--param", "1.0") == 2


def test_tableau_json_report(tmp_path):
    out = tmp_path / "rep.json"
    assert run_cli("tableau", "ierk47", "--param", "2", "--json", str(out)) == 0
    rep = json.loads(out.read_text())
    assert rep["certified_order"] == 4
    assert rep["positive_definite"] is True
    assert len(rep["order_conditions"]) == 20


def test_converge_csv(tmp_path):
    out = tmp_path / "conv.csv"
    rc = run_cli("converge", "--case", "example1", "--tableau", "ierk23:0.35",
                 "--taus", "0.025,0.0125", "--grid-m", "16", "--final-time", "0.5",
                 "--output", str(out))
    assert rc == 0
    header, rows = read_csv(str(out))
    assert header == CONV_COLUMNS
    assert len(rows) == 2
    assert rows[0][5] == ""  # first tau has no rate
    assert abs(float(rows[1][5]) - 2.0) < 0.3


def test_converge_single_tau_empty_rate(tmp_path):
    out = tmp_path / "conv1.csv"
    rc = run_cli("converge", "--case", "example1", "--tableau", "imex_euler",
                 "--taus", "0.05", "--grid-m", "16", "--final-time", "0.25",
                 "--output", str(out))
    assert rc == 0
    _, rows = read_csv(str(out))
    assert len(rows) == 1 and rows[0][5] == ""


def test_converge_rejects_unstable_param():
    rc = run_cli("converge", "--case", "example1", "--tableau", "ierk23:0.05",
                 "--taus", "0.05", "--grid-m", "16")
    assert rc == 2


def test_converge_allow_unstable():
    rc = run_cli("converge", "--case", "example1", "--tableau", "ierk23:0.05",
                 "--taus", "0.05", "--grid-m", "16", "--final-time", "0.1",
                 "--allow-unstable")
    assert rc == 0


def test_adaptive_outputs(tmp_path):
    traj = tmp_path / "traj.csv"
    summ = tmp_path / "sum.json"
    ref = tmp_path / "ref.csv"
    rc = run_cli("adaptive", "--case", "example2", "--tableau", "ierk23:0.2",
                 "--strategy", "ats-ldlb", "--tau-max", "0.5", "--grid-m", "16",
                 "--final-time", "5.0", "--output", str(traj),
                 "--summary", str(summ), "--reference-out", str(ref))
    assert rc == 0
    header, rows = read_csv(str(traj))
    assert header == TRAJ_COLUMNS
    assert len(rows) > 10
    s = json.loads(summ.read_text())
    assert set(s) >= {"case", "tableau", "strategy", "max_err_mix", "steps",
                      "rejects", "seed"}
    assert s["steps"] == int(rows[-1][0])
    rheader, rrows = read_csv(str(ref))
    assert rheader == ["t", "f", "enstrophy_ref"]
    # reference enstrophy equals 2 pi^2 f^2 row by row
    for t, f, ens in rrows[:20]:
        assert abs(float(ens) - 2 * math.pi**2 * float(f) ** 2) < 1e-12


def test_adaptive_deterministic(tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (out1, out2):
        rc = run_cli("adaptive", "--case", "example2", "--tableau", "imex_euler",
                     "--strategy", "ats", "--tau-max", "0.5", "--grid-m", "16",
                     "--final-time", "3.0", "--output", str(out))
        assert rc == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_adaptive_decay_case(tmp_path):
    summ = tmp_path / "s.json"
    rc = run_cli("adaptive", "--case", "decay", "--tableau", "ierk35:1.2",
                 "--strategy", "ats-ld", "--grid-m", "16", "--final-time", "2.0",
                 "--seed", "42", "--summary", str(summ))
    assert rc == 0
    s = json.loads(summ.read_text())
    assert s["seed"] == 42
    assert s["max_err_mix"] is None  # no exact solution for random data


def test_adaptive_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "case": "example2", "tableau": "ierk23", "param": 0.2,
        "grid_m": 16, "final_time": 2.0, "strategy": "ats_ldlb",
        "tau_min": 1e-4, "tau_max": 0.5, "beta": 1000.0, "r_star": 4.0,
        "d_max": 5, "gamma_tol": 1e-3, "beta_thr": 10.0,
    }))
    summ = tmp_path / "s.json"
    rc = run_cli("adaptive", "--config", str(cfg), "--strategy", "ats",
                 "--summary", str(summ))
    assert rc == 0
    s = json.loads(summ.read_text())
    assert s["strategy"] == "ats"  # flag overrides the config value
    assert s["tableau"] == "ierk23(0.2)"


def test_adaptive_unknown_case():
    assert run_cli("adaptive", "--case", "nope", "--tableau", "imex_euler") == 2


def test_strategy_ats_equals_ld1(tmp_path):
    """ATS and ATS-LD with d_max = 1 emit identical trajectory files."""
    outs = []
    for tag, extra in (("ats", []), ("ats-ld", ["--d-max", "1"])):
        out = tmp_path / f"{tag}.csv"
        rc = run_cli("adaptive", "--case", "example2", "--tableau", "ierk23:0.2",
                     "--strategy", tag, *extra, "--tau-max", "0.1",
                     "--grid-m", "16", "--final-time", "4.0", "--output", str(out))
        assert rc == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
