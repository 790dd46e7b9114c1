"""Fixtures: CSV inputs produced by the solver CLI (the only interface the
plotting package consumes)."""

import subprocess
import sys

import pytest


def run_torusflow(*argv):
    proc = subprocess.run([sys.executable, "-m", "torusflow.cli", *argv],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def convergence_csv(tmp_path_factory):
    out = tmp_path_factory.mktemp("conv") / "convergence.csv"
    run_torusflow("converge", "--case", "example1", "--grid-m", "32",
                  "--final-time", "1.0",
                  "--tableau", "ierk23:0.35", "--tableau", "ierk35:1.2",
                  "--tableau", "ierk47:-0.8",
                  "--taus", "0.025,0.0125,0.00625",
                  "--output", str(out))
    return out


@pytest.fixture(scope="session")
def adaptive_outputs(tmp_path_factory):
    d = tmp_path_factory.mktemp("adaptive")
    traj = d / "trajectory.csv"
    ref = d / "reference.csv"
    run_torusflow("adaptive", "--case", "example2", "--tableau", "ierk23:0.2",
                  "--strategy", "ats-ldlb", "--tau-max", "0.1", "--grid-m", "32",
                  "--output", str(traj), "--reference-out", str(ref))
    return traj, ref
