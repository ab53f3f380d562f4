import numpy as np
import pandas as pd
import pytest

from pycaptime import Experiment, ExperimentConfig
from pycaptime.cli import EXIT_BUDGET, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, main


def read(path):
    return pd.read_csv(path, comment="#")


def first_line(path):
    return path.read_text(encoding="utf8").splitlines()[0]


def test_solve(tmp_path):
    out = tmp_path / "solve.csv"
    assert main(["solve", "P3xP5", "-k", "2", "--out", str(out)]) == EXIT_OK
    assert first_line(out) == "# pycaptime solve seed=0 graph=P3xP5 k=2"
    frame = read(out)
    assert frame.loc[0, "capture_time"] == 3
    assert frame.loc[0, "k"] == 2


def test_solve_cop_number_and_table(tmp_path):
    out, table = tmp_path / "solve.csv", tmp_path / "table.csv"
    args = ["solve", "Q3", "-k", "2", "--cop-number", "--k-max", "3", "--table", str(table), "--out", str(out)]
    assert main(args) == EXIT_OK
    assert read(out).loc[0, "cop_number"] == 2
    assert len(read(table)) == 36 * 8 * 2


def test_solve_unbounded(tmp_path, capsys):
    out = tmp_path / "solve.csv"
    assert main(["solve", "Q2", "-k", "1", "--out", str(out)]) == EXIT_VIOLATION
    assert "cop number exceeds 1" in capsys.readouterr().err
    assert str(read(out).loc[0, "capture_time"]) == "inf"


def test_solve_budget(capsys):
    assert main(["solve", "Q12", "-k", "3"]) == EXIT_BUDGET
    assert "budget" in capsys.readouterr().err


def test_cap_flags(capsys):
    assert main(["solve", "P3xP3", "-k", "1", "--explicit-cap", "4"]) == EXIT_USAGE
    assert "explicit cap of 4" in capsys.readouterr().err
    assert main(["solve", "P3xP3", "-k", "1", "--state-budget", "10"]) == EXIT_BUDGET
    assert main(["chain", "-n", "6", "-T", "50", "--horizon-cap", "40"]) == EXIT_USAGE
    assert "1..40" in capsys.readouterr().err


def test_usage_errors(capsys):
    assert main(["solve", "Q2xZ3", "-k", "1"]) == EXIT_USAGE
    assert "position 3" in capsys.readouterr().err
    with pytest.raises(SystemExit) as info:
        main(["solve", "Q2"])
    assert info.value.code == EXIT_USAGE


def test_simulate(tmp_path):
    out = tmp_path / "sim.csv"
    args = ["simulate", "Q8", "--cops", "squad", "--robber", "maxmin", "--trials", "3", "--seed", "4"]
    args += ["--assert-bound", "22", "--out", str(out), "--log-dir", str(tmp_path / "logs")]
    assert main(args) == EXIT_OK
    assert first_line(out).startswith("# pycaptime simulate graph=Q8 cops=squad robber=maxmin")
    frame = read(out)
    assert frame["trial"].tolist() == [0, 1, 2]
    assert frame["seed"].tolist() == [4, 5, 6]
    assert (frame["outcome"] == "captured").all()
    assert frame["length"].max() <= 22
    assert len(list((tmp_path / "logs").glob("*.log"))) == 1


def test_simulate_bound_violation(tmp_path, capsys):
    out = tmp_path / "sim.csv"
    args = ["simulate", "Q6", "--robber-start", "111111", "--assert-bound", "1", "--out", str(out)]
    assert main(args + ["--log-dir", str(tmp_path)]) == EXIT_VIOLATION
    assert "exceed the bound 1" in capsys.readouterr().err
    assert read(out).loc[0, "length"] > 1


def test_scaling(tmp_path):
    out = tmp_path / "scaling.csv"
    args = ["scaling", "--n", "8", "11", "--trials", "2", "--out", str(out), "--gnuplot", "--log-dir", str(tmp_path)]
    assert main(args) == EXIT_OK
    frame = read(out)
    assert frame["bound"].tolist() == [22, 40]
    assert (frame["simulated_max"] <= frame["bound"]).all()
    assert frame["threshold"].is_monotonic_increasing
    assert "plot" in (tmp_path / "scaling.csv.gp").read_text(encoding="utf8")


def test_scaling_bounds_only(tmp_path):
    out = tmp_path / "scaling.csv"
    assert main(["scaling", "--n", "256", "1024", "--bounds-only", "--out", str(out)]) == EXIT_OK
    frame = read(out)
    assert frame["bound"].tolist() == [1922, 9730]
    assert frame["simulated_max"].isna().all()
    ratio = frame["bound"] / (frame["n"] * np.log2(frame["n"]))
    assert ratio.round(3).tolist() == [0.938, 0.95]


def test_gnuplot_needs_out():
    assert main(["chain", "-n", "4", "-T", "3", "--gnuplot"]) == EXIT_USAGE


def test_coupon(tmp_path):
    out = tmp_path / "coupon.csv"
    args = ["coupon", "-m", "100", "--m0", "50", "--eps", "0.5", "--trials", "100000", "--out", str(out)]
    assert main(args) == EXIT_OK
    frame = read(out)
    assert frame.loc[0, "tail"] <= frame.loc[0, "bound"]


def test_chain(tmp_path):
    out = tmp_path / "chain.csv"
    assert main(["chain", "-n", "10", "-T", "50", "--check-lemma2", "--out", str(out)]) == EXIT_OK
    assert list(read(out).columns) == ["k", "t", "inequality", "lhs", "rhs"]
    assert len(read(out)) == 0

    assert main(["chain", "-n", "5", "-T", "3", "--out", str(out)]) == EXIT_OK
    assert len(read(out)) == 24


def test_survive(tmp_path):
    out = tmp_path / "survive.csv"
    args = ["survive", "-n", "10", "--cops", "2", "--trials", "5", "--out", str(out), "--cpus", "1"]
    assert main(args + ["--log-dir", str(tmp_path)]) == EXIT_OK
    assert "threshold=" in first_line(out)
    frame = read(out)
    assert list(frame.columns) == ["trial", "seed", "outcome", "length", "start_distance", "survived"]
    assert len(frame) == 5


def test_experiment_api(tmp_path):
    config = ExperimentConfig("Q3", cops="squad", robber="solver-optimal", trials=2, out=str(tmp_path / "q3.csv"))
    experiment = Experiment(config, {"logging_folder": str(tmp_path), "progress_bar": False})
    summaries = experiment.run()
    assert experiment.k == 2
    assert experiment.table is not None
    assert all(s.outcome == "captured" and s.length <= 6 for s in summaries)
    assert experiment.violations(6) == []
    assert experiment.settings()["max_rounds"] == 24
    assert len(read(tmp_path / "q3.csv")) == 2


def test_experiment_config_errors(tmp_path):
    with pytest.raises(ValueError):
        Experiment(ExperimentConfig("Q3", cops="nobody"))
    with pytest.raises(ValueError):
        Experiment(ExperimentConfig("Q3", robber="nobody"))
    with pytest.raises(ValueError):
        Experiment(ExperimentConfig("Q3", k=0))
    with pytest.raises(ValueError):
        Experiment(ExperimentConfig("Q3", trials=0), {"logging_folder": str(tmp_path)})


def test_experiment_caps(tmp_path):
    opts = {"logging_folder": str(tmp_path), "progress_bar": False}
    experiment = Experiment(ExperimentConfig("Q3xP2"), {**opts, "explicit_cap": 8})
    assert experiment.graph.explicit_cap == 8
    with pytest.raises(ValueError):
        Experiment(ExperimentConfig("Q3xP2", robber="solver-optimal"), {**opts, "explicit_cap": 8})
    with pytest.raises(ValueError):
        Experiment(ExperimentConfig("T9:0"), {**opts, "factor_cap": 8})
