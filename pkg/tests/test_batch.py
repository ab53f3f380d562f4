import numpy as np
import pandas as pd
import pytest

from pycaptime.batch import GameConfig, TrialError, batch_play, play_trial, summaries_frame, write_csv
from pycaptime.cops import GreedyCops
from pycaptime.graphs import hypercube
from pycaptime.options import Options
from pycaptime.robbers import RandomRobber
from pycaptime.stochastic import chain_expectation

q10 = hypercube(10)
q10_config = GameConfig(q10, 1, GreedyCops, RandomRobber)
q10_games = batch_play(q10_config, 2000, 0, Options({"progress_bar": False}))
q10_lengths = np.array([s.length for s in q10_games])

q6_config = GameConfig(hypercube(6), 2, lambda: GreedyCops("random"), RandomRobber, max_rounds=40)
serial = batch_play(q6_config, 60, 100, Options({"cpu_count": 1, "progress_bar": False}))
parallel = batch_play(q6_config, 60, 100, Options({"cpu_count": 3, "block_size": 7, "progress_bar": False}))
no_stealing = batch_play(
    q6_config, 60, 100, Options({"cpu_count": 2, "block_size": 5, "redivide_work": False, "progress_bar": False})
)


def test_greedy_mean_on_q10():
    assert all(s.start_distance == 9 for s in q10_games)
    expected = np.mean([chain_expectation(10, s.start_distance) for s in q10_games])
    assert expected == pytest.approx(17.873, abs=1e-3)
    assert q10_lengths.mean() == pytest.approx(expected, rel=0.05)


def test_trial_seeds():
    assert [s.trial for s in q10_games] == list(range(2000))
    assert [s.seed for s in q10_games] == list(range(2000))
    assert [s.seed for s in serial] == list(range(100, 160))


def test_worker_count_does_not_change_results():
    assert serial == parallel
    assert serial == no_stealing


def test_play_trial():
    assert play_trial(q6_config, 7, 107) == serial[7]


def test_failed_trial_is_reported():
    broken = GameConfig(hypercube(4), 2, lambda: GreedyCops([(0, 0, 0, 0)]), RandomRobber)
    with pytest.raises(TrialError) as info:
        batch_play(broken, 3, 50, Options({"cpu_count": 1, "progress_bar": False}))
    assert info.value.trial == 0
    assert info.value.seed == 50
    assert "ValueError" in info.value.message

    with pytest.raises(TrialError) as info:
        batch_play(broken, 40, 50, Options({"cpu_count": 2, "block_size": 10, "progress_bar": False}))
    assert info.value.trial == 0


def test_trial_count():
    with pytest.raises(ValueError):
        batch_play(q6_config, 0)


def test_summary_csv(tmp_path, capsys):
    frame = summaries_frame(serial)
    assert list(frame.columns) == ["trial", "seed", "outcome", "length"]
    assert len(frame) == 60

    path = tmp_path / "summaries.csv"
    write_csv(frame, path, "simulate", {"graph": "Q6", "seed": 100})
    lines = path.read_text(encoding="utf8").splitlines()
    assert lines[0] == "# pycaptime simulate graph=Q6 seed=100"
    assert lines[1] == "trial,seed,outcome,length"
    assert pd.read_csv(path, comment="#").equals(frame)

    write_csv(frame.head(2), None, "simulate", {"graph": "Q6"})
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "# pycaptime simulate graph=Q6"
    assert len(out) == 4
