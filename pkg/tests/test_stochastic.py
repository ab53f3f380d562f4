import math

import numpy as np
import pytest
from scipy import stats

from pycaptime.batch import GameConfig, batch_play
from pycaptime.cops import GreedyCops
from pycaptime.engine import GameState, Phase, TrialSummary
from pycaptime.graphs import hypercube
from pycaptime.options import Options
from pycaptime.robbers import PlacementError, PlacementPolicy, RandomRobber
from pycaptime.stochastic import (
    check_lemma2,
    chain_expectation,
    coupon_expectation,
    coupon_report,
    coupon_simulate,
    coupon_tail_bound,
    coupon_threshold,
    distance_chain,
    lower_bound_params,
    survival_config,
    survival_experiment,
    survived,
)

opts = Options({"progress_bar": False})

# Greedy cop at the center of Q_40, robber fixed at weight 11: distance 10 at the robber's first turn
q40 = hypercube(40)
weight11 = (1,) * 11 + (0,) * 29
q40_config = GameConfig(q40, 1, GreedyCops, lambda: RandomRobber(PlacementPolicy("fixed", weight11)))
q40_games = batch_play(q40_config, 2000, 0, opts)
q40_lengths = np.array([s.length for s in q40_games])

survival_small = survival_experiment(20, 1, 1000, seed=0, opts=opts)

large_params = lower_bound_params(100, 1.0)
survival_large = survival_experiment(100, 100, 200, seed=0, max_rounds=math.ceil(large_params.threshold), opts=opts)


def test_coupon_expectation():
    assert coupon_expectation(4, 2) == pytest.approx(4 + 2)
    assert coupon_expectation(20, 5) == pytest.approx(20 * (1 + 1 / 2 + 1 / 3 + 1 / 4 + 1 / 5))
    with pytest.raises(ValueError):
        coupon_expectation(5, 6)
    with pytest.raises(ValueError):
        coupon_expectation(5, 0)


def test_full_collection_growth():
    ratios = []
    for m in (100, 1000, 10000):
        value = coupon_expectation(m, m)
        assert value == pytest.approx(m * math.log(m) + np.euler_gamma * m, rel=0.01)
        ratios.append(value / (m * math.log(m)))
    assert ratios[0] > ratios[1] > ratios[2] > 1


def test_coupon_simulation_mean():
    sample = coupon_simulate(100, 50, 20000, seed=1)
    assert sample.mean == pytest.approx(coupon_expectation(100, 50), rel=0.02)
    assert sample.samples.min() >= 50
    assert sample.tail is None


def test_coupon_tail_bound():
    assert coupon_tail_bound(100, 100, 0.5) == pytest.approx(math.exp(-10))
    assert coupon_threshold(100, 0.5) == pytest.approx(0.5 * 99 * math.log(100))
    with pytest.raises(ValueError):
        coupon_tail_bound(1, 1, 0.5)
    with pytest.raises(ValueError):
        coupon_tail_bound(10, 5, 0)


def test_coupon_tail_grid():
    for m in (50, 100, 200):
        for m0 in (m // 4, m // 2, m):
            for eps in (0.3, 0.5, 0.7):
                sample = coupon_simulate(m, m0, 100000, seed=2, eps=eps)
                assert sample.tail <= coupon_tail_bound(m, m0, eps)


def test_coupon_report():
    frame = coupon_report(50, 25, 20000, seed=3, eps=0.5)
    assert list(frame.columns) == ["m", "m0", "eps", "trials", "seed", "mean", "expectation", "threshold", "tail", "bound"]
    assert frame.loc[0, "expectation"] == pytest.approx(coupon_expectation(50, 25))
    assert frame.loc[0, "tail"] <= frame.loc[0, "bound"]


def test_distance_chain_first_round():
    table = distance_chain(5, 3)
    assert table.p[0].tolist() == [1.0] * 4
    assert table.p[1:, 0].tolist() == [0.0] * 5
    assert table.p[1, 1] == pytest.approx(0.2)
    assert table.p[2, 1] == pytest.approx(0.4)
    assert table.p[3, 1] == 0.0
    assert (np.diff(table.p, axis=1) >= -1e-12).all()
    assert len(table.to_frame()) == 6 * 4


def test_distance_chain_limits():
    with pytest.raises(ValueError):
        distance_chain(1, 5)
    with pytest.raises(ValueError):
        distance_chain(5, 0)
    with pytest.raises(ValueError):
        distance_chain(5, 10**4 + 1)


def test_even_distances_are_monotone():
    for n in range(2, 61):
        assert check_lemma2(n, 300, slack=1e-12) == []
    with pytest.raises(ValueError):
        check_lemma2(6, 50, horizon_cap=40)


def test_best_cop_keeps_even_distance():
    table = distance_chain(10, 30)
    for t in range(1, 31):
        for d in range(2, 11):
            assert table.cop_action(d, t) == (-1 if d % 2 else 0)
    with pytest.raises(ValueError):
        table.cop_action(1, 5)
    with pytest.raises(ValueError):
        table.cop_action(4, 31)


def test_chain_expectation():
    assert chain_expectation(10, 9) == pytest.approx(10 * (1 / 9 + 1 / 7 + 1 / 5 + 1 / 3 + 1))
    assert chain_expectation(40, 10) == pytest.approx(46.6667, abs=1e-3)
    assert chain_expectation(20, 20) == pytest.approx(30.2897, abs=1e-3)
    with pytest.raises(ValueError):
        chain_expectation(10, 0)


def test_greedy_mean_matches_coupon_collector():
    assert all(s.start_distance == 10 for s in q40_games)
    assert all(s.outcome == "captured" for s in q40_games)
    assert q40_lengths.mean() == pytest.approx(chain_expectation(40, 10), rel=0.05)
    assert q40_lengths.mean() == pytest.approx(coupon_expectation(20, 5) + 1, rel=0.05)


def test_greedy_lengths_follow_coupon_distribution():
    direct = coupon_simulate(20, 5, 2000, seed=9).samples
    assert stats.ks_2samp(q40_lengths - 1, direct).pvalue > 1e-3


def test_lower_bound_params():
    params = lower_bound_params(100, 1.0)
    assert params.T == pytest.approx(227.956, abs=1e-3)
    assert params.eps == pytest.approx(0.6811, abs=1e-3)
    assert params.threshold == pytest.approx(72.69, abs=0.05)
    assert params.far_distance == 26
    assert params.coupon_slots == 13
    assert not params.placement_ok
    assert lower_bound_params(1000, 1.0).placement_ok
    assert 0 <= params.union_bound <= 1
    with pytest.raises(ValueError):
        lower_bound_params(2, 1.0)
    with pytest.raises(ValueError):
        lower_bound_params(10, -1.0)


def test_survived():
    assert survived(TrialSummary(0, 0, "captured", 73, 40), 72.69)
    assert not survived(TrialSummary(0, 0, "captured", 72, 40), 72.69)
    assert survived(TrialSummary(0, 0, "survived", 73, 40), 72.69)
    assert not survived(TrialSummary(0, 0, "captured", 10, 40), 10)


def test_single_cop_survival_matches_chain():
    assert all(s.start_distance == 20 for s in survival_small.summaries)
    assert survival_small.chain_mean == pytest.approx(chain_expectation(20, 20))
    assert survival_small.mean_length == pytest.approx(survival_small.chain_mean, rel=0.05)
    assert survival_small.params.d == 0


def test_random_robber_outlasts_many_cops():
    assert survival_large.params.threshold == pytest.approx(large_params.threshold)
    assert survival_large.survival_fraction >= 0.9
    frame = survival_large.to_frame()
    assert len(frame) == 200
    assert frame["survived"].mean() == pytest.approx(survival_large.survival_fraction)


def test_survival_robber_starts_far():
    config = survival_config(4, 8)
    robber = config.robber_factory()
    assert robber.placement.min_distance == 4 // 4 + 1

    # Cops on every even-weight vertex leave each free vertex at distance 1
    evens = tuple(v for v in config.graph.vertices() if sum(v) % 2 == 0)
    robber.bind(config.graph, 8, np.random.default_rng(0))
    with pytest.raises(PlacementError):
        robber.place(GameState(config.graph, 8, evens, None, 0, Phase.ROBBER_PLACE))

    far = ((0, 0, 0, 0),) * 8
    robber.bind(config.graph, 8, np.random.default_rng(0))
    assert robber.place(GameState(config.graph, 8, far, None, 0, Phase.ROBBER_PLACE)) == (1, 1, 1, 1)
