import numpy as np
import pytest

from pycaptime.cops import GreedyCops
from pycaptime.engine import GameState, Phase
from pycaptime.graphs import as_product, hypercube, path_graph, product, star_graph
from pycaptime.robbers import (
    MaxMinRobber,
    PlacementError,
    PlacementPolicy,
    RandomRobber,
    far_placement,
    max_min_distance_robber,
    neighbor_distances,
    random_robber,
    solver_optimal_robber,
)
from pycaptime.solver import solve
from tests.helper import Helper

q3 = hypercube(3)
p5 = as_product(path_graph(5))
rng = np.random.default_rng(0)


def robber_turn(graph, cops, robber):
    return GameState(graph, len(cops), tuple(cops), robber, 1, Phase.ROBBER)


def test_far_placement_explicit():
    assert far_placement(hypercube(6), [(0,) * 6]) == (1,) * 6
    assert far_placement(q3, [(0, 0, 0), (1, 1, 1)]) == (0, 0, 1)
    assert far_placement(p5, [(0,), (1,)]) == (4,)


def test_far_placement_implicit():
    q20 = hypercube(20)
    assert far_placement(q20, [(0,) * 20], rng=rng) == (1,) * 20
    cops = [q20.random_vertex(rng) for _ in range(20)]
    v = far_placement(q20, cops, rng=rng)
    assert q20.distances(cops, v).min() >= 5


def test_far_placement_errors():
    with pytest.raises(PlacementError) as info:
        far_placement(q3, [(0, 0, 0)], min_distance=4)
    assert info.value.achieved == 3
    assert info.value.required == 4
    with pytest.raises(ValueError):
        far_placement(as_product(path_graph(1)), [(0,)])


def test_placement_policy():
    assert PlacementPolicy("fixed", (2,)).choose(p5, [(0,)], rng) == (2,)
    assert PlacementPolicy().choose(p5, [(2,)], rng) == (0,)
    assert PlacementPolicy().choose(as_product(path_graph(1)), [(0,)], rng) == (0,)

    table = solve(p5, 1)
    assert PlacementPolicy("solver", table=table).choose(p5, [(2,)], rng) == (0,)

    with pytest.raises(ValueError):
        PlacementPolicy("nearby")
    with pytest.raises(ValueError):
        PlacementPolicy("fixed")
    with pytest.raises(ValueError):
        PlacementPolicy("solver")


def test_neighbor_distances():
    for graph in (hypercube(5), product([path_graph(4), star_graph(3), path_graph(2)])):
        cops = np.array([graph.random_vertex(rng) for _ in range(4)])
        v = graph.random_vertex(rng)
        moves, dist = neighbor_distances(graph, cops, v)
        assert len(moves) == graph.degree(v)
        for j, (i, w) in enumerate(moves):
            u = graph.with_coord(v, i, w)
            assert dist[:, j].tolist() == [graph.distance(tuple(c), u) for c in cops.tolist()]


def test_random_robber_never_passes():
    q4 = hypercube(4)
    robber = random_robber()
    robber.bind(q4, 1, np.random.default_rng(3))
    v = (0, 0, 0, 0)
    for _ in range(50):
        w = robber.move(robber_turn(q4, [(1, 1, 1, 1)], v))
        assert q4.is_adjacent(v, w)
        v = w


def test_random_robber_seed():
    q6 = hypercube(6)
    walks = []
    for engine_seed in (1, 2):
        robber = random_robber(seed=5)
        robber.bind(q6, 1, np.random.default_rng(engine_seed))
        v, walk = (0,) * 6, []
        for _ in range(20):
            v = robber.move(robber_turn(q6, [(1,) * 6], v))
            walk.append(v)
        walks.append(walk)
    assert walks[0] == walks[1]


def test_random_robber_steps_toward_cop():
    # From distance d on Q_n the robber steps toward the cop with probability d / n
    q20 = hypercube(20)
    cop, start = (0,) * 20, (1,) * 6 + (0,) * 14
    robber = RandomRobber()
    robber.bind(q20, 1, np.random.default_rng(11))
    closer = [q20.distance(cop, robber.move(robber_turn(q20, [cop], start))) == 5 for _ in range(20000)]
    assert np.mean(closer) == pytest.approx(6 / 20, abs=0.015)


def test_max_min_robber_moves():
    robber = max_min_distance_robber()
    robber.bind(p5, 1, np.random.default_rng(0))
    assert robber.move(robber_turn(p5, [(0,)], (2,))) == (3,)
    assert robber.move(robber_turn(p5, [(0,)], (4,))) == (4,)
    assert robber.move(robber_turn(p5, [(3,)], (2,))) == (1,)


def test_max_min_robber_ties():
    robber = MaxMinRobber()
    robber.bind(q3, 2, np.random.default_rng(0))
    assert robber.move(robber_turn(q3, [(0, 0, 1), (1, 0, 0)], (1, 1, 1))) == (1, 1, 1)
    assert robber.move(robber_turn(q3, [(0, 0, 1), (1, 1, 0)], (1, 1, 1))) == (0, 1, 1)


def test_random_robber_starts_at_antipode():
    q10 = hypercube(10)
    transcript = Helper.play_checked(q10, 1, GreedyCops(), RandomRobber())
    assert transcript.robber_start == (1,) * 10
    assert transcript.start_distance == 9


def test_solver_optimal_robber():
    table = solve(p5, 1)
    robber = solver_optimal_robber(table)
    robber.bind(p5, 1, np.random.default_rng(0))
    assert robber.place(GameState(p5, 1, ((2,),), None, 0, Phase.ROBBER_PLACE)) == (0,)
    assert robber.move(robber_turn(p5, [(1,)], (0,))) == (0,)
    fixed = solver_optimal_robber(table, start=(4,))
    fixed.bind(p5, 1, np.random.default_rng(0))
    assert fixed.place(GameState(p5, 1, ((2,),), None, 0, Phase.ROBBER_PLACE)) == (4,)
