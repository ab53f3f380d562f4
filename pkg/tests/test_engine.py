import pytest

from pycaptime.cops import GreedyCops
from pycaptime.engine import (
    Captured,
    CopStrategy,
    RobberStrategy,
    StrategyFault,
    Survived,
    default_max_rounds,
    play,
    replay,
    summarize,
)
from pycaptime.graphs import as_product, hypercube, path_graph, product
from pycaptime.robbers import RandomRobber
from pycaptime.solver import OptimalCops, OptimalRobber, solve
from tests.helper import Helper


class ScriptedCops(CopStrategy):
    name = "scripted"

    def __init__(self, start, moves):
        self.start = start
        self.moves = list(moves)

    def place(self, state):
        return self.start

    def move(self, state):
        return self.moves.pop(0) if self.moves else state.cops


class ScriptedRobber(RobberStrategy):
    name = "scripted"

    def __init__(self, start, moves):
        self.start = start
        self.moves = list(moves)

    def place(self, state):
        return self.start

    def move(self, state):
        return self.moves.pop(0) if self.moves else state.robber


p3 = as_product(path_graph(3))
p4 = as_product(path_graph(4))
p4_table = solve(p4, 1)
p4_game = Helper.play_checked(p4, 1, OptimalCops(p4_table), OptimalRobber(p4_table))

q2 = hypercube(2)
q2_table = solve(q2, 1)
q2_game = Helper.play_checked(q2, 1, GreedyCops(), OptimalRobber(q2_table), max_rounds=100)


def test_single_vertex_board():
    k1 = product([path_graph(1)])
    transcript = Helper.play_checked(k1, 1, GreedyCops(), RandomRobber())
    assert transcript.outcome == Captured(0, 0)
    assert transcript.length == 0
    assert transcript.rounds == []


def test_optimal_play_on_path():
    assert p4_game.cop_start == ((1,),)
    assert p4_game.robber_start == (3,)
    assert p4_game.outcome == Captured(2, 0)
    assert p4_game.length == 2
    assert p4_game.start_distance == 1
    assert p4_game.cop_paths() == [[(1,), (2,), (3,)]]


def test_transcript_text():
    text = p4_game.to_text(p4)
    assert text.splitlines() == [
        "# graph=P4 k=1 seed=0",
        "0: C 0->1 ; R ->3",
        "1: C 0->2 ; R ->3",
        "2: C 0->3 ; R -",
        "captured round=2 by=0",
    ]


def test_transcript_write(tmp_path):
    path = tmp_path / "game.txt"
    p4_game.write(path, p4)
    assert path.read_text(encoding="utf8") == p4_game.to_text(p4)


def test_one_cop_never_catches_on_four_cycle():
    assert q2_game.outcome == Survived(100)
    assert not q2_game.captured
    assert q2_game.length == 100
    assert q2_game.robber_start == (1, 1)


def test_robber_walks_into_cop():
    transcript = Helper.play_checked(p3, 1, ScriptedCops([(0,)], []), ScriptedRobber((2,), [(1,), (0,)]))
    assert transcript.outcome == Captured(2, 0)
    assert transcript.start_distance == 2
    assert [r.robber_move for r in transcript.rounds] == [(1,), (0,)]


def test_summary():
    summary = summarize(p4_game, trial=3)
    assert summary.trial == 3
    assert summary.outcome == "captured"
    assert summary.length == 2
    assert summary.start_distance == 1


def test_cop_teleport_is_a_fault():
    p5 = as_product(path_graph(5))
    with pytest.raises(StrategyFault) as info:
        play(p5, 1, ScriptedCops([(0,)], [[(2,)]]), ScriptedRobber((4,), []))
    assert info.value.role == "cops"
    assert info.value.offender == 0


def test_robber_faults():
    p5 = as_product(path_graph(5))
    with pytest.raises(StrategyFault) as info:
        play(p5, 1, ScriptedCops([(0,)], []), ScriptedRobber((7,), []))
    assert info.value.role == "robber"

    with pytest.raises(StrategyFault):
        play(p5, 1, ScriptedCops([(0,)], []), ScriptedRobber((4,), [(2,)]))


def test_wrong_cop_count_is_a_fault():
    with pytest.raises(StrategyFault):
        play(p3, 2, ScriptedCops([(0,)], []), ScriptedRobber((2,), []))


def test_bad_arguments():
    with pytest.raises(ValueError):
        play(p3, 0, GreedyCops(), RandomRobber())
    with pytest.raises(ValueError):
        play(p3, 1, GreedyCops(), RandomRobber(), max_rounds=0)


def test_replay_rejects_tampering():
    tampered = Helper.play_checked(p4, 1, OptimalCops(p4_table), OptimalRobber(p4_table))
    tampered.outcome = Captured(3, 0)
    with pytest.raises(ValueError):
        replay(tampered, p4)

    tampered.outcome = Captured(2, 0)
    tampered.rounds[0].cop_moves = [(0, (3,))]
    with pytest.raises(ValueError):
        replay(tampered, p4)


def test_default_max_rounds():
    assert default_max_rounds(hypercube(8)) == 96
    assert default_max_rounds(hypercube(1)) == 4
    assert default_max_rounds(product([path_graph(5), path_graph(3)])) == 12


def test_seeded_games_repeat():
    q6 = hypercube(6)
    first = play(q6, 1, GreedyCops("random"), RandomRobber(), seed=11)
    second = play(q6, 1, GreedyCops("random"), RandomRobber(), seed=11)
    assert first == second
