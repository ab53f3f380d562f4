"""
Exact game values by retrograde analysis on explicit graphs.

A state is (cop multiset, robber vertex, side to move). Its value is the
number of rounds still needed to capture under optimal play: cops minimize,
the robber maximizes. Capture states have value 0; states the cops can never
force to capture are `UNBOUNDED`.
"""

import itertools
import math
from functools import total_ordering
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from pycaptime.engine import CopStrategy, GameState, RobberStrategy
from pycaptime.graphs import FactorGraph, ProductGraph, Vertex, as_product
from pycaptime.helper import Helper, Timer
from pycaptime.logs import get_logger
from pycaptime.options import Options

STATE_BUDGET = 10**7


@total_ordering
class _Unbounded:
    """Value of a state the cops cannot force to capture. Compares above every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __hash__(self):
        return hash("unbounded")

    def __repr__(self):
        return "UNBOUNDED"

    def __str__(self):
        return "inf"


UNBOUNDED = _Unbounded()

Value = Union[int, _Unbounded]


class StateBudgetError(Exception):
    def __init__(self, states: int, budget: int):
        super().__init__(f"Solver needs {states} states, above the budget of {budget}")
        self.states = states
        self.budget = budget


class CopNumberExceeded(Exception):
    def __init__(self, k: int):
        super().__init__(f"cop number exceeds {k}")
        self.k = k


def state_count(vertex_count: int, k: int) -> int:
    """C(v + k - 1, k) * v * 2: cop multisets times robber vertices times side to move."""
    return math.comb(vertex_count + k - 1, k) * vertex_count * 2


def _wrap(level: int) -> Value:
    return UNBOUNDED if level < 0 else int(level)


class SolverTable:
    def __init__(self, graph: ProductGraph, k: int, multisets, joint, cop_level: np.ndarray, robber_level: np.ndarray):
        """
        Solved values of one (graph, k) game. Built by `solve`.

        Vertices are product labels (`graph.index`), cop positions are sorted label
        tuples. `cop_level[m, r]` is the value with the cops to move and
        `robber_level[m, r]` with the robber to move; -1 marks an unbounded state.

        """
        self.graph = graph
        self.k = k
        self.multisets = multisets
        self.position = {m: i for i, m in enumerate(multisets)}
        self.joint = joint
        self.cop_level = cop_level
        self.robber_level = robber_level
        self.closed = [(v,) + graph.adjacency[v] for v in range(graph.vertex_count)]
        self.closed = [tuple(sorted(nbhd)) for nbhd in self.closed]

    def __repr__(self):
        return f"SolverTable({self.graph.name}, k={self.k})"

    @property
    def state_count(self) -> int:
        return self.cop_level.size + self.robber_level.size

    def _labels(self, vertices: Sequence[Vertex]) -> Tuple[int, ...]:
        labels = []
        for v in vertices:
            if not self.graph.is_vertex(v):
                raise ValueError(f"{v!r} is not a vertex of {self.graph.name}")
            labels.append(self.graph.index(v))
        return tuple(labels)

    def _multiset(self, cops: Sequence[Vertex]) -> int:
        if len(cops) != self.k:
            raise ValueError(f"Table solved for {self.k} cops, got {len(cops)}")
        return self.position[tuple(sorted(self._labels(cops)))]

    def value(self, cops: Sequence[Vertex], robber: Vertex, side: str) -> Value:
        """Rounds to capture from the given state; side is "cops" or "robber" (who moves next)."""
        m = self._multiset(cops)
        (r,) = self._labels([robber])
        if side == "cops":
            return _wrap(self.cop_level[m, r])
        if side == "robber":
            return _wrap(self.robber_level[m, r])
        raise ValueError(f"Side must be 'cops' or 'robber', got {side!r}")

    def placement_value(self, m: int) -> Value:
        """Value of cop multiset m once the robber has placed optimally against it."""
        occupied = set(self.multisets[m])
        free = [r for r in range(self.graph.vertex_count) if r not in occupied]
        if not free:
            return 0
        levels = self.cop_level[m, free]
        return UNBOUNDED if (levels < 0).any() else int(levels.max())

    def capture_time(self) -> Value:
        return min(self.placement_value(m) for m in range(len(self.multisets)))

    def best_cop_placement(self) -> Tuple[Vertex, ...]:
        values = [self.placement_value(m) for m in range(len(self.multisets))]
        best = min(range(len(values)), key=lambda m: values[m])
        return tuple(self.graph.vertex(x) for x in self.multisets[best])

    def best_robber_placement(self, cops: Sequence[Vertex]) -> Vertex:
        """Free vertex of largest cop-to-move value, lowest label on ties."""
        m = self._multiset(cops)
        occupied = set(self.multisets[m])
        free = [r for r in range(self.graph.vertex_count) if r not in occupied]
        if not free:
            return self.graph.vertex(0)
        best = max(free, key=lambda r: (_wrap(self.cop_level[m, r]), -r))
        return self.graph.vertex(best)

    def best_cop_move(self, cops: Sequence[Vertex], robber: Vertex) -> Tuple[Vertex, ...]:
        """
        Value-optimal joint move, aligned with the given cop order.

        Among optimal moves the lexicographically least tuple of new positions wins.

        """
        labels = self._labels(cops)
        if len(labels) != self.k:
            raise ValueError(f"Table solved for {self.k} cops, got {len(labels)}")
        (r,) = self._labels([robber])
        best, best_value = None, None
        for move in itertools.product(*(self.closed[c] for c in labels)):
            m = self.position[tuple(sorted(move))]
            value = _wrap(self.robber_level[m, r])
            if best_value is None or value < best_value:
                best, best_value = move, value
        return tuple(self.graph.vertex(x) for x in best)

    def best_robber_move(self, cops: Sequence[Vertex], robber: Vertex) -> Vertex:
        """Closed-neighborhood vertex of largest value; moving onto a cop counts as 0."""
        m = self._multiset(cops)
        (r,) = self._labels([robber])
        occupied = set(self.multisets[m])

        def score(x):
            return (0 if x in occupied else _wrap(self.cop_level[m, x]), -x)

        return self.graph.vertex(max(self.closed[r], key=score))

    def to_frame(self) -> pd.DataFrame:
        """One row per state: cops, robber, side, value ("inf" when unbounded)."""
        fmt = self.graph.format_vertex
        rows = []
        for m, labels in enumerate(self.multisets):
            cops = " ".join(fmt(self.graph.vertex(x)) for x in labels)
            for r in range(self.graph.vertex_count):
                robber = fmt(self.graph.vertex(r))
                rows.append((cops, robber, "cops", str(_wrap(self.cop_level[m, r]))))
                rows.append((cops, robber, "robber", str(_wrap(self.robber_level[m, r]))))
        return pd.DataFrame(rows, columns=["cops", "robber", "side", "value"])

    def placement_frame(self) -> pd.DataFrame:
        fmt = self.graph.format_vertex
        rows = [
            (" ".join(fmt(self.graph.vertex(x)) for x in labels), str(self.placement_value(m)))
            for m, labels in enumerate(self.multisets)
        ]
        return pd.DataFrame(rows, columns=["cops", "value"])

    def write_csv(self, path: Union[str, Path], settings: dict = None):
        """Export the table as CSV, preceded by a metadata comment line."""
        settings = {"graph": self.graph.name, "k": self.k, **(settings or {})}
        with open(path, "w", encoding="utf8", newline="") as handle:
            handle.write(Helper.metadata_line("solve", settings) + "\n")
            self.to_frame().to_csv(handle, index=False)


def _joint_moves(graph: ProductGraph, multisets, position) -> List[List[int]]:
    """Multisets reachable by one joint cop move; the relation is symmetric."""
    closed = [tuple(sorted((v,) + graph.adjacency[v])) for v in range(graph.vertex_count)]
    joint = []
    for m in multisets:
        reach = {position[tuple(sorted(move))] for move in itertools.product(*(closed[c] for c in m))}
        joint.append(sorted(reach))
    return joint


def solve(graph: Union[FactorGraph, ProductGraph], k: int, opts: Options = None) -> SolverTable:
    """
    Solve the k-cop game on an explicit graph.

    Levels are assigned breadth-first from the capture states. A cop-to-move
    state takes one more than the first robber-to-move successor resolved; a
    robber-to-move state is resolved once every move that avoids the cops
    leads to a resolved state, at the level of the last one.

    Parameters
    ----------
    graph : FactorGraph or ProductGraph
        The board, at most `explicit_cap` vertices.
    k : int
        Number of cops.
    opts : Options, optional
        Supplies `state_budget` and the run logger.

    Raises
    ------
    StateBudgetError
        If the state count exceeds the budget.

    """
    graph = as_product(graph)
    if k < 1:
        raise ValueError(f"At least one cop is required, got k={k}")
    if not graph.is_explicit:
        raise ValueError(f"{graph.name} has {graph.vertex_count} vertices, above the explicit cap of {graph.explicit_cap}")

    budget = opts.state_budget if opts is not None else STATE_BUDGET
    states = state_count(graph.vertex_count, k)
    if states > budget:
        raise StateBudgetError(states, budget)

    logger = get_logger(opts)
    timer = Timer()
    v_count = graph.vertex_count
    multisets = list(itertools.combinations_with_replacement(range(v_count), k))
    position = {m: i for i, m in enumerate(multisets)}
    joint = _joint_moves(graph, multisets, position)
    closed = [tuple(sorted((v,) + graph.adjacency[v])) for v in range(v_count)]

    occupied = np.zeros((len(multisets), v_count), dtype=bool)
    for i, m in enumerate(multisets):
        occupied[i, list(m)] = True

    cop_level = np.full(occupied.shape, -1, dtype=np.int32)
    robber_level = np.full(occupied.shape, -1, dtype=np.int32)
    cop_level[occupied] = 0
    robber_level[occupied] = 0

    # Robber moves that avoid every cop; stepping onto a cop is worth 0 to the robber
    counter = np.zeros(occupied.shape, dtype=np.int32)
    for r in range(v_count):
        counter[:, r] = (~occupied[:, list(closed[r])]).sum(axis=1)

    frontier = list(zip(*np.nonzero(occupied)))
    level = 0
    while frontier:
        resolved = []
        for mp, r in frontier:
            for m in joint[mp]:
                if cop_level[m, r] < 0:
                    cop_level[m, r] = level + 1
                    resolved.append((m, r))
        level += 1

        frontier = []
        for m, rp in resolved:
            for r in closed[rp]:
                if robber_level[m, r] >= 0:
                    continue
                counter[m, r] -= 1
                if counter[m, r] == 0:
                    robber_level[m, r] = level
                    frontier.append((m, r))

    table = SolverTable(graph, k, multisets, joint, cop_level, robber_level)
    logger.info(f"Solved {graph.name} with {k} cops: {states} states, {level} levels in {timer.elapsed(2)} seconds")
    return table


def capture_time(graph: Union[FactorGraph, ProductGraph], k: int, opts: Options = None) -> int:
    """
    Optimal game length with k cops.

    Raises
    ------
    CopNumberExceeded
        If k cops cannot force capture.

    """
    value = solve(graph, k, opts).capture_time()
    if value is UNBOUNDED:
        raise CopNumberExceeded(k)
    return value


def cop_number(graph: Union[FactorGraph, ProductGraph], k_max: int, opts: Options = None) -> int:
    """Least k <= k_max for which the cops can force capture."""
    if k_max < 1:
        raise ValueError(f"k_max must be positive, got {k_max}")
    for k in range(1, k_max + 1):
        if solve(graph, k, opts).capture_time() is not UNBOUNDED:
            return k
    raise CopNumberExceeded(k_max)


def _check_table_graph(table: SolverTable, graph: ProductGraph, k: int):
    if graph.sizes != table.graph.sizes or graph.adjacency != table.graph.adjacency:
        raise ValueError(f"Table was solved on {table.graph.name}, not on {graph.name}")
    if k != table.k:
        raise ValueError(f"Table was solved for {table.k} cops, the game has {k}")


class OptimalCops(CopStrategy):
    name = "solver-optimal"

    def __init__(self, table: SolverTable):
        self.table = table

    def bind(self, graph, k, rng):
        super().bind(graph, k, rng)
        _check_table_graph(self.table, graph, k)

    def place(self, state: GameState) -> List[Vertex]:
        return list(self.table.best_cop_placement())

    def move(self, state: GameState) -> List[Vertex]:
        return list(self.table.best_cop_move(state.cops, state.robber))


class OptimalRobber(RobberStrategy):
    name = "solver-optimal"

    def __init__(self, table: SolverTable, start: Optional[Vertex] = None):
        self.table = table
        self.start = start

    def bind(self, graph, k, rng):
        super().bind(graph, k, rng)
        _check_table_graph(self.table, graph, k)

    def place(self, state: GameState) -> Vertex:
        if self.start is not None:
            return self.start
        return self.table.best_robber_placement(state.cops)

    def move(self, state: GameState) -> Vertex:
        return self.table.best_robber_move(state.cops, state.robber)


def extract_strategy(table: SolverTable, side: str) -> Union[OptimalCops, OptimalRobber]:
    """A strategy that always plays a value-optimal move from the table."""
    if side == "cops":
        return OptimalCops(table)
    if side == "robber":
        return OptimalRobber(table)
    raise ValueError(f"Side must be 'cops' or 'robber', got {side!r}")
