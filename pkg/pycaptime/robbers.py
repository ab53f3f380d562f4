"""
Robber strategies and robber placement.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from pycaptime.engine import GameState, RobberStrategy
from pycaptime.graphs import ProductGraph, Vertex
from pycaptime.solver import OptimalRobber, SolverTable

FAR_RESTARTS = 32


class PlacementError(Exception):
    def __init__(self, achieved: int, required: int):
        super().__init__(f"Far placement reached min-distance {achieved}, {required} was required")
        self.achieved = achieved
        self.required = required


def neighbor_distances(graph: ProductGraph, cops: np.ndarray, v: Vertex) -> Tuple[List[Tuple[int, int]], np.ndarray]:
    """
    Distances from every cop to every neighbor of v.

    Parameters
    ----------
    graph : ProductGraph
        The board.
    cops : ndarray of shape (k, n)
        Cop positions.
    v : Vertex
        The vertex whose neighbors are evaluated.

    Returns
    -------
    moves : list of (coordinate, factor vertex)
        The neighbor moves in `neighbor_moves` order.
    dist : ndarray of shape (k, len(moves))
        dist[i, j] is the distance from cop i to the neighbor reached by moves[j].

    """
    base = graph.distances(cops, v)
    if graph.is_hypercube:
        arr = np.asarray(v)
        delta = np.where(cops == arr, 1, -1)
        return [(i, 1 - x) for i, x in enumerate(v)], base[:, None] + delta

    moves = list(graph.neighbor_moves(v))
    delta = np.empty((cops.shape[0], len(moves)), dtype=np.int64)
    for j, (i, w) in enumerate(moves):
        table = graph.factors[i].dist
        delta[:, j] = table[cops[:, i], w] - table[cops[:, i], v[i]]
    return moves, base[:, None] + delta


def _exhaustive_far(graph: ProductGraph, cops: np.ndarray) -> Tuple[Vertex, int]:
    verts = np.array(list(graph.vertices()), dtype=np.int64)
    nearest = np.full(len(verts), np.iinfo(np.int64).max)
    for cop in cops:
        d = np.zeros(len(verts), dtype=np.int64)
        for i, f in enumerate(graph.factors):
            d += f.dist[verts[:, i], cop[i]]
        nearest = np.minimum(nearest, d)
    best = int(np.argmax(nearest))
    return tuple(int(x) for x in verts[best]), int(nearest[best])


def _ascend(graph: ProductGraph, cops: np.ndarray, v: Vertex) -> Tuple[Vertex, int]:
    """Steepest ascent on (min-distance, distance sum) over single moves."""
    d = graph.distances(cops, v)
    score = (int(d.min()), int(d.sum()))
    while True:
        moves, dist = neighbor_distances(graph, cops, v)
        if not moves:
            return v, score[0]
        mins, sums = dist.min(axis=0), dist.sum(axis=0)
        order = np.lexsort((-sums, -mins))
        j = int(order[0])
        candidate = (int(mins[j]), int(sums[j]))
        if candidate <= score:
            return v, score[0]
        i, w = moves[j]
        v, score = graph.with_coord(v, i, w), candidate


def far_placement(
    graph: ProductGraph,
    cop_positions: Sequence[Vertex],
    min_distance: int = None,
    restarts: int = FAR_RESTARTS,
    rng: np.random.Generator = None,
) -> Vertex:
    """
    A vertex as far as possible from the nearest cop.

    Explicit products are searched exhaustively, ties going to the lowest label.
    Larger products use steepest ascent from the coordinatewise farthest vertex
    from the first cop and from `restarts` random vertices; the best endpoint by
    min-distance wins, ties going to the lexicographically smallest tuple.

    Parameters
    ----------
    graph : ProductGraph
        The board.
    cop_positions : sequence of Vertex
        Where the cops stand.
    min_distance : int, optional
        Required min-distance; `PlacementError` when not reached.
    restarts : int, optional
        Random starts of the ascent on implicit products.
    rng : numpy.random.Generator, optional
        Source of the random starts.

    """
    cops = np.asarray(cop_positions, dtype=np.int64).reshape(-1, graph.n)
    if len({tuple(c) for c in cops.tolist()}) >= graph.vertex_count:
        raise ValueError(f"Every vertex of {graph.name} holds a cop")

    if graph.is_explicit:
        best, reached = _exhaustive_far(graph, cops)
    else:
        rng = rng if rng is not None else np.random.default_rng(0)
        starts = [graph.farthest_from(tuple(int(x) for x in cops[0]))]
        starts += [graph.random_vertex(rng) for _ in range(restarts)]
        ends = [_ascend(graph, cops, s) for s in starts]
        best, reached = min(ends, key=lambda end: (-end[1], end[0]))

    if min_distance is not None and reached < min_distance:
        raise PlacementError(reached, min_distance)
    return best


@dataclass
class PlacementPolicy:
    """
    How a robber chooses its start.

    mode is "far" (far from every cop), "fixed" (the given vertex) or "solver"
    (largest solved value, needs a table).

    """

    mode: str = "far"
    vertex: Optional[Vertex] = None
    table: Optional[SolverTable] = None
    min_distance: Optional[int] = None
    restarts: int = FAR_RESTARTS

    def __post_init__(self):
        if self.mode not in ("far", "fixed", "solver"):
            raise ValueError(f"Unknown placement mode {self.mode!r}")
        if self.mode == "fixed" and self.vertex is None:
            raise ValueError("Fixed placement needs a vertex")
        if self.mode == "solver" and self.table is None:
            raise ValueError("Solver placement needs a solved table")

    def choose(self, graph: ProductGraph, cops: Sequence[Vertex], rng: np.random.Generator) -> Vertex:
        if self.mode == "fixed":
            return tuple(self.vertex)
        if self.mode == "solver":
            return self.table.best_robber_placement(cops)
        if len(set(cops)) >= graph.vertex_count:
            return tuple(cops[0])  # No free vertex, the robber is caught at placement
        return far_placement(graph, cops, self.min_distance, self.restarts, rng)


class RandomRobber(RobberStrategy):
    """
    Moves to a uniformly random neighbor every turn and never passes.

    Without a seed the robber draws from the generator the engine derives from
    the game seed; with one it owns a generator seeded from it, reset on every bind.
    """

    name = "random"

    def __init__(self, placement: PlacementPolicy = None, seed: int = None):
        self.placement = placement or PlacementPolicy()
        self.seed = seed

    def bind(self, graph: ProductGraph, k: int, rng: np.random.Generator):
        super().bind(graph, k, rng if self.seed is None else np.random.default_rng(self.seed))

    def place(self, state: GameState) -> Vertex:
        return self.placement.choose(self.graph, state.cops, self.rng)

    def move(self, state: GameState) -> Vertex:
        return self.graph.random_neighbor(state.robber, self.rng)


def random_robber(seed: int = None, placement: PlacementPolicy = None) -> RandomRobber:
    """Random-walk robber, drawing from its own generator when `seed` is given."""
    return RandomRobber(placement, seed)


class MaxMinRobber(RobberStrategy):
    """
    Greedy evader: pass or move to maximize the distance to the nearest cop,
    then the distance sum, then prefer the lexicographically smallest vertex.
    """

    name = "maxmin"

    def __init__(self, placement: PlacementPolicy = None):
        self.placement = placement or PlacementPolicy()

    def place(self, state: GameState) -> Vertex:
        return self.placement.choose(self.graph, state.cops, self.rng)

    def move(self, state: GameState) -> Vertex:
        robber = state.robber
        cops = np.asarray(state.cops, dtype=np.int64)
        here = self.graph.distances(cops, robber)
        moves, dist = neighbor_distances(self.graph, cops, robber)

        best_key = (-int(here.min()), -int(here.sum()), robber)
        best = robber
        if moves:
            mins, sums = dist.min(axis=0), dist.sum(axis=0)
            for j, (i, w) in enumerate(moves):
                v = self.graph.with_coord(robber, i, w)
                key = (-int(mins[j]), -int(sums[j]), v)
                if key < best_key:
                    best_key, best = key, v
        return best


def max_min_distance_robber(placement: PlacementPolicy = None) -> MaxMinRobber:
    return MaxMinRobber(placement)


def solver_optimal_robber(table: SolverTable, start: Vertex = None) -> OptimalRobber:
    """Robber that places and moves to maximize the solved value; uncaptured states rank highest."""
    return OptimalRobber(table, start)
