"""
Cop strategies.

Tie-breaking everywhere: lowest coordinate index first, then lowest factor vertex label.
"""

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np

from pycaptime.engine import CopStrategy, GameState
from pycaptime.graphs import FactorGraph, ProductGraph, Vertex, product
from pycaptime.helper import Helper


def cop_count(n: int) -> int:
    """Cop number of a product of n nontrivial trees, ceil((n + 1) / 2)."""
    return (n + 2) // 2


def _place(graph: ProductGraph, k: int, rng: np.random.Generator, placement) -> List[Vertex]:
    if placement == "center":
        return [graph.center] * k
    if placement == "random":
        return [graph.random_vertex(rng) for _ in range(k)]
    positions = [tuple(v) for v in placement]
    if len(positions) != k:
        raise ValueError(f"Fixed placement lists {len(positions)} vertices for {k} cops")
    return positions


def greedy_cop(state: GameState) -> List[Vertex]:
    """Every cop steps to a neighbor strictly closer to the robber."""
    graph, robber = state.graph, state.robber
    return [c if c == robber else graph.step_toward(c, robber) for c in state.cops]


def parity_greedy_cop(state: GameState) -> List[Vertex]:
    """Cops at even distance from the robber pass; cops at odd distance play greedily."""
    graph, robber = state.graph, state.robber
    moves = list(state.cops)
    odd = np.flatnonzero(graph.distances(state.cops, robber) % 2 == 1)
    for i in odd:
        moves[i] = graph.step_toward(moves[i], robber)
    return moves


class GreedyCops(CopStrategy):
    name = "greedy"

    def __init__(self, placement: Union[str, Sequence[Vertex]] = "center"):
        """
        Parameters
        ----------
        placement : str or sequence of Vertex, optional
            "center" puts every cop on the product center, "random" on independent
            uniform vertices, a sequence fixes one vertex per cop.

        """
        self.placement = placement

    def place(self, state: GameState) -> List[Vertex]:
        return _place(self.graph, self.k, self.rng, self.placement)

    def move(self, state: GameState) -> List[Vertex]:
        return greedy_cop(state)


class ParityGreedyCops(GreedyCops):
    name = "parity-greedy"

    def move(self, state: GameState) -> List[Vertex]:
        return parity_greedy_cop(state)


def lemma1_step(graph: ProductGraph, cop: Vertex, robber: Vertex, coords: Tuple[int, int] = (0, 1)) -> Vertex:
    """
    Two-tree chase restricted to a pair of coordinates.

    With d1 and d2 the distances in the two coordinates, the cop passes when
    d1 + d2 is even and otherwise steps in the coordinate with the larger
    distance (an odd sum rules out a tie).

    """
    a, b = coords
    d1 = graph.factors[a].dist[cop[a], robber[a]]
    d2 = graph.factors[b].dist[cop[b], robber[b]]
    if (d1 + d2) % 2 == 0:
        return cop
    if d1 > d2:
        return graph.step_in(cop, a, robber[a])
    return graph.step_in(cop, b, robber[b])


def _require_trees(graph: ProductGraph):
    for i, f in enumerate(graph.factors):
        if not f.is_tree:
            raise ValueError(f"Factor {i} ({f.name or f.vertex_count}) of {graph.name} is not a tree")


class ProductSingleCop(CopStrategy):
    name = "lemma1"

    def __init__(self, factors: Sequence[FactorGraph] = None):
        self.factors = tuple(factors) if factors is not None else None

    def bind(self, graph: ProductGraph, k: int, rng: np.random.Generator):
        super().bind(graph, k, rng)
        if graph.n != 2:
            raise ValueError(f"The two-tree chase needs a product of two trees, got {graph.n} factors")
        if self.factors is not None and [f.adjacency for f in self.factors] != [f.adjacency for f in graph.factors]:
            raise ValueError(f"Strategy was built for other factors than those of {graph.name}")
        if k != 1:
            raise ValueError(f"The two-tree chase is played by a single cop, got k={k}")
        _require_trees(graph)

    def place(self, state: GameState) -> List[Vertex]:
        return [self.graph.center]

    def move(self, state: GameState) -> List[Vertex]:
        return [lemma1_step(self.graph, state.cops[0], state.robber)]


def product_single_cop(t1: FactorGraph, t2: FactorGraph) -> ProductSingleCop:
    """Single-cop strategy on T1 x T2 that starts at the center and moves only on odd distance."""
    for t in (t1, t2):
        if not t.is_tree:
            raise ValueError(f"{t!r} is not a tree")
    return ProductSingleCop([t1, t2])


def _bits(x: int, width: int) -> str:
    return format(x, f"0{width}b") if width else ""


def seq_prefix(s: str, n: int) -> FrozenSet[int]:
    """Coordinates in 0..n-1 whose ceil(lg n)-bit binary form starts with s."""
    width = Helper.ceil_lg(n)
    if len(s) > width:
        raise ValueError(f"Prefix {s!r} is longer than {width} bits")
    return frozenset(i for i in range(n) if _bits(i, width).startswith(s))


def reference_coord(i: int, n: int) -> int:
    """Coordinate that fixes cop i's inactive set: 2i, except n-2 for the last cop when n is even."""
    return 2 * i if 2 * i <= n - 1 else n - 2


def active_coords(i: int, j: int, n: int) -> FrozenSet[int]:
    """
    Active coordinates of cop i in phase j on a product of n trees.

    A coordinate is active when its first j bits differ from those of the
    cop's reference coordinate in at least one position.

    """
    k = cop_count(n)
    width = Helper.ceil_lg(n)
    if not 0 <= i < k:
        raise ValueError(f"Cop index {i} out of range for {k} cops")
    if not 1 <= j <= width - 1:
        raise ValueError(f"Phase {j} out of range 1..{width - 1}")
    prefix = _bits(reference_coord(i, n), width)[:j]
    return frozenset(range(n)) - seq_prefix(prefix, n)


def squads(n: int, phase: int) -> Dict[str, List[int]]:
    """Squad prefix -> member cops when every cop is in the given phase."""
    width = Helper.ceil_lg(n)
    members = {}
    for i in range(cop_count(n)):
        active_coords(i, phase, n)  # range checks
        prefix = _bits(reference_coord(i, n), width)[:phase]
        members.setdefault(prefix, []).append(i)
    return members


def active_table(n: int) -> List[List[FrozenSet[int]]]:
    """Row per cop, column per phase, of active coordinate sets."""
    phases = range(1, Helper.ceil_lg(n))
    return [[active_coords(i, j, n) for j in phases] for i in range(cop_count(n))]


def capture_bound(factors: Sequence[FactorGraph]) -> int:
    """(sum of radii) * ceil(lg n) - floor((n - 1) / 2) + 1 for a product of n trees."""
    n = len(factors)
    if n < 1:
        raise ValueError("capture_bound needs at least one factor")
    return sum(f.radius for f in factors) * Helper.ceil_lg(n) - (n - 1) // 2 + 1


def product_bound_terms(factors: Sequence[FactorGraph]) -> Tuple[int, int]:
    """Round budgets of the two steps of the squad strategy; they sum to `capture_bound`."""
    n = len(factors)
    total = sum(f.radius for f in factors)
    return total * (Helper.ceil_lg(n) - 1), total - (n - 1) // 2 + 1


@dataclass
class SquadState:
    phase: int
    active: FrozenSet[int]
    step: int
    agreed: FrozenSet[int] = frozenset()

    def inactive(self, n: int) -> FrozenSet[int]:
        return frozenset(range(n)) - self.active


@dataclass(frozen=True)
class SquadSnapshot:
    round: int
    robber: Vertex
    cops: Tuple[Vertex, ...]
    states: Tuple[SquadState, ...]


@lru_cache(maxsize=32)
def _endgame_table(adjacencies):
    from pycaptime.solver import solve

    pair = product([FactorGraph(adj) for adj in adjacencies])
    return solve(pair, 2)


class TreeChase(CopStrategy):
    """One cop on a single tree: start at the center and step toward the robber."""

    name = "tree-chase"

    def place(self, state: GameState) -> List[Vertex]:
        return [self.graph.center] * self.k

    def move(self, state: GameState) -> List[Vertex]:
        return greedy_cop(state)


class SquadStrategy(CopStrategy):
    name = "squad"

    def __init__(self, record: bool = False):
        """
        Parameters
        ----------
        record : bool, optional
            Keep a `SquadSnapshot` after every cop turn in `history`.

        """
        self.record = record

    def bind(self, graph: ProductGraph, k: int, rng: np.random.Generator):
        super().bind(graph, k, rng)
        _require_trees(graph)
        n = graph.n
        if k != cop_count(n):
            raise ValueError(f"The squad strategy uses {cop_count(n)} cops on {n} factors, got k={k}")

        self.n = n
        self.history: List[SquadSnapshot] = []
        self._last_robber: Optional[Vertex] = None
        self._delegate: Optional[CopStrategy] = None

        if n == 1:
            self._delegate = TreeChase()
        elif n == 2:
            from pycaptime.solver import extract_strategy

            self._delegate = extract_strategy(_endgame_table(tuple(f.adjacency for f in graph.factors)), "cops")
        if self._delegate is not None:
            self._delegate.bind(graph, k, rng)
            return

        self.width = Helper.ceil_lg(n)
        self.last_phase = self.width - 1
        self.states = [SquadState(1, active_coords(i, 1, n), 1) for i in range(k)]
        self.pairs = [frozenset(range(n)) - active_coords(i, self.last_phase, n) for i in range(k)]
        self._endgame = None
        if n % 2 == 0:
            tail = graph.factors[n - 2 :]
            self._endgame = _endgame_table(tuple(f.adjacency for f in tail))

    def place(self, state: GameState) -> List[Vertex]:
        if self._delegate is not None:
            return self._delegate.place(state)
        return [self.graph.center] * self.k

    def _advance(self, i: int, cop: Vertex, robber: Vertex):
        """Finish phases while the cop agrees with the robber on every active coordinate."""
        st = self.states[i]
        while st.step == 1 and all(cop[x] == robber[x] for x in st.active):
            if st.phase == self.last_phase:
                st.step = 2
                break
            st.phase += 1
            st.active = active_coords(i, st.phase, self.n)

    def _step1_move(self, i: int, cop: Vertex, robber: Vertex, changed: Optional[int], prev: Optional[Vertex]) -> Vertex:
        active = self.states[i].active
        if changed is not None and changed in active and cop[changed] == prev[changed]:
            return self.graph.step_in(cop, changed, robber[changed])
        for x in sorted(active):
            if cop[x] != robber[x]:
                return self.graph.step_in(cop, x, robber[x])
        return cop

    def _repair(self, cop: Vertex, robber: Vertex, pair: FrozenSet[int]) -> Optional[Vertex]:
        """Restore agreement outside the cop's inactive coordinates, if it was broken."""
        for x in range(self.n):
            if x not in pair and cop[x] != robber[x]:
                return self.graph.step_in(cop, x, robber[x])
        return None

    def _step2_move(self, i: int, cop: Vertex, robber: Vertex) -> Vertex:
        pair = self.pairs[i]
        repaired = self._repair(cop, robber, pair)
        if repaired is not None:
            return repaired
        if len(pair) == 2:
            return lemma1_step(self.graph, cop, robber, tuple(sorted(pair)))
        (c,) = pair
        if cop[c] != robber[c]:
            return self.graph.step_in(cop, c, robber[c])
        return cop

    def _endgame_moves(self, cops: Tuple[Vertex, Vertex], robber: Vertex) -> Tuple[Vertex, Vertex]:
        """Joint move of the two even-n endgame cops."""
        pair = self.pairs[-1]
        a, b = sorted(pair)
        repaired = [self._repair(c, robber, pair) for c in cops]
        if all(r is not None for r in repaired):
            return tuple(repaired)
        if any(r is not None for r in repaired):
            return tuple(r if r is not None else c for r, c in zip(repaired, cops))
        projected = tuple((c[a], c[b]) for c in cops)
        target = self._endgame.best_cop_move(projected, (robber[a], robber[b]))
        moved = []
        for c, (x, y) in zip(cops, target):
            moved.append(self.graph.with_coord(self.graph.with_coord(c, a, x), b, y))
        return tuple(moved)

    def move(self, state: GameState) -> List[Vertex]:
        if self._delegate is not None:
            return self._delegate.move(state)

        robber, prev = state.robber, self._last_robber
        changed = None
        if prev is not None and prev != robber:
            changed = self.graph.differing(prev, robber)[0]

        # A cop whose phase the robber's move completed passes this turn
        before = [(st.phase, st.step) for st in self.states]
        for i, cop in enumerate(state.cops):
            self._advance(i, cop, robber)
        passing = {i for i, st in enumerate(self.states) if (st.phase, st.step) != before[i]}

        moves = list(state.cops)
        endgame = []
        for i, cop in enumerate(state.cops):
            st = self.states[i]
            if self._endgame is not None and i >= self.k - 2 and st.step == 2:
                endgame.append(i)
            elif i in passing:
                continue
            elif st.step == 1:
                moves[i] = self._step1_move(i, cop, robber, changed, prev)
            else:
                moves[i] = self._step2_move(i, cop, robber)
        if endgame:
            if len(endgame) != 2:
                raise RuntimeError("Endgame cops entered the second step separately")
            if not passing & set(endgame):
                moves[endgame[0]], moves[endgame[1]] = self._endgame_moves((state.cops[endgame[0]], state.cops[endgame[1]]), robber)

        for i, cop in enumerate(moves):
            self._advance(i, cop, robber)
            st = self.states[i]
            st.agreed = frozenset(x for x in st.active if cop[x] == robber[x])

        if self.record:
            self.history.append(SquadSnapshot(state.round, robber, tuple(moves), tuple(replace(st) for st in self.states)))
        self._last_robber = robber
        return moves

    def inactive_partition(self) -> List[FrozenSet[int]]:
        """Distinct inactive coordinate sets of the current squads."""
        return sorted({st.inactive(self.n) for st in self.states}, key=sorted)


def squad_strategy(factors: Sequence[FactorGraph], record: bool = False) -> SquadStrategy:
    """Squad strategy for ceil((n + 1) / 2) cops on a product of n trees."""
    for f in factors:
        if not f.is_tree:
            raise ValueError(f"{f!r} is not a tree")
    return SquadStrategy(record=record)
