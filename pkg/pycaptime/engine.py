"""
Referee for one game of Cops and Robbers on a product graph.

Order of events: the cops place, the robber places having seen them, then
rounds 1, 2, ... each consist of a cop phase (any subset of the cops moves one
edge) and a robber phase (the robber moves one edge or passes). Capture is
checked after every phase; a capture during either phase of round r gives a
game of length r, and a robber placed on a cop gives length 0.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from pycaptime.graphs import ProductGraph, Vertex
from pycaptime.helper import Helper


class Phase(Enum):
    COPS_PLACE = "cops-place"
    ROBBER_PLACE = "robber-place"
    COPS = "cops"
    ROBBER = "robber"


@dataclass(frozen=True)
class GameState:
    graph: ProductGraph
    k: int
    cops: Tuple[Vertex, ...]
    robber: Optional[Vertex]
    round: int
    to_move: Phase


class StrategyFault(Exception):
    def __init__(self, role: str, offender: Union[int, str], message: str):
        """
        Raised when a strategy returns an illegal placement or move.

        Parameters
        ----------
        role : str
            "cops" or "robber".
        offender : int or str
            Index of the offending cop, or "robber".
        message : str
            What was wrong.

        """
        super().__init__(f"{role} strategy fault ({offender}): {message}")
        self.role = role
        self.offender = offender
        self.message = message


class Strategy(ABC):
    """Common base of cop and robber strategies; instances carry per-game state."""

    name = "strategy"
    role = ""

    def bind(self, graph: ProductGraph, k: int, rng: np.random.Generator):
        """
        Attach the strategy to a new game. Called by the engine before placement.

        Subclasses that keep per-game state reset it here and reject graphs they
        cannot play on with a `ValueError`.

        """
        self.graph = graph
        self.k = k
        self.rng = rng

    @abstractmethod
    def place(self, state: GameState):
        ...

    @abstractmethod
    def move(self, state: GameState):
        ...


class CopStrategy(Strategy):
    """Places and moves all k cops. Both methods return one vertex per cop, in cop order."""

    role = "cops"

    @abstractmethod
    def place(self, state: GameState) -> Sequence[Vertex]:
        ...

    @abstractmethod
    def move(self, state: GameState) -> Sequence[Vertex]:
        ...


class RobberStrategy(Strategy):
    role = "robber"

    @abstractmethod
    def place(self, state: GameState) -> Vertex:
        ...

    @abstractmethod
    def move(self, state: GameState) -> Vertex:
        ...


@dataclass(frozen=True)
class Captured:
    round: int
    by_cop: int

    def __str__(self):
        return f"captured round={self.round} by={self.by_cop}"


@dataclass(frozen=True)
class Survived:
    rounds_played: int

    def __str__(self):
        return f"survived rounds={self.rounds_played}"


@dataclass
class RoundRecord:
    cop_moves: List[Tuple[int, Vertex]] = field(default_factory=list)
    robber_move: Optional[Vertex] = None


@dataclass
class Transcript:
    graph_name: str
    k: int
    seed: int
    cop_start: Tuple[Vertex, ...]
    robber_start: Vertex
    rounds: List[RoundRecord]
    outcome: Union[Captured, Survived]
    start_distance: Optional[int] = None  # Distance at the robber's first turn

    @property
    def captured(self) -> bool:
        return isinstance(self.outcome, Captured)

    @property
    def length(self) -> int:
        if self.captured:
            return self.outcome.round
        return self.outcome.rounds_played

    def cop_paths(self) -> List[List[Vertex]]:
        """Positions each cop occupied, starting with its placement; passes are not repeated."""
        paths = [[v] for v in self.cop_start]
        for record in self.rounds:
            for i, v in record.cop_moves:
                paths[i].append(v)
        return paths

    def to_text(self, graph: ProductGraph) -> str:
        fmt = graph.format_vertex
        lines = [f"# graph={self.graph_name} k={self.k} seed={self.seed}"]
        placement = " ".join(f"{i}->{fmt(v)}" for i, v in enumerate(self.cop_start))
        lines.append(f"0: C {placement} ; R ->{fmt(self.robber_start)}")
        for r, record in enumerate(self.rounds, start=1):
            cops = " ".join(f"{i}->{fmt(v)}" for i, v in record.cop_moves)
            robber = f"->{fmt(record.robber_move)}" if record.robber_move is not None else "-"
            lines.append(f"{r}: C {cops} ; R {robber}".replace("C  ;", "C ;"))
        lines.append(str(self.outcome))
        return "\n".join(lines) + "\n"

    def write(self, path: Union[str, Path], graph: ProductGraph):
        Path(path).write_text(self.to_text(graph), encoding="utf8")


@dataclass(frozen=True)
class TrialSummary:
    trial: int
    seed: int
    outcome: str  # "captured" or "survived"
    length: int
    start_distance: Optional[int] = None


def summarize(transcript: Transcript, trial: int) -> TrialSummary:
    outcome = "captured" if transcript.captured else "survived"
    return TrialSummary(trial, transcript.seed, outcome, transcript.length, transcript.start_distance)


def default_max_rounds(graph: ProductGraph) -> int:
    """4 * (sum of factor radii) * ceil(lg n), which is 4 n ceil(lg n) on Q_n; at least 4."""
    return 4 * max(1, graph.radius) * max(1, Helper.ceil_lg(graph.n))


def strategy_rngs(seed: int) -> Tuple[np.random.Generator, np.random.Generator]:
    """Independent cop and robber generators derived from one game seed."""
    return np.random.default_rng([seed, 0]), np.random.default_rng([seed, 1])


def _check_vertex(graph: ProductGraph, v, role: str, offender) -> Vertex:
    v = tuple(int(x) for x in v) if isinstance(v, (tuple, list, np.ndarray)) else v
    if not graph.is_vertex(v):
        raise StrategyFault(role, offender, f"{v!r} is not a vertex of {graph.name}")
    return v


def _first_capturer(cops: Sequence[Vertex], robber: Vertex) -> Optional[int]:
    for i, c in enumerate(cops):
        if c == robber:
            return i
    return None


def play(
    graph: ProductGraph,
    k: int,
    cop_strategy: CopStrategy,
    robber_strategy: RobberStrategy,
    max_rounds: int = None,
    seed: int = 0,
) -> Transcript:
    """
    Play one game and return its transcript.

    Parameters
    ----------
    graph : ProductGraph
        The board.
    k : int
        Number of cops, at least one.
    cop_strategy : CopStrategy
        Places and moves all cops.
    robber_strategy : RobberStrategy
        Places and moves the robber.
    max_rounds : int, optional
        Round cap; defaults to `default_max_rounds(graph)`.
    seed : int, optional
        Game seed, from which the strategies' generators are derived.

    Raises
    ------
    StrategyFault
        If a strategy places or moves illegally.

    """
    if k < 1:
        raise ValueError(f"At least one cop is required, got k={k}")
    if max_rounds is None:
        max_rounds = default_max_rounds(graph)
    if max_rounds < 1:
        raise ValueError(f"max_rounds must be positive, got {max_rounds}")

    cop_rng, robber_rng = strategy_rngs(seed)
    cop_strategy.bind(graph, k, cop_rng)
    robber_strategy.bind(graph, k, robber_rng)

    # Placement
    state = GameState(graph, k, (), None, 0, Phase.COPS_PLACE)
    placed = list(cop_strategy.place(state))
    if len(placed) != k:
        raise StrategyFault("cops", "placement", f"placed {len(placed)} cops, expected {k}")
    cops = tuple(_check_vertex(graph, v, "cops", i) for i, v in enumerate(placed))

    state = GameState(graph, k, cops, None, 0, Phase.ROBBER_PLACE)
    robber = _check_vertex(graph, robber_strategy.place(state), "robber", "robber")

    transcript = Transcript(graph.name, k, seed, cops, robber, [], Survived(0))
    capturer = _first_capturer(cops, robber)
    if capturer is not None:
        transcript.outcome = Captured(0, capturer)
        return transcript

    for r in range(1, max_rounds + 1):
        record = RoundRecord()
        transcript.rounds.append(record)

        # Cop phase
        state = GameState(graph, k, cops, robber, r, Phase.COPS)
        moved = list(cop_strategy.move(state))
        if len(moved) != k:
            raise StrategyFault("cops", "move", f"returned {len(moved)} positions in round {r}, expected {k}")
        new_cops = []
        for i, (old, new) in enumerate(zip(cops, moved)):
            new = _check_vertex(graph, new, "cops", i)
            if new != old:
                if not graph.is_adjacent(old, new):
                    raise StrategyFault(
                        "cops", i, f"round {r}: {graph.format_vertex(old)} -> {graph.format_vertex(new)} is not an edge"
                    )
                record.cop_moves.append((i, new))
            new_cops.append(new)
        cops = tuple(new_cops)

        capturer = _first_capturer(cops, robber)
        if capturer is not None:
            transcript.outcome = Captured(r, capturer)
            return transcript

        if transcript.start_distance is None:
            transcript.start_distance = int(graph.distances(cops, robber).min())

        # Robber phase
        state = GameState(graph, k, cops, robber, r, Phase.ROBBER)
        new_robber = _check_vertex(graph, robber_strategy.move(state), "robber", "robber")
        if not graph.is_legal_move(robber, new_robber):
            raise StrategyFault(
                "robber",
                "robber",
                f"round {r}: {graph.format_vertex(robber)} -> {graph.format_vertex(new_robber)} is not an edge",
            )
        robber = new_robber
        record.robber_move = robber

        capturer = _first_capturer(cops, robber)
        if capturer is not None:
            transcript.outcome = Captured(r, capturer)
            return transcript

    transcript.outcome = Survived(max_rounds)
    return transcript


def replay(transcript: Transcript, graph: ProductGraph):
    """
    Re-validate a transcript against the graph.

    Every recorded move must be a pass or follow an edge, and the recorded
    outcome must match the first round in which a cop and the robber coincide.

    Raises
    ------
    ValueError
        Describing the first inconsistency found.

    """
    if len(transcript.cop_start) != transcript.k:
        raise ValueError(f"Transcript places {len(transcript.cop_start)} cops, expected {transcript.k}")
    for v in (*transcript.cop_start, transcript.robber_start):
        if not graph.is_vertex(v):
            raise ValueError(f"Placement {v!r} is not a vertex of {graph.name}")

    cops = list(transcript.cop_start)
    robber = transcript.robber_start

    def expect_capture(at_round: int):
        capturer = _first_capturer(cops, robber)
        if capturer is None:
            return False
        if not (isinstance(transcript.outcome, Captured) and transcript.outcome.round == at_round):
            raise ValueError(f"Cop {capturer} meets the robber in round {at_round} but the outcome is {transcript.outcome}")
        return True

    if expect_capture(0):
        return

    for r, record in enumerate(transcript.rounds, start=1):
        for i, v in record.cop_moves:
            if not graph.is_legal_move(cops[i], v):
                raise ValueError(f"Round {r}: cop {i} move {cops[i]} -> {v} is illegal")
            cops[i] = v
        if expect_capture(r):
            if r != len(transcript.rounds):
                raise ValueError(f"Transcript continues after the capture in round {r}")
            return
        if record.robber_move is None:
            raise ValueError(f"Round {r}: robber move missing without a capture")
        if not graph.is_legal_move(robber, record.robber_move):
            raise ValueError(f"Round {r}: robber move {robber} -> {record.robber_move} is illegal")
        robber = record.robber_move
        if expect_capture(r):
            if r != len(transcript.rounds):
                raise ValueError(f"Transcript continues after the capture in round {r}")
            return

    if isinstance(transcript.outcome, Captured):
        raise ValueError(f"Outcome claims {transcript.outcome} but no capture occurs")
    if transcript.outcome.rounds_played != len(transcript.rounds):
        raise ValueError(f"Outcome claims {transcript.outcome.rounds_played} rounds, transcript has {len(transcript.rounds)}")
