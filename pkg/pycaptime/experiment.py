import logging
from dataclasses import asdict, dataclass
from functools import partial
from typing import Callable, List, Optional

import numpy as np

from pycaptime.batch import GameConfig, batch_play, summaries_frame, write_csv
from pycaptime.cops import GreedyCops, ParityGreedyCops, ProductSingleCop, SquadStrategy, cop_count
from pycaptime.engine import CopStrategy, RobberStrategy, TrialSummary, default_max_rounds
from pycaptime.graphs import ProductGraph, parse_graph_spec
from pycaptime.helper import Helper, Timer
from pycaptime.logs import Logs
from pycaptime.options import Options
from pycaptime.robbers import MaxMinRobber, PlacementPolicy, RandomRobber
from pycaptime.solver import OptimalCops, OptimalRobber, solve

COP_STRATEGIES = ("greedy", "parity-greedy", "lemma1", "squad", "solver-optimal")
ROBBER_STRATEGIES = ("random", "maxmin", "solver-optimal")


@dataclass
class ExperimentConfig:
    graph: str  # Graph spec, e.g. "Q8" or "T7:42xP2"
    cops: str = "greedy"
    robber: str = "random"
    k: Optional[int] = None  # Defaults to what the cop strategy needs
    trials: int = 1
    seed: int = 0
    max_rounds: Optional[int] = None
    out: Optional[str] = None
    robber_start: Optional[str] = None  # Fixed robber placement, in `format_vertex` syntax
    assert_bound: Optional[int] = None

    def check(self):
        if self.cops not in COP_STRATEGIES:
            raise ValueError(f"Unknown cop strategy {self.cops!r}, expected one of {', '.join(COP_STRATEGIES)}")
        if self.robber not in ROBBER_STRATEGIES:
            raise ValueError(f"Unknown robber strategy {self.robber!r}, expected one of {', '.join(ROBBER_STRATEGIES)}")
        if self.k is not None and self.k < 1:
            raise ValueError(f"k must be positive, got {self.k}")


def default_cop_count(strategy: str, graph: ProductGraph) -> int:
    if strategy == "squad":
        return cop_count(graph.n)
    return 1


class Experiment:
    def __init__(self, config: ExperimentConfig, opts: dict = None):
        """
        Initialize an Experiment: parse the graph, build the strategy factories and set up logging.

        Parameters
        ----------
        config : ExperimentConfig
            What to play.
        opts : dict, optional
            Run options, see `Options`. Seed, trials and round cap come from the config.

        """
        config.check()
        opts = dict(opts or {})
        opts.update({"seed": config.seed, "trials": config.trials, "max_rounds": config.max_rounds})
        self.config = config
        self.opts = Options(opts)
        self.opts.check()
        self.logs = Logs(self.opts)

        self.logger = logging.getLogger(self.opts.log_name)
        self.logger.setLevel(logging.INFO)
        self.opts.log()

        self.graph = parse_graph_spec(config.graph, self.opts.explicit_cap, self.opts.factor_cap)
        self.k = config.k if config.k is not None else default_cop_count(config.cops, self.graph)
        self.max_rounds = config.max_rounds or default_max_rounds(self.graph)

        self.table = None
        if "solver-optimal" in (config.cops, config.robber):
            self.table = solve(self.graph, self.k, self.opts)

        self.summaries: List[TrialSummary] = []

    def _placement(self) -> PlacementPolicy:
        if self.config.robber_start is not None:
            return PlacementPolicy("fixed", self.graph.parse_vertex(self.config.robber_start))
        return PlacementPolicy("far", restarts=self.opts.far_restarts)

    def cop_factory(self) -> Callable[[], CopStrategy]:
        name = self.config.cops
        if name == "greedy":
            return GreedyCops
        if name == "parity-greedy":
            return ParityGreedyCops
        if name == "lemma1":
            return ProductSingleCop
        if name == "squad":
            return SquadStrategy
        return partial(OptimalCops, self.table)

    def robber_factory(self) -> Callable[[], RobberStrategy]:
        name = self.config.robber
        if name == "random":
            return partial(RandomRobber, self._placement())
        if name == "maxmin":
            return partial(MaxMinRobber, self._placement())
        start = self.graph.parse_vertex(self.config.robber_start) if self.config.robber_start else None
        return partial(OptimalRobber, self.table, start)

    def game_config(self) -> GameConfig:
        return GameConfig(self.graph, self.k, self.cop_factory(), self.robber_factory(), self.max_rounds)

    def violations(self, bound: int = None) -> List[TrialSummary]:
        """Trials that ran longer than the bound, survivals included."""
        bound = bound if bound is not None else self.config.assert_bound
        if bound is None:
            return []
        return [s for s in self.summaries if s.outcome != "captured" or s.length > bound]

    def settings(self) -> dict:
        settings = {key: value for key, value in asdict(self.config).items() if value is not None and key != "out"}
        settings["k"] = self.k
        settings["max_rounds"] = self.max_rounds
        return settings

    def run(self) -> List[TrialSummary]:
        """
        Play every trial and write the summary CSV.
        """
        self.play()
        write_csv(summaries_frame(self.summaries), self.config.out, "simulate", self.settings())
        return self.summaries

    def play(self) -> List[TrialSummary]:
        """
        Play every trial and log a summary of the outcome.
        """
        self.runtime = Timer()
        self.summaries = batch_play(self.game_config(), self.config.trials, self.config.seed, self.opts)

        lengths = np.array([s.length for s in self.summaries])
        captured = sum(s.outcome == "captured" for s in self.summaries)
        self.runtime = self.runtime.elapsed(2)

        self.logger.info(Helper.separator())
        self.logger.info(f"Runtime: {self.runtime} seconds")
        self.logger.info(f"Trials: {len(self.summaries)}")
        self.logger.info(f"Captured: {captured}")
        self.logger.info(f"Mean length: {lengths.mean()}")
        self.logger.info(f"Max length: {lengths.max()}")
        if self.config.assert_bound is not None:
            self.logger.info(f"Bound {self.config.assert_bound} violations: {len(self.violations())}")
        self.logs.close()
        return self.summaries
