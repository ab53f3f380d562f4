"""
Monte Carlo over game seeds.

Trial t of a batch plays with seed base_seed + t, so a batch gives the same
summaries whatever the worker count or completion order.
"""

import copy
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Optional, Union

import cloudpickle
import pandas as pd

from pycaptime.engine import CopStrategy, RobberStrategy, TrialSummary, play, summarize
from pycaptime.graphs import ProductGraph
from pycaptime.helper import Helper, ProgressBar, TrialCounter
from pycaptime.options import Options
from pycaptime.process_handler import ProcessHandler
from pycaptime.queue_handler import QueueHandler

SUMMARY_COLUMNS = ["trial", "seed", "outcome", "length"]


@dataclass
class GameConfig:
    """
    Everything needed to play one trial. Strategies keep per-game state, so
    the config holds factories and every trial builds fresh instances.
    """

    graph: ProductGraph
    k: int
    cop_factory: Callable[[], CopStrategy]
    robber_factory: Callable[[], RobberStrategy]
    max_rounds: Optional[int] = None

    def pickle(self) -> bytes:
        return cloudpickle.dumps(self)


@dataclass(frozen=True)
class TrialFailure:
    """A trial that raised inside a worker, as sent back over the result queue."""

    trial: int
    seed: int
    message: str


class TrialError(Exception):
    def __init__(self, trial: int, seed: int, message: str):
        super().__init__(f"Trial {trial} (seed {seed}) failed: {message}")
        self.trial = trial
        self.seed = seed
        self.message = message


def play_trial(config: GameConfig, trial: int, seed: int) -> TrialSummary:
    transcript = play(config.graph, config.k, config.cop_factory(), config.robber_factory(), config.max_rounds, seed)
    return summarize(transcript, trial)


def _play_local(config: GameConfig, trials: int, opts: Options, progress: ProgressBar) -> list:
    results = []
    for trial in range(trials):
        seed = opts.seed + trial
        try:
            results.append(play_trial(config, trial, seed))
        except Exception as e:
            raise TrialError(trial, seed, f"{type(e).__name__}: {e}") from e
        progress.increment()
    return results


def batch_play(config: GameConfig, trials: int, base_seed: int = None, opts: Options = None) -> List[TrialSummary]:
    """
    Play `trials` games and return their summaries sorted by trial index.

    Parameters
    ----------
    config : GameConfig
        Graph, cop count, strategy factories and round cap.
    trials : int
        Number of games.
    base_seed : int, optional
        Seed of trial 0, defaults to `opts.seed`.
    opts : Options, optional
        Worker count, block size, work stealing, timeout and logging.

    Raises
    ------
    TrialError
        For the lowest-indexed trial that failed.

    """
    if trials < 1:
        raise ValueError(f"Trial count must be positive, got {trials}")
    opts = copy.copy(opts) if opts is not None else Options({"progress_bar": False})
    if base_seed is not None:
        opts.seed = base_seed
    logger = logging.getLogger(opts.log_name)

    progress = ProgressBar(TrialCounter(), trials, "games", enabled=opts.progress_bar)
    if opts.cpu_count == 1 or trials <= opts.block_size:
        results = _play_local(config, trials, opts, progress)
    else:
        queues = QueueHandler(range(trials), opts)
        queues.split_work()
        with ProcessHandler(opts, config.pickle(), queues, progress) as procs:
            results = queues.get_result()

        failures = sorted((r for r in results if isinstance(r, TrialFailure)), key=lambda r: r.trial)
        if failures:
            first = failures[0]
            raise TrialError(first.trial, first.seed, first.message)
        if len(results) != trials:
            missing = min(set(range(trials)) - {r.trial for r in results})
            reason = "timed out" if procs.timed_out else "no result"
            raise TrialError(missing, opts.seed + missing, f"{reason}, {len(results)} of {trials} trials finished")

    progress.finish()
    results = sorted(results, key=lambda r: r.trial)
    captured = sum(r.outcome == "captured" for r in results)
    logger.info(f"Played {trials} trial(s) on {config.graph.name} from seed {opts.seed}: {captured} captured")
    return results


def summaries_frame(summaries: List[TrialSummary]) -> pd.DataFrame:
    return pd.DataFrame([(s.trial, s.seed, s.outcome, s.length) for s in summaries], columns=SUMMARY_COLUMNS)


def write_csv(frame: pd.DataFrame, path: Union[str, Path, None], command: str, settings: dict):
    """Write a frame as CSV after the metadata comment line; path None writes to stdout."""
    text = Helper.metadata_line(command, settings) + "\n" + frame.to_csv(index=False)
    if path is None:
        print(text, end="")
    else:
        Path(path).write_text(text, encoding="utf8")
