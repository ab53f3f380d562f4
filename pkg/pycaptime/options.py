import logging
import time
from multiprocessing import cpu_count

from pycaptime.helper import Helper


class Options:
    def __init__(self, opts: dict = None):
        """
        Initialize options with default values, and override them with user-defined options.

        Parameters
        ----------
        opts : dict, optional
            A dictionary containing user-defined options.

        """
        opts = opts or {}
        self.name = opts.get("name", "pycaptime")  # Name of the run
        self.seed = opts.get("seed", 0)  # Base seed, trial t uses seed + t
        self.trials = opts.get("trials", 1)  # Number of games to play
        self.max_rounds = opts.get("max_rounds", None)  # Round cap, None for the engine default
        self.cpu_count = opts.get("cpu_count", cpu_count())  # Number of CPUs to use
        self.redivide_work = opts.get("redivide_work", True)  # Whether idle workers steal trials
        self.block_size = opts.get("block_size", 25)  # Trials per job block
        self.logdir = opts.get("logging_folder", "logs")  # Folder to save logs
        self.process_logging = opts.get("process_logging", False)  # Whether to enable process logging
        self.process_timeout = opts.get("process_timeout", None)  # Timeout for processes
        self.progress_bar = opts.get("progress_bar", True)  # Whether to print a progress bar
        self.explicit_cap = opts.get("explicit_cap", 4096)  # Largest product materialized explicitly
        self.factor_cap = opts.get("factor_cap", 1024)  # Largest factor with an all-pairs table
        self.state_budget = opts.get("state_budget", 10**7)  # Largest solver state count
        self.far_restarts = opts.get("far_restarts", 32)  # Random starts of the far placement ascent
        self.slack = opts.get("slack", 1e-12)  # Float comparison slack
        self.horizon_cap = opts.get("horizon_cap", 10**4)  # Largest distance chain horizon

        self.time_created = time.strftime("%Y%m%d-%H%M%S")  # Time the options object was created
        self.log_name = self.name + "_" + str(self.time_created)  # Name of log file

    def log(self):
        """
        Log the options using the logging module.
        """
        self.logger = logging.getLogger(self.log_name)
        self.logger.info(f"Name: {self.name}")
        self.logger.info(f"Seed: {self.seed}")
        self.logger.info(f"Trials: {self.trials}")
        self.logger.info(f"Max rounds: {self.max_rounds}")
        self.logger.info(f"CPU Count: {self.cpu_count}")
        self.logger.info(f"Redivide work: {self.redivide_work}")
        self.logger.info(f"Block size: {self.block_size}")
        self.logger.info(f"Explicit cap: {self.explicit_cap}")
        self.logger.info(f"Factor cap: {self.factor_cap}")
        self.logger.info(f"State budget: {self.state_budget}")
        self.logger.info(Helper.separator())

    def check(self):
        """
        Check if the options are valid.

        Raises
        ------
        ValueError
            If a count, cap or budget is not positive.

        """
        if self.trials < 1:
            raise ValueError(f"Trial count must be positive, got {self.trials}")

        if self.max_rounds is not None and self.max_rounds < 1:
            raise ValueError(f"max_rounds must be positive, got {self.max_rounds}")

        if self.cpu_count < 1:
            raise ValueError(f"cpu_count must be positive, got {self.cpu_count}")

        if self.block_size < 1:
            raise ValueError(f"block_size must be positive, got {self.block_size}")

        if min(self.explicit_cap, self.factor_cap, self.state_budget, self.horizon_cap) < 1:
            raise ValueError("Caps and budgets must be positive")

        if self.slack < 0:
            raise ValueError(f"slack must be nonnegative, got {self.slack}")
