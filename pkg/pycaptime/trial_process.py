import logging
from multiprocessing import Process

import cloudpickle

from pycaptime.helper import ProgressBar
from pycaptime.options import Options
from pycaptime.queue_handler import QueueHandler


class TrialProcess(Process):
    def __init__(self, p_num: int, opts: Options, payload: bytes, queues: QueueHandler, progress: ProgressBar):
        """
        Initialize the TrialProcess object.

        Parameters
        ----------
        p_num : int
            The process number.
        opts : Options
            The options object.
        payload : bytes
            The cloudpickled `GameConfig`.
        queues : QueueHandler
            The queue handler object.
        progress : ProgressBar
            The shared progress bar.

        """
        super().__init__()
        self.p_num = p_num
        self.opts = opts
        self.payload = payload
        self.queues = queues
        self.progress = progress
        self.logger = None

    def run(self):
        """
        Play trials block by block until the queues run dry.

        Each trial's summary, or a `TrialFailure` when the game raised, goes to
        the result queue.

        """
        from pycaptime.batch import TrialFailure, play_trial

        if self.opts.process_logging:
            self.logger = logging.getLogger(self.opts.log_name)
            self.logger.setLevel(logging.INFO)

        config = cloudpickle.loads(self.payload)

        while True:
            work = self.queues.get_work(self.p_num)
            if not work:
                break

            for trial in work:
                seed = self.opts.seed + trial
                try:
                    result = play_trial(config, trial, seed)
                except Exception as e:
                    result = TrialFailure(trial, seed, f"{type(e).__name__}: {e}")
                self.queues.put_result(result)
                self.progress.increment()

                if self.opts.process_logging:
                    self.logger.info(f"Process: {self.p_num}, trial: {trial}, seed: {seed}, result: {result}")
