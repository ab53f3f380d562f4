import logging
import time
from threading import Event, Thread

from pycaptime.helper import ProgressBar, Timer
from pycaptime.options import Options
from pycaptime.queue_handler import QueueHandler
from pycaptime.trial_process import TrialProcess


class ProcessHandler:
    """
    Owns the trial workers of one batch.

    Used as a context manager: entering starts one `TrialProcess` per job
    queue, leaving joins them. With `process_timeout` set, a watchdog thread
    drains the job queues once the batch runs out of time; workers then finish
    the trial they are playing and exit, and `timed_out` is set.
    """

    poll_interval = 0.5

    def __init__(self, opts: Options, payload: bytes, queues: QueueHandler, progress: ProgressBar):
        """
        Parameters
        ----------
        opts : Options
            Seed, timeout and logging settings.
        payload : bytes
            The cloudpickled game configuration shipped to every worker.
        queues : QueueHandler
            Job queues, already filled by `split_work`.
        progress : ProgressBar
            Shared progress bar, incremented once per finished trial.

        """
        self.opts = opts
        self.payload = payload
        self.queues = queues
        self.progress = progress
        self.logger = logging.getLogger(opts.log_name)
        self.procs = []
        self.timed_out = False
        self._done = Event()
        self._watchdog = Thread(target=self._watch, daemon=True) if opts.process_timeout else None

    def __enter__(self):
        self.runtime = Timer()
        self.procs = [
            TrialProcess(p_num, self.opts, self.payload, self.queues, self.progress)
            for p_num in range(self.queues.proc_count)
        ]
        self.logger.info(f"Starting {len(self.procs)} worker process(es)")
        for p in self.procs:
            p.start()
        if self._watchdog is not None:
            self._watchdog.start()
        return self

    def __exit__(self, exc_type, exc, tb):
        for p in self.procs:
            p.join()
        self._done.set()
        if self._watchdog is not None:
            self._watchdog.join()
        self.logger.info(f"Joined {len(self.procs)} worker process(es) after {self.runtime.elapsed(2)} seconds")
        return False

    def _watch(self):
        while not self._done.is_set():
            if self.runtime.elapsed() > self.opts.process_timeout:
                self.timed_out = True
                self.logger.info(f"Timed out after {self.opts.process_timeout} seconds, draining the job queues")
                self.queues.empty_job_qs()
                return
            if not any(p.is_alive() for p in self.procs):
                return
            time.sleep(self.poll_interval)
