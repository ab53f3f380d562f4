import logging
import queue
from multiprocessing import Manager, Queue
from typing import List, Optional, Sequence

import numpy as np

from pycaptime.options import Options


class QueueHandler:
    def __init__(self, work: Sequence[int], opts: Options):
        """
        Initialize a QueueHandler object.

        Parameters
        ----------
        work : sequence of int
            Trial indices to play.
        opts : Options
            The options object.

        """
        self.work = list(work)
        self.opts = opts
        self.logger = logging.getLogger(opts.log_name)
        self.result_q = Queue()
        self.proc_count = 0
        self.job_qs = []

    def get_longest_q(self) -> Optional[int]:
        """
        Get the index of the job queue with the most blocks, or None if all queues are empty.
        """
        q_lengths = [q.qsize() for q in self.job_qs]
        if all(q == 0 for q in q_lengths):
            return None
        return int(np.argmax(q_lengths))

    def get_work(self, i: int) -> Optional[List[int]]:
        """
        Get the next block of trials for the i-th process.

        When its own queue is empty the process steals from the longest queue if
        `redivide_work` is set. Otherwise it signals "STOP" on the result queue and
        receives None.

        """
        try:
            return self.job_qs[i].get_nowait()
        except queue.Empty:
            longest = self.get_longest_q()
            if self.opts.redivide_work and longest is not None:
                return self.get_work(longest)
            if self.opts.process_logging:
                self.logger.info(f"PID: {i} exited")
            self.result_q.put("STOP")
            return None

    def put_result(self, result):
        self.result_q.put(result)

    def get_result(self) -> list:
        """
        Collect results until every process has sent "STOP".
        """
        results = []
        for _ in range(self.proc_count):
            while True:
                result = self.result_q.get()
                if isinstance(result, str) and result == "STOP":
                    break
                results.append(result)
        return results

    def empty_job_qs(self):
        for job_q in self.job_qs:
            while True:
                try:
                    job_q.get_nowait()
                except queue.Empty:
                    break

    def split_work(self):
        """
        Cut the trials into blocks of `block_size` and deal the blocks over one job queue per process.
        """
        size = self.opts.block_size
        blocks = [self.work[i : i + size] for i in range(0, len(self.work), size)]
        groups = np.array_split(np.arange(len(blocks)), min(self.opts.cpu_count, len(blocks)))
        groups = [g for g in groups if g.size > 0]

        manager = Manager()
        self.proc_count = len(groups)
        self.job_qs = [manager.Queue() for _ in range(self.proc_count)]
        self.logger.info(f"Dividing {len(self.work)} trial(s) over {self.proc_count} process(es)")

        for job_q, group in zip(self.job_qs, groups):
            for b in group:
                job_q.put(blocks[b])
