import logging
from pathlib import Path

from pycaptime.options import Options

LIBRARY_LOGGER = "pycaptime"
LOG_FORMAT = "[%(asctime)s] %(message)s"

logging.getLogger(LIBRARY_LOGGER).addHandler(logging.NullHandler())


def get_logger(opts: Options = None) -> logging.Logger:
    """Return the run logger when options are given, the library logger otherwise."""
    return logging.getLogger(opts.log_name if opts is not None else LIBRARY_LOGGER)


class Logs:
    def __init__(self, opts: Options):
        """
        Attach a file handler for one run to the logger named after the run.

        Parameters
        ----------
        opts : Options
            Supplies the logging folder and the run's log name.

        """
        self.logdir = Path(opts.logdir).absolute()
        self.logdir.mkdir(parents=True, exist_ok=True)
        self.logfile = self.logdir / f"{opts.log_name}.log"

        self.logger = get_logger(opts)
        self.logger.setLevel(logging.INFO)
        self.handler = logging.FileHandler(self.logfile, encoding="utf8")
        self.handler.setFormatter(logging.Formatter(LOG_FORMAT))
        self.handler.setLevel(logging.INFO)
        self.logger.addHandler(self.handler)

    def close(self):
        """Detach and close the file handler so repeated runs do not stack handlers."""
        self.logger.removeHandler(self.handler)
        self.handler.close()
