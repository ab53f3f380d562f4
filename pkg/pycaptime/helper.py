import time
from multiprocessing import Value


class Helper:
    """Small formatting and arithmetic helpers shared across the package."""

    @staticmethod
    def clear_line(width: int = 80):
        print(" " * width, end="\r", flush=True)

    @staticmethod
    def separator():
        """Rule drawn between sections of a run log."""
        return "=" * 30

    @staticmethod
    def ceil_lg(n: int) -> int:
        """Ceiling of the base-2 logarithm of a positive integer; ceil_lg(1) is 0."""
        if n < 1:
            raise ValueError(f"ceil_lg needs a positive integer, got {n}")
        return (n - 1).bit_length()

    @staticmethod
    def metadata_line(command: str, settings: dict) -> str:
        """The '# ' comment line written above every CSV."""
        pairs = " ".join(f"{key}={value}" for key, value in settings.items())
        return f"# pycaptime {command} {pairs}".rstrip()


class TrialCounter:
    """Number of finished trials, shared between worker processes."""

    def __init__(self):
        self.done = Value("i", 0)

    def increment(self):
        with self.done.get_lock():
            self.done.value += 1

    def value(self) -> int:
        with self.done.get_lock():
            return self.done.value


class Timer:
    def __init__(self):
        self.start = time.perf_counter()

    def elapsed(self, digits: int = None) -> float:
        """Seconds since the timer was created, optionally rounded."""
        seconds = time.perf_counter() - self.start
        return seconds if digits is None else round(seconds, digits)


class ProgressBar:
    """
    Console progress bar over a fixed number of trials.

    Redraws only when the drawn bar changes, so workers can call `increment`
    after every game.

    """

    width = 40

    def __init__(self, counter: TrialCounter, total: int, label: str = "", enabled: bool = True):
        self.counter = counter
        self.total = max(total, 1)
        self.label = label
        self.enabled = enabled
        self.drawn = ""

    def draw(self, force: bool = False):
        if not self.enabled:
            return
        done = self.counter.value()
        filled = self.width * done // self.total
        bar = "#" * filled + "." * (self.width - filled)
        if bar != self.drawn or force:
            self.drawn = bar
            print(f"[{bar}] {done}/{self.total} {self.label}", end="\r", flush=True)

    def increment(self):
        self.counter.increment()
        self.draw()

    def finish(self):
        if self.enabled:
            self.draw(force=True)
            Helper.clear_line(self.width + len(self.label) + 30)
