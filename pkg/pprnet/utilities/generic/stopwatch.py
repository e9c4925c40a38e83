import time
from typing import Callable


class Stopwatch:
    """Context manager measuring the time spent inside its with-block."""

    def __init__(self, timing_function: Callable[[], float] = time.perf_counter):
        """

        Parameters
        ----------
        timing_function: Callable (default=time.perf_counter)
            Clock to read, e.g. time.perf_counter or time.process_time.
        """
        self._clock = timing_function
        self._running = False
        self._start = 0.0
        self._stop = 0.0

    def __enter__(self) -> "Stopwatch":
        self._running = True
        self._start = self._clock()
        return self

    def __exit__(self, *args) -> bool:
        self._stop = self._clock()
        self._running = False
        return False

    @property
    def elapsed_time(self) -> float:
        """Seconds spent in the with-block, so far if it has not exited yet."""
        end = self._clock() if self._running else self._stop
        return end - self._start
