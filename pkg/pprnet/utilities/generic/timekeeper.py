from contextlib import contextmanager
from typing import Iterator, Optional, NamedTuple, List, Any, Dict
import logging

import psutil

from .stopwatch import Stopwatch

log = logging.getLogger(__name__)


class Stage(NamedTuple):
    name: str
    stopwatch: Stopwatch
    time_limit: Optional[float] = None

    @property
    def time_left(self) -> float:
        """Seconds left before `time_limit`, raises TypeError without a limit."""
        return self.time_limit - self.stopwatch.elapsed_time  # type: ignore

    def exceeded_limit(self, margin: float = 0.0) -> bool:
        """True iff a limit was specified and it is exceeded by `margin` seconds."""
        if self.time_limit is not None:
            return self.time_limit - self.stopwatch.elapsed_time < -margin
        return False


def _resident_memory_mb() -> float:
    return psutil.Process().memory_info().rss / 2**20


class TimeKeeper:
    """Times the stages of a pipeline run and logs their start and stop."""

    def __init__(self) -> None:
        self.current_stage: Optional[Stage] = None
        self.stages: List[Stage] = []

    @property
    def durations(self) -> Dict[str, float]:
        """Total seconds per stage name, summed over repeated stages."""
        totals: Dict[str, float] = {}
        for stage in self.stages:
            totals[stage.name] = (
                totals.get(stage.name, 0.0) + stage.stopwatch.elapsed_time
            )
        return totals

    @contextmanager
    def start_activity(
        self,
        activity: str,
        time_limit: Optional[float] = None,
        activity_meta: Optional[List[Any]] = None,
    ) -> Iterator[Stopwatch]:
        """Mark the start of a pipeline stage and time it until the block exits.

        Parameters
        ----------
        activity: str
            Name of the stage, e.g. 'preprocess' or 'tune'.
        time_limit: float, optional (default=None)
            Intended time limit of the stage in seconds, only used for reporting.
        activity_meta: List[Any], optional (default=None)
            Additional information logged with the start and stop lines.
        """
        meta = ",".join(map(str, activity_meta or []))
        act = f"{activity} {meta}".strip()
        log.info(f"START: {act}")

        previous = self.current_stage
        with Stopwatch() as sw:
            self.current_stage = Stage(activity, sw, time_limit)
            self.stages.append(self.current_stage)
            yield sw
        self.current_stage = previous
        log.info(
            f"STOP: {act} after {sw.elapsed_time:.4f}s "
            f"(rss {_resident_memory_mb():.0f}MB)."
        )
        if time_limit is not None and sw.elapsed_time > time_limit:
            log.warning(f"{act} exceeded its time limit of {time_limit}s.")
