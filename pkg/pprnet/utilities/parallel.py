import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

import psutil

log = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_n_jobs(n_jobs: Optional[int]) -> int:
    """Turn the `jobs` setting into a worker count.

    Accepted values are positive integers, -1 or None.
    If -1 is specified, one worker per physical core is used.
    If None is specified, half of the physical cores are used.
    """
    cores = psutil.cpu_count(logical=False) or 1
    if n_jobs is None:
        n_jobs = max(1, cores // 2)
        log.debug("n_jobs defaulted to %d.", n_jobs)
    elif n_jobs == -1:
        n_jobs = cores
        log.debug("n_jobs set to use all %d cores.", n_jobs)
    elif n_jobs < -1 or n_jobs == 0:
        raise ValueError(f"n_jobs should be -1 or positive int but is {n_jobs}.")
    return n_jobs


def parallel_map(
    fn: Callable[[T], R], items: Iterable[T], n_jobs: Optional[int] = 1
) -> List[R]:
    """`[fn(item) for item in items]`, evaluated on up to `n_jobs` threads.

    Results keep the order of `items`; the first exception raised by `fn` propagates.
    """
    items = list(items)
    workers = min(resolve_n_jobs(n_jobs), max(1, len(items)))
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))
