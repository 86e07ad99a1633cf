import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class WorkerPool:
    """
    Ordered fan-out of independent jobs. With jobs=1 everything runs inline,
    otherwise on a process pool; results always come back in input order.
    """

    def __init__(self, jobs: int = 1):
        if jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {jobs}")
        self.jobs = jobs

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        items = list(items)
        if self.jobs == 1 or len(items) <= 1:
            return [fn(item) for item in items]
        workers = min(self.jobs, len(items))
        logger.info(f"Dispatching {len(items)} jobs to {workers} workers")
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
