"""Replication driver: serial or process-parallel, always in task order."""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence, TypeVar

logger = logging.getLogger(__name__)

TaskT = TypeVar("TaskT")
ResultT = TypeVar("ResultT")


def run_replications(
    fn: Callable[[TaskT], ResultT],
    tasks: Sequence[TaskT],
    parallel_width: int = 1
) -> list[ResultT]:
    """Apply ``fn`` to every task; results come back in task order.

    ``fn`` must be a module-level function so worker processes can import it.
    """
    if parallel_width <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]

    workers = min(parallel_width, len(tasks))
    chunksize = max(1, len(tasks) // (4 * workers))
    logger.debug(f"Running {len(tasks)} replications on {workers} workers (chunksize {chunksize})")
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, tasks, chunksize=chunksize))
