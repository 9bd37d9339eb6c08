"""Bounded concurrency for CPU-heavy work items.

Image preprocessing and batched decoding spend nearly all their time inside
numpy, which releases the GIL, so worker threads give real parallelism.
Results always come back in input order and equal the sequential path.
"""

import asyncio
from collections.abc import Callable, Iterable, Sequence
import logging

log = logging.getLogger(__name__)


class TaskFailedError[T](Exception):
    """Exception raised when a task fails during processing.

    Wrapping the exception keeps the link between a failure and the input
    item that caused it.

    :param item: The item that was being processed.
    :param original_exception: The exception that caused the failure.
    """

    def __init__(self, item: T, original_exception: Exception) -> None:
        super().__init__(f"Task failed for item {item}: {original_exception}")
        self.item = item
        self.original_exception = original_exception


async def run_ordered[T, R](
    items: Sequence[T],
    worker_fn: Callable[[T], R],
    limit: int,
) -> list[R | TaskFailedError[T]]:
    """Run a blocking function over items in worker threads.

    At most ``limit`` calls run at the same time. A failing item does not
    cancel the others; its slot holds a :class:`TaskFailedError`.

    :param items: The items to process.
    :param worker_fn: Blocking callable invoked as ``worker_fn(item)``.
    :param limit: Maximum number of concurrent calls. Must be >= 1.
    :return: One outcome per item, in input order.
    """
    if limit <= 0:
        raise ValueError("limit must be >= 1")

    semaphore = asyncio.Semaphore(limit)
    outcomes: list[R | TaskFailedError[T] | None] = [None] * len(items)

    async def run_one(index: int, item: T) -> None:
        async with semaphore:
            try:
                outcomes[index] = await asyncio.to_thread(worker_fn, item)
            except Exception as exc:
                outcomes[index] = TaskFailedError(item, exc)

    async with asyncio.TaskGroup() as tg:
        for index, item in enumerate(items):
            tg.create_task(run_one(index, item))

    return outcomes  # type: ignore[return-value]


def map_ordered[T, R](
    worker_fn: Callable[[T], R],
    items: Iterable[T],
    limit: int = 1,
) -> list[R]:
    """Apply ``worker_fn`` to every item with at most ``limit`` workers.

    With ``limit == 1`` everything runs in the calling thread; this is the
    reference path.

    :param worker_fn: Blocking callable applied to each item.
    :param items: The items to process.
    :param limit: Maximum number of concurrent workers. Must be >= 1.
    :return: The results in input order.
    :raises ValueError: If ``limit`` is less than 1.
    :raises TaskFailedError: For the first item (in input order) that failed.
    """
    if limit <= 0:
        raise ValueError("limit must be >= 1")

    pending = list(items)
    if limit == 1 or len(pending) <= 1:
        results: list[R] = []
        for item in pending:
            try:
                results.append(worker_fn(item))
            except Exception as exc:
                raise TaskFailedError(item, exc) from exc
        return results

    log.debug("Processing %d items with %d workers", len(pending), limit)
    outcomes = asyncio.run(run_ordered(pending, worker_fn, limit))
    for outcome in outcomes:
        if isinstance(outcome, TaskFailedError):
            raise outcome from outcome.original_exception
    return outcomes  # type: ignore[return-value]
