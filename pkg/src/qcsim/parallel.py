"""Thread-pool wrapper used by the engines.

Gate kernels release the GIL inside numpy, so a thread pool gives real
concurrency for large states while keeping one shared amplitude array.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor


class WorkerPool:
    """Fixed pool of workers; ``run_tasks`` acts as a barrier."""

    def __init__(self, workers: int = 1):
        self.workers = max(1, int(workers))
        self._executor = (
            ThreadPoolExecutor(max_workers=self.workers) if self.workers > 1 else None
        )

    def run_tasks(self, tasks) -> None:
        """Run callables to completion; returns only when all are done."""
        tasks = list(tasks)
        if self._executor is None or len(tasks) <= 1:
            for task in tasks:
                task()
            return
        futures = [self._executor.submit(task) for task in tasks]
        for f in futures:
            f.result()

    def map_ordered(self, fn, items) -> list:
        """Apply fn to items, returning results in input order."""
        items = list(items)
        if self._executor is None or len(items) <= 1:
            return [fn(item) for item in items]
        futures = [self._executor.submit(fn, item) for item in items]
        return [f.result() for f in futures]

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False
