"""Fixed thread pool with three priority lanes and helping barriers.

Tasks carry a lane number: rule splits (finest) are preferred over
rule batches, which are preferred over whole components.  Finishing
fine-grained work first keeps all workers busy near the end of a
component's pass instead of leaving one thread to chew through a big
queue alone.

Barriers are cooperative.  A thread that waits on a :class:`TaskGroup`
does not sleep while related work is queued -- it pops and runs tasks
itself, so a worker executing a component task can block on that
component's inner batch barrier without deadlocking the pool.
"""
from __future__ import annotations

import threading
from collections import deque
from typing import Any, Callable

SPLIT_LANE = 0
BATCH_LANE = 1
COMPONENT_LANE = 2
_LANES = (SPLIT_LANE, BATCH_LANE, COMPONENT_LANE)


class _Task:
    __slots__ = ("group", "fn", "args")

    def __init__(self, group: "TaskGroup", fn: Callable[..., Any], args: tuple):
        self.group = group
        self.fn = fn
        self.args = args


class TaskGroup:
    """A batch of tasks sharing one barrier.  Not reusable after wait()."""

    def __init__(self, pool: "WorkerPool"):
        self._pool = pool
        self.pending = 0
        self.failures: list[BaseException] = []

    def submit(self, lane: int, fn: Callable[..., Any], *args: Any) -> None:
        self._pool._enqueue(_Task(self, fn, args), lane)

    def wait(self) -> None:
        """Help run queued tasks until every task of this group has
        finished, then re-raise the first recorded failure, if any."""
        pool = self._pool
        while True:
            with pool._cond:
                while True:
                    task = pool._pop_locked()
                    if task is not None:
                        break
                    if self.pending == 0:
                        if self.failures:
                            raise self.failures[0]
                        return
                    pool._cond.wait()
            pool._execute(task)


class WorkerPool:
    """``workers`` daemon threads draining three FIFO lanes."""

    def __init__(self, workers: int):
        if workers < 2:
            raise ValueError("a pool needs at least two workers; "
                             "run inline instead")
        self.workers = workers
        self._cond = threading.Condition()
        self._queues: tuple[deque[_Task], ...] = tuple(deque() for _ in _LANES)
        self._shutdown = False
        self._threads = [
            threading.Thread(
                target=self._worker_loop,
                name="ground-worker-%d" % i,
                daemon=True,
            )
            for i in range(workers)
        ]
        for thread in self._threads:
            thread.start()

    def group(self) -> TaskGroup:
        return TaskGroup(self)

    # -- internals ----------------------------------------------------

    def _enqueue(self, task: _Task, lane: int) -> None:
        with self._cond:
            if self._shutdown:
                raise RuntimeError("pool is shut down")
            task.group.pending += 1
            self._queues[lane].append(task)
            self._cond.notify_all()

    def _pop_locked(self) -> _Task | None:
        for queue in self._queues:  # finest lane first
            if queue:
                return queue.popleft()
        return None

    def _execute(self, task: _Task) -> None:
        failure: BaseException | None = None
        try:
            task.fn(*task.args)
        except BaseException as exc:  # noqa: BLE001 - barrier re-raises
            failure = exc
        with self._cond:
            if failure is not None:
                task.group.failures.append(failure)
            task.group.pending -= 1
            self._cond.notify_all()

    def _worker_loop(self) -> None:
        while True:
            with self._cond:
                task = self._pop_locked()
                while task is None:
                    if self._shutdown:
                        return
                    self._cond.wait()
                    task = self._pop_locked()
            self._execute(task)

    def shutdown(self) -> None:
        with self._cond:
            self._shutdown = True
            self._cond.notify_all()
        for thread in self._threads:
            thread.join(timeout=5.0)
