"""Worker pool: lanes, helping barriers, failure propagation."""
import threading

import pytest

from parground.pool import (
    BATCH_LANE,
    COMPONENT_LANE,
    SPLIT_LANE,
    TaskGroup,
    WorkerPool,
    _Task,
)


@pytest.fixture
def pool():
    p = WorkerPool(4)
    yield p
    p.shutdown()


def test_rejects_single_worker():
    with pytest.raises(ValueError):
        WorkerPool(1)
    with pytest.raises(ValueError):
        WorkerPool(0)


def test_runs_all_tasks(pool):
    seen = []
    lock = threading.Lock()

    def task(i):
        with lock:
            seen.append(i)

    group = pool.group()
    for i in range(100):
        group.submit(BATCH_LANE, task, i)
    group.wait()
    assert sorted(seen) == list(range(100))


def test_tasks_across_lanes(pool):
    counts = {SPLIT_LANE: 0, BATCH_LANE: 0, COMPONENT_LANE: 0}
    lock = threading.Lock()

    def task(lane):
        with lock:
            counts[lane] += 1

    group = pool.group()
    for lane in (SPLIT_LANE, BATCH_LANE, COMPONENT_LANE):
        for _ in range(20):
            group.submit(lane, task, lane)
    group.wait()
    assert counts == {SPLIT_LANE: 20, BATCH_LANE: 20, COMPONENT_LANE: 20}


def test_wait_reraises_task_failure(pool):
    def boom():
        raise RuntimeError("task exploded")

    group = pool.group()
    group.submit(BATCH_LANE, boom)
    with pytest.raises(RuntimeError, match="task exploded"):
        group.wait()


def test_failure_does_not_poison_later_groups(pool):
    group = pool.group()
    group.submit(SPLIT_LANE, lambda: 1 / 0)
    with pytest.raises(ZeroDivisionError):
        group.wait()

    done = []
    fresh = pool.group()
    fresh.submit(SPLIT_LANE, done.append, 1)
    fresh.wait()
    assert done == [1]


def test_nested_barriers_do_not_deadlock():
    """More blocked groups than workers: waiting threads must help."""
    pool = WorkerPool(2)
    try:
        results = []
        lock = threading.Lock()

        def leaf(i):
            with lock:
                results.append(i)

        def parent(i):
            inner = pool.group()
            for j in range(4):
                inner.submit(SPLIT_LANE, leaf, i * 10 + j)
            inner.wait()

        outer = pool.group()
        for i in range(6):
            outer.submit(COMPONENT_LANE, parent, i)
        outer.wait()
        assert len(results) == 24
    finally:
        pool.shutdown()


def test_pop_prefers_finest_lane():
    """Queued split tasks are popped before batches before components."""
    pool = WorkerPool(2)
    pool.shutdown()  # park the workers; probe the queue discipline directly
    group = TaskGroup(pool)
    for lane, tag in (
        (COMPONENT_LANE, "component"),
        (BATCH_LANE, "batch"),
        (SPLIT_LANE, "split"),
    ):
        pool._queues[lane].append(_Task(group, lambda: None, (tag,)))
    popped = [pool._pop_locked().args[0] for _ in range(3)]
    assert popped == ["split", "batch", "component"]
    assert pool._pop_locked() is None


def test_submitting_to_a_closed_pool_raises():
    pool = WorkerPool(2)
    pool.shutdown()
    with pytest.raises(RuntimeError, match="shut down"):
        pool.group().submit(SPLIT_LANE, lambda: None)


def test_group_wait_without_tasks_returns(pool):
    group = pool.group()
    group.wait()  # nothing submitted; must not hang


def test_many_short_tasks_stress(pool):
    total = 0
    lock = threading.Lock()

    def bump():
        nonlocal total
        with lock:
            total += 1

    group = pool.group()
    for i in range(2000):
        group.submit(i % 3, bump)
    group.wait()
    assert total == 2000


def test_shutdown_is_idempotent():
    pool = WorkerPool(2)
    pool.shutdown()
    pool.shutdown()
