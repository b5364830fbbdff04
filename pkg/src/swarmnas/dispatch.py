"""Server proxy: pools pending evaluations and feeds them to workers.

The proxy keeps a pool of jobs per submitted batch; one dispatcher thread
per worker probes availability, pulls the next pending job, and pushes the
result back. Results are surfaced to the caller in submission order, with
exactly-once semantics per job id (first completed result wins). A worker
that fails three consecutive times is considered dead until a later probe
succeeds; a job is reassigned at most `max_retries` times before the
whole batch fails.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from enum import Enum

from .encoding import DecodedGenotype, SearchSpace
from .errors import BatchFailedError

logger = logging.getLogger(__name__)

DEAD_AFTER_FAILURES = 3


class WorkerState(Enum):
    AVAILABLE = "available"
    BUSY = "busy"
    DEAD = "dead"


@dataclass
class WorkerEndpoint:
    """A worker client (ping/evaluate) plus its health bookkeeping."""

    client: object
    state: WorkerState = WorkerState.AVAILABLE
    consecutive_failures: int = 0

    @property
    def name(self) -> str:
        return getattr(self.client, "name", repr(self.client))

    def record_failure(self) -> None:
        self.consecutive_failures += 1
        if self.consecutive_failures >= DEAD_AFTER_FAILURES:
            self.state = WorkerState.DEAD

    def record_success(self) -> None:
        self.consecutive_failures = 0
        if self.state is WorkerState.DEAD:
            self.state = WorkerState.AVAILABLE


def probe(endpoint: WorkerEndpoint) -> bool:
    """PING the worker; network trouble counts as unavailable, never raises."""
    try:
        ok = bool(endpoint.client.ping())
    except Exception:
        ok = False
    if ok:
        endpoint.record_success()
    else:
        endpoint.record_failure()
    return ok


@dataclass
class Job:
    job_id: int
    decoded: DecodedGenotype
    status: str = "pending"  # pending | in-flight | done | failed
    result: tuple[float, int] | None = None
    attempts: int = 0


class JobPool:
    """Serialized job bookkeeping for one batch."""

    def __init__(self, decoded_list, max_retries: int):
        self.jobs = [Job(i, d) for i, d in enumerate(decoded_list)]
        self.max_retries = max_retries
        self.cond = threading.Condition()
        self.failure: str | None = None

    def next_pending(self) -> Job | None:
        with self.cond:
            for job in self.jobs:
                if job.status == "pending":
                    job.status = "in-flight"
                    job.attempts += 1
                    return job
            return None

    def complete(self, job_id: int, result) -> None:
        with self.cond:
            job = self.jobs[job_id]
            if job.status == "done":
                return  # late duplicate from a reassigned job; first result wins
            job.status = "done"
            job.result = result
            self.cond.notify_all()

    def release(self, job_id: int, reason: str) -> None:
        """Return a failed job to the pool, or fail the batch when retries ran out."""
        with self.cond:
            job = self.jobs[job_id]
            if job.status != "in-flight":
                return
            if job.attempts > self.max_retries:
                job.status = "failed"
                self.failure = f"job {job_id} failed after {job.attempts} attempts: {reason}"
            else:
                job.status = "pending"
            self.cond.notify_all()

    def fail_batch(self, reason: str) -> None:
        with self.cond:
            if self.failure is None:
                self.failure = reason
            self.cond.notify_all()

    def finished(self) -> bool:
        with self.cond:
            return self.failure is not None or all(j.status == "done" for j in self.jobs)

    def wait(self, timeout: float | None = None) -> None:
        with self.cond:
            self.cond.wait_for(
                lambda: self.failure is not None or all(j.status == "done" for j in self.jobs),
                timeout=timeout,
            )


class BatchHandle:
    def __init__(self, pool: JobPool, threads):
        self._pool = pool
        self._threads = threads

    def result(self, timeout: float | None = None) -> list[tuple[float, int]]:
        """Block until the batch completes; results in submission order."""
        self._pool.wait(timeout)
        if self._pool.failure is not None:
            raise BatchFailedError(self._pool.failure)
        if not self._pool.finished():
            raise TimeoutError("batch did not complete within timeout")
        for t in self._threads:
            t.join()
        return [job.result for job in self._pool.jobs]


class Dispatcher:
    """Distributes decoded-genotype evaluations across a pool of workers."""

    def __init__(self, workers, space: SearchSpace, max_retries: int = 3, probe_interval: float = 0.2):
        if not workers:
            raise ValueError("at least one worker required")
        self.endpoints = [w if isinstance(w, WorkerEndpoint) else WorkerEndpoint(w) for w in workers]
        self.space = space
        self.max_retries = max_retries
        self.probe_interval = probe_interval
        self._shutdown = False

    def shutdown(self) -> None:
        self._shutdown = True

    def submit_batch(self, decoded_list) -> BatchHandle:
        if self._shutdown:
            raise RuntimeError("dispatcher has been shut down")
        pool = JobPool(list(decoded_list), self.max_retries)
        threads = []
        if pool.jobs:
            for endpoint in self.endpoints:
                t = threading.Thread(target=self._worker_loop, args=(pool, endpoint), daemon=True)
                t.start()
                threads.append(t)
        return BatchHandle(pool, threads)

    def evaluate_many(self, decoded_list, space=None) -> list[tuple[float, int]]:
        """Blocking convenience used as the remote evaluator's batch hook."""
        return self.submit_batch(decoded_list).result()

    def _all_dead(self) -> bool:
        return all(e.state is WorkerState.DEAD for e in self.endpoints)

    def _worker_loop(self, pool: JobPool, endpoint: WorkerEndpoint) -> None:
        while not pool.finished() and not self._shutdown:
            if endpoint.state is WorkerState.DEAD:
                if not probe(endpoint):
                    if self._all_dead():
                        with pool.cond:
                            pending = any(j.status in ("pending", "in-flight") for j in pool.jobs)
                        if pending:
                            pool.fail_batch("all workers dead with jobs outstanding")
                            return
                    with pool.cond:
                        pool.cond.wait(self.probe_interval)
                    continue
            job = pool.next_pending()
            if job is None:
                with pool.cond:
                    pool.cond.wait(0.02)
                continue
            if not probe(endpoint):
                pool.release(job.job_id, f"worker {endpoint.name} unavailable")
                continue
            endpoint.state = WorkerState.BUSY
            try:
                result = endpoint.client.evaluate(job.job_id, job.decoded, self.space)
            except Exception as exc:
                logger.warning("worker %s failed job %d: %s", endpoint.name, job.job_id, exc)
                endpoint.record_failure()
                if endpoint.state is not WorkerState.DEAD:
                    endpoint.state = WorkerState.AVAILABLE
                pool.release(job.job_id, str(exc))
                continue
            endpoint.record_success()
            endpoint.state = WorkerState.AVAILABLE
            pool.complete(job.job_id, result)


class RemoteEvaluator:
    """Evaluator facade over a Dispatcher, pluggable into evaluation.evaluate_batch."""

    evaluator_id = "remote"

    def __init__(self, dispatcher: Dispatcher):
        self.dispatcher = dispatcher

    def evaluate_many(self, decoded_list, space) -> list[tuple[float, int]]:
        return self.dispatcher.evaluate_many(decoded_list, space)

    def __call__(self, decoded: DecodedGenotype, space) -> tuple[float, int]:
        return self.evaluate_many([decoded], space)[0]
