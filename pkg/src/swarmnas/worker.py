"""Evaluation workers: a framed-protocol socket server and an in-process twin.

A worker owns one compute slot, so at most one evaluation runs at a time
(enforced by a semaphore). The in-process variant answers the same
request/response contract through direct calls so the dispatcher cannot
tell the difference; it also supports artificial delays and scripted
failures for fault-injection tests.
"""

from __future__ import annotations

import logging
import socket
import threading
import time

from . import protocol
from .encoding import DecodedGenotype, SearchSpace
from .evaluation import SurrogateEvaluator

logger = logging.getLogger(__name__)


def _handle_message(message: dict, evaluator) -> dict:
    mtype = message.get("type")
    if mtype == protocol.TYPE_PING:
        return {"type": protocol.TYPE_PONG}
    if mtype == protocol.TYPE_EVALUATE:
        job_id = message.get("jobId")
        try:
            decoded = DecodedGenotype.from_key(message["genotype"])
            space = SearchSpace.from_dict(message["space"])
            accuracy, best_epoch = evaluator(decoded, space)
        except Exception as exc:
            return protocol.error_message(job_id, f"evaluation failed: {exc}")
        return protocol.result_message(job_id, accuracy, best_epoch)
    return protocol.error_message(message.get("jobId"), f"unsupported type {mtype!r}")


class WorkerServer:
    """Socket server answering PING and EVALUATE requests one at a time."""

    def __init__(self, host: str, port: int, evaluator=None, delay: float = 0.0):
        self.evaluator = evaluator if evaluator is not None else SurrogateEvaluator()
        self.delay = delay
        self._slot = threading.Semaphore(1)
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._sock.bind((host, port))
        self._sock.listen(16)
        self.address = self._sock.getsockname()
        self._running = False
        self._thread = None

    def serve_forever(self) -> None:
        self._running = True
        while self._running:
            try:
                conn, peer = self._sock.accept()
            except OSError:
                break
            threading.Thread(target=self._serve_connection, args=(conn,), daemon=True).start()

    def start(self) -> "WorkerServer":
        """Serve on a background thread (used by tests and the dispatcher suite)."""
        self._thread = threading.Thread(target=self.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._running = False
        try:
            self._sock.close()
        except OSError:
            pass

    def _serve_connection(self, conn: socket.socket) -> None:
        with conn:
            while True:
                try:
                    message = protocol.read_frame(conn)
                except protocol.ProtocolError as exc:
                    try:
                        protocol.write_frame(conn, protocol.error_message(None, str(exc)))
                    except OSError:
                        pass
                    return
                except OSError:
                    return
                if message is None:
                    return
                if message.get("type") == protocol.TYPE_EVALUATE:
                    with self._slot:
                        if self.delay:
                            time.sleep(self.delay)
                        reply = _handle_message(message, self.evaluator)
                else:
                    reply = _handle_message(message, self.evaluator)
                try:
                    protocol.write_frame(conn, reply)
                except OSError:
                    return


class InProcessWorker:
    """Dispatcher-facing worker that evaluates by direct call.

    fail_jobs maps jobId -> number of times that job should raise before
    succeeding; fail_pings makes the next N probes report unavailable.
    """

    def __init__(self, evaluator=None, delay: float = 0.0, name: str = "inproc"):
        self.evaluator = evaluator if evaluator is not None else SurrogateEvaluator()
        self.delay = delay
        self.name = name
        self.fail_jobs: dict[int, int] = {}
        self.fail_pings = 0
        self.dead = False
        self._slot = threading.Semaphore(1)
        self.in_flight = 0
        self.max_in_flight = 0
        self._stats_lock = threading.Lock()

    def ping(self) -> bool:
        if self.dead:
            return False
        if self.fail_pings > 0:
            self.fail_pings -= 1
            return False
        return True

    def evaluate(self, job_id: int, decoded: DecodedGenotype, space: SearchSpace) -> tuple[float, int]:
        if self.dead:
            raise ConnectionError(f"worker {self.name} is down")
        with self._slot:
            with self._stats_lock:
                self.in_flight += 1
                self.max_in_flight = max(self.max_in_flight, self.in_flight)
            try:
                if self.delay:
                    time.sleep(self.delay)
                if self.dead:
                    raise ConnectionError(f"worker {self.name} died mid-job")
                remaining = self.fail_jobs.get(job_id, 0)
                if remaining > 0:
                    self.fail_jobs[job_id] = remaining - 1
                    raise ConnectionError(f"worker {self.name} failed job {job_id}")
                return self.evaluator(decoded, space)
            finally:
                with self._stats_lock:
                    self.in_flight -= 1


class NetworkWorkerClient:
    """Dispatcher-side client speaking the framed protocol to one worker."""

    def __init__(self, host: str, port: int, probe_timeout: float = 2.0, result_timeout: float = 86400.0):
        self.host = host
        self.port = port
        self.probe_timeout = probe_timeout
        self.result_timeout = result_timeout
        self.name = f"{host}:{port}"

    def ping(self) -> bool:
        try:
            with socket.create_connection((self.host, self.port), timeout=self.probe_timeout) as sock:
                sock.settimeout(self.probe_timeout)
                protocol.write_frame(sock, {"type": protocol.TYPE_PING})
                reply = protocol.read_frame(sock)
                return reply is not None and reply.get("type") == protocol.TYPE_PONG
        except (OSError, protocol.ProtocolError):
            return False

    def evaluate(self, job_id: int, decoded: DecodedGenotype, space: SearchSpace) -> tuple[float, int]:
        with socket.create_connection((self.host, self.port), timeout=self.probe_timeout) as sock:
            sock.settimeout(self.result_timeout)
            protocol.write_frame(sock, protocol.evaluate_message(job_id, decoded.key, space.to_dict()))
            reply = protocol.read_frame(sock)
            if reply is None:
                raise ConnectionError(f"worker {self.name} closed the connection")
            if reply.get("type") == protocol.TYPE_RESULT and reply.get("jobId") == job_id:
                return float(reply["accuracy"]), int(reply["bestEpoch"])
            if reply.get("type") == protocol.TYPE_ERROR:
                raise RuntimeError(f"worker {self.name}: {reply.get('message')}")
            raise protocol.ProtocolError(f"unexpected reply {reply!r}")
