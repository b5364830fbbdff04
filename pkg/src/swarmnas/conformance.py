"""Protocol conformance checks runnable against any worker implementation.

Each check opens its own connection to the worker under test and exercises
one protocol obligation. `run_conformance` returns a list of
(check name, passed, detail) tuples so harnesses in any language can be
validated the same way.
"""

from __future__ import annotations

import socket
import struct

from . import protocol
from .encoding import SearchSpace, default_space

CHECK_TIMEOUT = 5.0


def _connect(host, port):
    sock = socket.create_connection((host, port), timeout=CHECK_TIMEOUT)
    sock.settimeout(CHECK_TIMEOUT)
    return sock


def check_ping_pong(host, port, space) -> str | None:
    with _connect(host, port) as sock:
        protocol.write_frame(sock, {"type": protocol.TYPE_PING})
        reply = protocol.read_frame(sock)
    if reply is None or reply.get("type") != protocol.TYPE_PONG:
        return f"expected PONG, got {reply!r}"
    return None


def check_evaluate_result(host, port, space) -> str | None:
    key = []
    for (llo, _), (glo, _) in zip(space.layer_ranges, space.growth_ranges):
        key += [llo, glo]
    with _connect(host, port) as sock:
        protocol.write_frame(sock, protocol.evaluate_message(11, key, space.to_dict()))
        reply = protocol.read_frame(sock)
    if reply is None or reply.get("type") != protocol.TYPE_RESULT:
        return f"expected RESULT, got {reply!r}"
    if reply.get("jobId") != 11:
        return f"jobId not echoed: {reply!r}"
    accuracy = reply.get("accuracy")
    if not isinstance(accuracy, (int, float)) or not 0.0 <= accuracy <= 1.0:
        return f"accuracy out of range: {accuracy!r}"
    if not isinstance(reply.get("bestEpoch"), int):
        return f"bestEpoch missing: {reply!r}"
    return None


def check_malformed_frame_error(host, port, space) -> str | None:
    with _connect(host, port) as sock:
        payload = b"this is not json"
        sock.sendall(struct.pack(">I", len(payload)) + payload)
        reply = protocol.read_frame(sock)
    if reply is None or reply.get("type") != protocol.TYPE_ERROR:
        return f"expected ERROR, got {reply!r}"
    return None


def check_oversize_frame_error(host, port, space) -> str | None:
    with _connect(host, port) as sock:
        sock.sendall(struct.pack(">I", 2**31))
        reply = protocol.read_frame(sock)
        if reply is None or reply.get("type") != protocol.TYPE_ERROR:
            return f"expected ERROR, got {reply!r}"
    # worker must survive the bad client
    return check_ping_pong(host, port, space)


def check_bad_evaluate_payload_error(host, port, space) -> str | None:
    with _connect(host, port) as sock:
        protocol.write_frame(sock, {"type": protocol.TYPE_EVALUATE, "jobId": 13})
        reply = protocol.read_frame(sock)
    if reply is None or reply.get("type") != protocol.TYPE_ERROR:
        return f"expected ERROR, got {reply!r}"
    if reply.get("jobId") != 13:
        return f"jobId not echoed on error: {reply!r}"
    return None


ALL_CHECKS = (
    ("ping_pong", check_ping_pong),
    ("evaluate_result", check_evaluate_result),
    ("malformed_frame_error", check_malformed_frame_error),
    ("oversize_frame_error", check_oversize_frame_error),
    ("bad_evaluate_payload_error", check_bad_evaluate_payload_error),
)


def run_conformance(host: str, port: int, space: SearchSpace | None = None):
    space = space if space is not None else default_space()
    results = []
    for name, check in ALL_CHECKS:
        try:
            detail = check(host, port, space)
        except Exception as exc:
            detail = f"exception: {exc}"
        results.append((name, detail is None, detail))
    return results
