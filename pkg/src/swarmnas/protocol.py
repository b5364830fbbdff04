"""Framed JSON wire protocol shared by the dispatcher and the workers.

Frames are a 4-byte big-endian unsigned length prefix followed by a UTF-8
JSON payload. Payloads carry a "type" field out of PING, PONG, EVALUATE,
RESULT and ERROR.
"""

from __future__ import annotations

import json
import socket
import struct

MAX_FRAME_BYTES = 16 * 1024 * 1024

TYPE_PING = "PING"
TYPE_PONG = "PONG"
TYPE_EVALUATE = "EVALUATE"
TYPE_RESULT = "RESULT"
TYPE_ERROR = "ERROR"


class ProtocolError(Exception):
    """Malformed frame or payload."""


def encode_frame(message: dict) -> bytes:
    payload = json.dumps(message, separators=(",", ":")).encode("utf-8")
    if len(payload) > MAX_FRAME_BYTES:
        raise ProtocolError(f"frame of {len(payload)} bytes exceeds cap")
    return struct.pack(">I", len(payload)) + payload


def _recv_exact(sock: socket.socket, size: int) -> bytes:
    chunks = []
    remaining = size
    while remaining:
        chunk = sock.recv(remaining)
        if not chunk:
            raise ConnectionError("connection closed mid-frame")
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def read_frame(sock: socket.socket) -> dict | None:
    """Read one message; returns None on clean EOF at a frame boundary."""
    try:
        header = _recv_exact(sock, 4)
    except ConnectionError:
        return None
    (length,) = struct.unpack(">I", header)
    if length > MAX_FRAME_BYTES:
        raise ProtocolError(f"declared frame length {length} exceeds cap")
    payload = _recv_exact(sock, length)
    try:
        message = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ProtocolError(f"invalid payload: {exc}") from None
    if not isinstance(message, dict) or "type" not in message:
        raise ProtocolError("payload must be an object with a 'type' field")
    return message


def write_frame(sock: socket.socket, message: dict) -> None:
    sock.sendall(encode_frame(message))


def evaluate_message(job_id: int, genotype_key, space_dict: dict) -> dict:
    return {
        "type": TYPE_EVALUATE,
        "jobId": int(job_id),
        "genotype": [int(v) for v in genotype_key],
        "space": space_dict,
    }


def result_message(job_id: int, accuracy: float, best_epoch: int) -> dict:
    return {
        "type": TYPE_RESULT,
        "jobId": int(job_id),
        "accuracy": float(accuracy),
        "bestEpoch": int(best_epoch),
    }


def error_message(job_id, message: str) -> dict:
    return {"type": TYPE_ERROR, "jobId": job_id, "message": str(message)}
