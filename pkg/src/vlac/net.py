"""TCP transport for live sessions.

Frames are a 4-byte big-endian length followed by that many payload
bytes; the payload's first byte is the frame type from the session
layer.  A handshake frame (type 2) opens every connection, carrying the
protocol id, parameter blob, and instance digest so both ends can refuse
mismatched delegations before any proving work happens.
"""

from __future__ import annotations

import socket
import struct
import time

from .errors import Malformed, ProtocolViolation, Timeout, TransportError
from .proto import lp, _Reader

FRAME_HELLO = 2
HELLO_OK = b"\x02OK"

MAX_FRAME = 1 << 30


class SocketTransport:
    """One framed, timeout-guarded connection half.

    ``recv_seconds`` accumulates wall time spent blocked on the peer, so a
    verifier client can report how long the remote prover worked versus
    how long its own checks took.
    """

    def __init__(self, sock: socket.socket, timeout: float = 60.0):
        self.sock = sock
        self.sock.settimeout(timeout)
        self.recv_seconds = 0.0

    def send_frame(self, data: bytes) -> None:
        try:
            self.sock.sendall(struct.pack(">I", len(data)) + data)
        except socket.timeout:
            raise Timeout("send stalled beyond the round deadline")
        except OSError as exc:
            raise TransportError(f"send failed: {exc}")

    def _recv_exact(self, n: int) -> bytes:
        chunks = []
        got = 0
        while got < n:
            try:
                part = self.sock.recv(n - got)
            except socket.timeout:
                raise Timeout("peer did not respond within the round deadline")
            except OSError as exc:
                raise TransportError(f"recv failed: {exc}")
            if not part:
                raise TransportError("connection closed mid-frame")
            chunks.append(part)
            got += len(part)
        return b"".join(chunks)

    def recv_frame(self) -> bytes:
        start = time.monotonic()
        try:
            (length,) = struct.unpack(">I", self._recv_exact(4))
            if length > MAX_FRAME:
                raise TransportError(f"frame of {length} bytes refused")
            return self._recv_exact(length)
        finally:
            self.recv_seconds += time.monotonic() - start

    def close(self) -> None:
        try:
            self.sock.close()
        except OSError:
            pass


def hello_frame(protocol_id: str, params: bytes, digest: bytes) -> bytes:
    return bytes([FRAME_HELLO]) + lp(protocol_id.encode()) + lp(params) + digest


def parse_hello(frame: bytes) -> tuple[str, bytes, bytes]:
    if not frame or frame[0] != FRAME_HELLO:
        raise ProtocolViolation("expected a handshake frame")
    r = _Reader(frame[1:])
    try:
        protocol_id = r.take(r.u32()).decode("utf-8", errors="strict")
        params = r.take(r.u32())
        digest = r.take(32)
    except Malformed:
        raise ProtocolViolation("unreadable handshake")
    if not r.done:
        raise ProtocolViolation("oversized handshake")
    return protocol_id, params, digest
