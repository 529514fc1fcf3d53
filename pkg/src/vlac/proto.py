"""Session engine for the certificate protocols.

A protocol is written once as a pair of functions, a prover and a
verifier, that talk through a channel.  The channel decides where
challenges come from:

* live interactive sessions draw them from a seeded RNG and ship them to
  the prover over a transport (in-process queues or TCP);
* hash-compiled (Fiat-Shamir) runs derive them from a SHA-256 chain over
  the instance digest and every prover message so far, so the prover can
  run alone and leave a self-contained transcript;
* replay verification re-derives every challenge from the recorded
  prefix and rejects on the first disagreement.

Transcripts serialize to a small tagged binary format (magic ``VLAC``)
with exactly one valid encoding per transcript.
"""

from __future__ import annotations

import hashlib
import queue
import struct
import threading

import numpy as np
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from random import Random
from typing import Callable, Optional, Sequence

from .errors import (
    Malformed,
    ProtocolViolation,
    Timeout,
    TrailingBytes,
    TransportError,
    VersionUnsupported,
)
from .ff import PrimeField, SampleSet, is_probable_prime

MAGIC = b"VLAC"
VERSION = 1

ROLE_PROVER = 0
ROLE_VERIFIER = 1

TAG_COMMIT = 0
TAG_CHALLENGE = 1
TAG_RESPONSE = 2
TAG_CLAIM = 3

KIND_EMPTY = 0
KIND_SCALAR = 1
KIND_UINT = 2
KIND_VEC = 3
KIND_POLY = 4
KIND_MATRIX = 5
KIND_BIGINT = 6
KIND_BYTES = 7

MODE_INTERACTIVE = 0
MODE_FIAT_SHAMIR = 1

_REC_PROTOCOL = 0x01
_REC_MODE = 0x02
_REC_DIGEST = 0x03
_REC_PARAMS = 0x04
_REC_MESSAGE = 0x10

_FRAME_MSG = 0
_FRAME_ABORT = 1

HEURISTIC_FS = "fiat-shamir"

# -- primitive encoders -------------------------------------------------------


def _u16(x: int) -> bytes:
    return struct.pack("<H", x)


def _u32(x: int) -> bytes:
    return struct.pack("<I", x)


def _u64(x: int) -> bytes:
    return struct.pack("<Q", x)


def lp(data: bytes) -> bytes:
    """Length-prefixed blob, used in every hash-domain encoding."""
    return _u32(len(data)) + data


class _Reader:
    __slots__ = ("buf", "pos")

    def __init__(self, buf: bytes):
        self.buf = buf
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.buf):
            raise Malformed("record truncated")
        out = self.buf[self.pos : self.pos + n]
        self.pos += n
        return out

    def u8(self) -> int:
        return self.take(1)[0]

    def u16(self) -> int:
        return struct.unpack("<H", self.take(2))[0]

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self.take(8))[0]

    @property
    def done(self) -> bool:
        return self.pos == len(self.buf)


# -- message payloads ---------------------------------------------------------


def encode_payload(kind: int, value) -> bytes:
    if kind == KIND_EMPTY:
        return b""
    if kind in (KIND_SCALAR, KIND_UINT):
        return _u64(int(value))
    if kind == KIND_VEC:
        vals = [int(v) for v in value]
        return _u32(len(vals)) + b"".join(_u64(v) for v in vals)
    if kind == KIND_POLY:
        coeffs = list(value.coeffs) if hasattr(value, "coeffs") else [int(v) for v in value]
        if coeffs and coeffs[-1] == 0:
            raise Malformed("polynomial encoding must be trimmed")
        return _u32(len(coeffs)) + b"".join(_u64(int(v)) for v in coeffs)
    if kind == KIND_MATRIX:
        if isinstance(value, tuple) and len(value) == 3:
            # canonical (rows, cols, flat) form, as produced by decoding
            rows, cols, flat = value
            return (
                _u32(int(rows))
                + _u32(int(cols))
                + np.asarray(flat, dtype="<u8").tobytes()
            )
        a = value.a if hasattr(value, "a") else value
        arr = np.asarray(a)
        rows, cols = (int(arr.shape[0]), int(arr.shape[1])) if arr.ndim == 2 else (0, 0)
        return _u32(rows) + _u32(cols) + arr.astype("<u8").tobytes()
    if kind == KIND_BIGINT:
        v = int(value)
        sign = 1 if v < 0 else 0
        mag = abs(v)
        data = mag.to_bytes((mag.bit_length() + 7) // 8, "little") if mag else b""
        return bytes([sign]) + _u32(len(data)) + data
    if kind == KIND_BYTES:
        return bytes(value)
    raise Malformed(f"unknown payload kind {kind}")


def decode_payload(kind: int, buf: bytes):
    r = _Reader(buf)
    value = _decode_payload_inner(kind, r)
    if not r.done:
        raise Malformed("payload has trailing bytes")
    return value


def _decode_payload_inner(kind: int, r: _Reader):
    if kind == KIND_EMPTY:
        return None
    if kind in (KIND_SCALAR, KIND_UINT):
        return r.u64()
    if kind == KIND_VEC:
        n = r.u32()
        return [r.u64() for _ in range(n)]
    if kind == KIND_POLY:
        n = r.u32()
        coeffs = [r.u64() for _ in range(n)]
        if coeffs and coeffs[-1] == 0:
            raise Malformed("polynomial encoding not canonical")
        return coeffs
    if kind == KIND_MATRIX:
        rows = r.u32()
        cols = r.u32()
        flat = [r.u64() for _ in range(rows * cols)]
        return (rows, cols, flat)
    if kind == KIND_BIGINT:
        sign = r.u8()
        if sign not in (0, 1):
            raise Malformed("bad big-integer sign byte")
        n = r.u32()
        data = r.take(n)
        if n and data[-1] == 0:
            raise Malformed("big-integer encoding not canonical")
        mag = int.from_bytes(data, "little")
        if sign == 1 and mag == 0:
            raise Malformed("negative zero")
        return -mag if sign else mag
    if kind == KIND_BYTES:
        return r.take(len(r.buf) - r.pos)
    raise Malformed(f"unknown payload kind {kind}")


@dataclass(frozen=True)
class Message:
    role: int
    tag: int
    kind: int
    value: object = None

    def encode(self) -> bytes:
        return bytes([self.role, self.tag, self.kind]) + encode_payload(
            self.kind, self.value
        )


def decode_message(buf: bytes) -> Message:
    if len(buf) < 3:
        raise Malformed("message record too short")
    role, tag, kind = buf[0], buf[1], buf[2]
    if role not in (ROLE_PROVER, ROLE_VERIFIER):
        raise Malformed(f"bad role byte {role}")
    if tag not in (TAG_COMMIT, TAG_CHALLENGE, TAG_RESPONSE, TAG_CLAIM):
        raise Malformed(f"bad tag byte {tag}")
    return Message(role, tag, kind, decode_payload(kind, buf[3:]))


def _payload_in_field(kind: int, value, p: int) -> bool:
    if kind in (KIND_SCALAR,):
        return 0 <= value < p
    if kind == KIND_VEC:
        return all(0 <= v < p for v in value)
    if kind == KIND_POLY:
        return all(0 <= v < p for v in value)
    if kind == KIND_MATRIX:
        return all(0 <= v < p for v in value[2])
    return True


# -- transcripts --------------------------------------------------------------


@dataclass
class Transcript:
    protocol_id: str
    mode: int
    instance_digest: bytes
    params: bytes
    messages: list[Message] = dataclass_field(default_factory=list)

    def serialize(self) -> bytes:
        out = [MAGIC, _u16(VERSION)]

        def rec(tag: int, payload: bytes):
            out.append(bytes([tag]) + _u32(len(payload)) + payload)

        rec(_REC_PROTOCOL, self.protocol_id.encode())
        rec(_REC_MODE, bytes([self.mode]))
        rec(_REC_DIGEST, self.instance_digest)
        rec(_REC_PARAMS, self.params)
        for m in self.messages:
            rec(_REC_MESSAGE, m.encode())
        return b"".join(out)


def transcript_serialize(t: Transcript) -> bytes:
    return t.serialize()


def transcript_deserialize(buf: bytes) -> Transcript:
    r = _Reader(buf)
    if r.take(4) != MAGIC:
        raise Malformed("bad magic")
    version = r.u16()
    if version != VERSION:
        raise VersionUnsupported(f"transcript version {version}")

    def record(expected: int) -> bytes:
        tag = r.u8()
        if tag != expected:
            raise Malformed(f"expected record {expected:#x}, found {tag:#x}")
        return r.take(r.u32())

    try:
        protocol_id = record(_REC_PROTOCOL).decode("utf-8")
    except UnicodeDecodeError as exc:
        raise Malformed("protocol id is not valid UTF-8") from exc
    mode_raw = record(_REC_MODE)
    if len(mode_raw) != 1 or mode_raw[0] not in (MODE_INTERACTIVE, MODE_FIAT_SHAMIR):
        raise Malformed("bad mode record")
    digest = record(_REC_DIGEST)
    if len(digest) != 32:
        raise Malformed("instance digest must be 32 bytes")
    params = record(_REC_PARAMS)
    messages = []
    while not r.done:
        tag = r.u8()
        if tag != _REC_MESSAGE:
            raise Malformed(f"unexpected record {tag:#x}")
        messages.append(decode_message(r.take(r.u32())))
    if not r.done:
        raise TrailingBytes("unconsumed bytes after records")
    return Transcript(protocol_id, mode_raw[0], digest, params, messages)


def instance_digest(protocol_id: str, parts: Sequence[bytes]) -> bytes:
    """Digest binding a run to its instance encoding."""
    h = hashlib.sha256(b"vlac.instance.v1")
    h.update(lp(protocol_id.encode()))
    for part in parts:
        h.update(lp(part))
    return h.digest()


# -- challenge sources --------------------------------------------------------


class InteractiveSource:
    """Seeded RNG for live sessions (Python's Mersenne Twister, which is
    stable across platforms, so a seed pins the whole challenge stream)."""

    kind = "interactive"

    def __init__(self, seed: Optional[int] = None):
        self.rng = Random(seed)

    def begin(self, protocol_id: str, params: bytes, digest: bytes) -> None:
        pass

    def absorb(self, data: bytes) -> None:
        pass

    def draw_uint(self, label: str, bound: int) -> int:
        return self.rng.randrange(bound)

    def draw_scalar(self, label: str, s: SampleSet) -> int:
        return s.offset + self.rng.randrange(s.size)


class FiatShamirSource:
    """SHA-256 challenge chain.

    The state starts from the protocol id, parameter blob, and instance
    digest; every prover message is absorbed; every draw hashes the state
    with a domain label and splits the digest into little-endian u64
    chunks, rejection-sampled into the requested range.  Each draw folds
    the drawn value back into the state.
    """

    kind = "fiat-shamir"

    def __init__(self):
        self._state: Optional[bytes] = None

    def begin(self, protocol_id: str, params: bytes, digest: bytes) -> None:
        if self._state is not None:
            raise ProtocolViolation("hash chain already bound to an instance")
        h = hashlib.sha256(b"vlac.fs.v1")
        h.update(lp(protocol_id.encode()))
        h.update(lp(params))
        h.update(lp(digest))
        self._state = h.digest()

    def _require_state(self) -> bytes:
        if self._state is None:
            raise ProtocolViolation("hash chain not bound to an instance yet")
        return self._state

    def absorb(self, data: bytes) -> None:
        state = self._require_state()
        self._state = hashlib.sha256(state + b"M" + data).digest()

    def draw_uint(self, label: str, bound: int) -> int:
        state = self._require_state()
        if not (0 < bound <= 1 << 64):
            raise ValueError("draw bound out of range")
        threshold = (1 << 64) // bound * bound
        ctr = 0
        val = None
        while val is None:
            block = hashlib.sha256(
                state + b"C" + lp(label.encode()) + _u32(ctr)
            ).digest()
            for off in range(0, 32, 8):
                u = int.from_bytes(block[off : off + 8], "little")
                if u < threshold:
                    val = u % bound
                    break
            ctr += 1
        self._state = hashlib.sha256(
            state + b"D" + lp(label.encode()) + _u64(val)
        ).digest()
        return val

    def draw_scalar(self, label: str, s: SampleSet) -> int:
        return s.offset + self.draw_uint(label, s.size)


def fs_challenge(source: FiatShamirSource, label: str, s: SampleSet) -> int:
    """One domain-separated challenge from a bound hash chain."""
    return source.draw_scalar(label, s)


def draw_prime(source, label: str, bits: int) -> int:
    """Uniform-ish odd prime in [2**(bits-1), 2**bits) from a source.

    Candidates are drawn with the low bit forced, then Miller-Rabin
    filtered; the rejection loop is part of the replay contract.
    """
    if not 16 <= bits <= 62:
        raise ValueError("prime size must be between 16 and 62 bits")
    half = 1 << (bits - 1)
    while True:
        x = half + source.draw_uint(label, half)
        x |= 1
        if is_probable_prime(x):
            return x


# -- verdicts -----------------------------------------------------------------


@dataclass
class Verdict:
    """Outcome of one verification run.

    ``error_bound`` is the declared soundness error as an exact rational;
    ``heuristics`` lists every assumption that bound leans on (the
    hash-compiled mode and the butterfly rank bound are the two).
    """

    accepted: bool
    reason: Optional[str]
    error_bound: Fraction
    heuristics: tuple[str, ...] = ()
    verifier_ops: int = 0
    transcript: Optional[Transcript] = dataclass_field(
        default=None, repr=False, compare=False
    )

    @classmethod
    def accept(
        cls, error_bound: Fraction, heuristics: tuple[str, ...] = (), ops: int = 0
    ) -> "Verdict":
        return cls(True, None, error_bound, heuristics, ops)

    @classmethod
    def reject(cls, reason: str, ops: int = 0) -> "Verdict":
        return cls(False, reason, Fraction(0), (), ops)


class _ReplayReject(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


# -- transports ---------------------------------------------------------------


class QueueTransport:
    """In-process transport half; two of these back a live session."""

    def __init__(self, send_q: queue.Queue, recv_q: queue.Queue, timeout: float):
        self._send = send_q
        self._recv = recv_q
        self.timeout = timeout

    def send_frame(self, data: bytes) -> None:
        self._send.put(data)

    def recv_frame(self) -> bytes:
        try:
            return self._recv.get(timeout=self.timeout)
        except queue.Empty:
            raise Timeout("peer did not respond within the round deadline")


def _msg_frame(m: Message) -> bytes:
    return bytes([_FRAME_MSG]) + m.encode()


def _abort_frame(reason: str) -> bytes:
    return bytes([_FRAME_ABORT]) + reason.encode()


def _parse_frame(frame: bytes) -> Message:
    if not frame:
        raise TransportError("empty frame")
    if frame[0] == _FRAME_ABORT:
        raise ProtocolViolation(f"peer aborted: {frame[1:].decode(errors='replace')}")
    if frame[0] != _FRAME_MSG:
        raise TransportError(f"unknown frame type {frame[0]}")
    return decode_message(frame[1:])


# -- channels -----------------------------------------------------------------


class FSProverChannel:
    """Prover running alone against the hash chain."""

    is_fiat_shamir = True

    def __init__(self, source: FiatShamirSource, transcript: Transcript):
        self._src = source
        self._t = transcript

    def send(self, tag: int, kind: int, value=None) -> None:
        m = Message(ROLE_PROVER, tag, kind, _canon_value(kind, value))
        self._t.messages.append(m)
        self._src.absorb(m.encode())

    def _record_challenge(self, kind: int, value) -> None:
        self._t.messages.append(Message(ROLE_VERIFIER, TAG_CHALLENGE, kind, value))

    def challenge_scalar(self, label: str, s: SampleSet) -> int:
        v = self._src.draw_scalar(label, s)
        self._record_challenge(KIND_SCALAR, v)
        return v

    def challenge_vector(self, label: str, s: SampleSet, count: int) -> list[int]:
        vals = [self._src.draw_scalar(f"{label}.{i}", s) for i in range(count)]
        self._record_challenge(KIND_VEC, vals)
        return vals

    def challenge_nonzero_vector(self, label: str, s: SampleSet, count: int) -> list[int]:
        vals = [_draw_nonzero(self._src, f"{label}.{i}", s) for i in range(count)]
        self._record_challenge(KIND_VEC, vals)
        return vals

    def challenge_prime(self, label: str, bits: int) -> int:
        v = draw_prime(self._src, label, bits)
        self._record_challenge(KIND_UINT, v)
        return v


def _draw_nonzero(source, label: str, s: SampleSet) -> int:
    # zero draws are rejection-resampled; the state advance makes the
    # retry well-defined under replay
    while True:
        v = source.draw_scalar(label, s)
        if v != 0:
            return v


def _canon_value(kind: int, value):
    """Normalize python-side values so encode/decode round-trips exactly."""
    if kind == KIND_EMPTY:
        return None
    if kind in (KIND_SCALAR, KIND_UINT, KIND_BIGINT):
        return int(value)
    if kind == KIND_VEC:
        return [int(v) for v in value]
    if kind == KIND_POLY:
        return list(value.coeffs) if hasattr(value, "coeffs") else [int(v) for v in value]
    if kind == KIND_MATRIX:
        if hasattr(value, "a"):
            a = value.a
            return (a.shape[0], a.shape[1], [int(v) for row in a for v in row])
        return value
    if kind == KIND_BYTES:
        return bytes(value)
    raise Malformed(f"unknown payload kind {kind}")


class ReplayVerifierChannel:
    """Feeds a verifier from a recorded transcript, re-deriving challenges."""

    is_fiat_shamir = True

    def __init__(self, source: FiatShamirSource, transcript: Transcript):
        self._src = source
        self._msgs = transcript.messages
        self._pos = 0

    def _next(self) -> Message:
        if self._pos >= len(self._msgs):
            raise _ReplayReject("ProtocolViolation:transcript-truncated")
        m = self._msgs[self._pos]
        self._pos += 1
        return m

    def recv(self, tag: int, kinds: tuple[int, ...], field: Optional[PrimeField] = None):
        m = self._next()
        if m.role != ROLE_PROVER or m.tag != tag or m.kind not in kinds:
            raise _ReplayReject("ProtocolViolation:unexpected-message")
        if field is not None and not _payload_in_field(m.kind, m.value, field.p):
            raise _ReplayReject("Malformed:scalar-out-of-range")
        self._src.absorb(m.encode())
        return m.kind, m.value

    def _match_challenge(self, kind: int, value) -> None:
        m = self._next()
        if m.role != ROLE_VERIFIER or m.tag != TAG_CHALLENGE or m.kind != kind:
            raise _ReplayReject("ProtocolViolation:challenge-slot")
        if m.value != value:
            raise _ReplayReject("ChallengeMismatch")

    def challenge_scalar(self, label: str, s: SampleSet) -> int:
        v = self._src.draw_scalar(label, s)
        self._match_challenge(KIND_SCALAR, v)
        return v

    def challenge_vector(self, label: str, s: SampleSet, count: int) -> list[int]:
        vals = [self._src.draw_scalar(f"{label}.{i}", s) for i in range(count)]
        self._match_challenge(KIND_VEC, vals)
        return vals

    def challenge_nonzero_vector(self, label: str, s: SampleSet, count: int) -> list[int]:
        vals = [_draw_nonzero(self._src, f"{label}.{i}", s) for i in range(count)]
        self._match_challenge(KIND_VEC, vals)
        return vals

    def challenge_prime(self, label: str, bits: int) -> int:
        v = draw_prime(self._src, label, bits)
        self._match_challenge(KIND_UINT, v)
        return v

    def finish(self) -> None:
        if self._pos != len(self._msgs):
            raise _ReplayReject("ProtocolViolation:trailing-messages")


class LiveVerifierChannel:
    """Interactive verifier half over a transport."""

    def __init__(self, source, transport, transcript: Transcript):
        self._src = source
        self._tr = transport
        self._t = transcript

    @property
    def is_fiat_shamir(self) -> bool:
        return self._src.kind == "fiat-shamir"

    def recv(self, tag: int, kinds: tuple[int, ...], field: Optional[PrimeField] = None):
        m = _parse_frame(self._tr.recv_frame())
        if m.role != ROLE_PROVER or m.tag != tag or m.kind not in kinds:
            raise ProtocolViolation("unexpected message from prover")
        if field is not None and not _payload_in_field(m.kind, m.value, field.p):
            raise ProtocolViolation("prover sent out-of-range scalar")
        self._t.messages.append(m)
        self._src.absorb(m.encode())
        return m.kind, m.value

    def _emit(self, kind: int, value) -> None:
        m = Message(ROLE_VERIFIER, TAG_CHALLENGE, kind, value)
        self._t.messages.append(m)
        self._tr.send_frame(_msg_frame(m))

    def challenge_scalar(self, label: str, s: SampleSet) -> int:
        v = self._src.draw_scalar(label, s)
        self._emit(KIND_SCALAR, v)
        return v

    def challenge_vector(self, label: str, s: SampleSet, count: int) -> list[int]:
        vals = [self._src.draw_scalar(f"{label}.{i}", s) for i in range(count)]
        self._emit(KIND_VEC, vals)
        return vals

    def challenge_nonzero_vector(self, label: str, s: SampleSet, count: int) -> list[int]:
        vals = [_draw_nonzero(self._src, f"{label}.{i}", s) for i in range(count)]
        self._emit(KIND_VEC, vals)
        return vals

    def challenge_prime(self, label: str, bits: int) -> int:
        v = draw_prime(self._src, label, bits)
        self._emit(KIND_UINT, v)
        return v


class LiveProverChannel:
    """Interactive prover half over a transport."""

    is_fiat_shamir = False

    def __init__(self, transport):
        self._tr = transport

    def send(self, tag: int, kind: int, value=None) -> None:
        self._tr.send_frame(
            _msg_frame(Message(ROLE_PROVER, tag, kind, _canon_value(kind, value)))
        )

    def _challenge(self, kind: int):
        m = _parse_frame(self._tr.recv_frame())
        if m.role != ROLE_VERIFIER or m.tag != TAG_CHALLENGE or m.kind != kind:
            raise ProtocolViolation("expected a challenge")
        return m.value

    def challenge_scalar(self, label: str, s: SampleSet) -> int:
        v = self._challenge(KIND_SCALAR)
        if v not in s:
            raise ProtocolViolation("challenge outside the sample set")
        return v

    def challenge_vector(self, label: str, s: SampleSet, count: int) -> list[int]:
        v = self._challenge(KIND_VEC)
        if len(v) != count or any(x not in s for x in v):
            raise ProtocolViolation("malformed vector challenge")
        return v

    def challenge_nonzero_vector(self, label: str, s: SampleSet, count: int) -> list[int]:
        v = self.challenge_vector(label, s, count)
        if any(x == 0 for x in v):
            raise ProtocolViolation("zero entry in nonzero challenge")
        return v

    def challenge_prime(self, label: str, bits: int) -> int:
        v = self._challenge(KIND_UINT)
        if not (1 << (bits - 1) <= v < 1 << bits) or not is_probable_prime(v):
            raise ProtocolViolation("challenge is not a prime of the agreed size")
        return v


# -- session runners ----------------------------------------------------------

DEFAULT_ROUND_TIMEOUT = 60.0


def run_session(
    protocol_id: str,
    params: bytes,
    digest: bytes,
    prover_fn: Callable,
    verifier_fn: Callable,
    source,
    timeout: float = DEFAULT_ROUND_TIMEOUT,
):
    """Live session with the prover on a worker thread.

    Returns (verdict, result, transcript).  Raises Timeout,
    ProtocolViolation or TransportError if the session itself breaks;
    mere disbelief is a rejecting verdict instead.
    """
    source.begin(protocol_id, params, digest)
    to_prover: queue.Queue = queue.Queue()
    to_verifier: queue.Queue = queue.Queue()
    verifier_tr = QueueTransport(to_prover, to_verifier, timeout)
    prover_tr = QueueTransport(to_verifier, to_prover, timeout)
    mode = MODE_FIAT_SHAMIR if source.kind == "fiat-shamir" else MODE_INTERACTIVE
    transcript = Transcript(protocol_id, mode, digest, params, [])

    def prover_main():
        try:
            prover_fn(LiveProverChannel(prover_tr))
        except BaseException as exc:  # surface prover crashes to the peer
            prover_tr.send_frame(_abort_frame(f"{type(exc).__name__}: {exc}"))

    worker = threading.Thread(target=prover_main, daemon=True)
    worker.start()
    try:
        verdict, result = verifier_fn(LiveVerifierChannel(source, verifier_tr, transcript))
    finally:
        # wake a prover still waiting on a challenge so the join is quick
        verifier_tr.send_frame(_abort_frame("session closed"))
        worker.join(timeout=timeout)
    verdict.transcript = transcript
    return verdict, result, transcript


def run_remote_session(
    protocol_id: str,
    params: bytes,
    digest: bytes,
    transport,
    verifier_fn: Callable,
    source,
):
    """Verifier side of a live session whose prover sits across a transport."""
    source.begin(protocol_id, params, digest)
    mode = MODE_FIAT_SHAMIR if source.kind == "fiat-shamir" else MODE_INTERACTIVE
    transcript = Transcript(protocol_id, mode, digest, params, [])
    verdict, result = verifier_fn(LiveVerifierChannel(source, transport, transcript))
    verdict.transcript = transcript
    return verdict, result, transcript


def serve_session(transport, prover_fn: Callable) -> None:
    """Prover side of a live session across a transport."""
    try:
        prover_fn(LiveProverChannel(transport))
    except (Timeout, TransportError):
        raise
    except BaseException as exc:
        transport.send_frame(_abort_frame(f"{type(exc).__name__}: {exc}"))
        raise


def fs_prove(
    protocol_id: str,
    params: bytes,
    digest: bytes,
    prover_fn: Callable,
    source: Optional[FiatShamirSource] = None,
) -> Transcript:
    """Run the prover alone against the hash chain; returns the transcript."""
    src = source if source is not None else FiatShamirSource()
    src.begin(protocol_id, params, digest)
    transcript = Transcript(protocol_id, MODE_FIAT_SHAMIR, digest, params, [])
    prover_fn(FSProverChannel(src, transcript))
    return transcript


def verify_recorded(
    transcript: Transcript,
    protocol_id: str,
    digest: bytes,
    params: bytes,
    verifier_fn: Callable,
):
    """Replay a hash-compiled transcript, re-deriving every challenge.

    Accepts only if the transcript binds to the expected instance, every
    recorded challenge matches its re-derivation, every check passes, and
    no messages are left over.
    """
    if transcript.mode != MODE_FIAT_SHAMIR:
        return Verdict.reject("ModeMismatch"), None
    if transcript.protocol_id != protocol_id:
        return Verdict.reject("ProtocolViolation:protocol-id"), None
    if transcript.instance_digest != digest:
        return Verdict.reject("InstanceDigestMismatch"), None
    if transcript.params != params:
        return Verdict.reject("ParamsMismatch"), None
    src = FiatShamirSource()
    src.begin(protocol_id, params, digest)
    channel = ReplayVerifierChannel(src, transcript)
    try:
        verdict, result = verifier_fn(channel)
        if verdict.accepted:
            channel.finish()
    except _ReplayReject as rej:
        return Verdict.reject(rej.reason), None
    verdict.transcript = transcript
    return verdict, result


def certify(
    protocol_id: str,
    params: bytes,
    digest: bytes,
    prover_fn: Callable,
    verifier_fn: Callable,
    source,
    timeout: float = DEFAULT_ROUND_TIMEOUT,
):
    """One-shot honest run: live session for interactive sources, a
    prove-then-replay round trip for hash-chain sources."""
    if source.kind == "fiat-shamir":
        transcript = fs_prove(protocol_id, params, digest, prover_fn, source)
        verdict, result = verify_recorded(
            transcript, protocol_id, digest, params, verifier_fn
        )
        verdict.transcript = transcript
        return verdict, result
    verdict, result, _ = run_session(
        protocol_id, params, digest, prover_fn, verifier_fn, source, timeout
    )
    return verdict, result
