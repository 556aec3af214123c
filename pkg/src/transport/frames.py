"""REK1 wire format.

frame   := magic "REK1" | msg_type u8 | session_id 16B | payload_len u64 | payload
All integers are little-endian; ring elements are raw u64, reals binary64.
"""
import logging
import struct
import uuid
from enum import IntEnum

import numpy as np
from pydantic import Field

from src.config import settings
from src.encoding.schemas import DotRandomness
from src.exceptions import BadMagic, DimensionMismatch, LengthMismatch, Truncated, UnknownType
from src.protocol.schemas import LabelVector, Role, ShareBundle
from src.schemas import CustomBase, FrozenBase

logger = logging.getLogger(__name__)

MAGIC = b"REK1"
SESSION_ID_LEN = 16
HEADER = struct.Struct("<4sB16sQ")
HEADER_SIZE = HEADER.size  # 29

_U8 = np.dtype("<u8")
_F8 = np.dtype("<f8")
_WIRE_ROLES = {Role.ALICE: 0, Role.BOB: 1}


class MessageType(IntEnum):
    RANDOMNESS = 0x01
    SHARE_UPLOAD = 0x02
    ACK = 0x03
    ERROR = 0x04


class ErrorCode(IntEnum):
    BAD_FRAME = 1
    SESSION_MISMATCH = 2
    ROLE_CONFLICT = 3
    DIMENSION_MISMATCH = 4
    INTERNAL = 5


def new_session_id() -> bytes:
    return uuid.uuid4().bytes


class Frame(FrozenBase):
    msg_type: MessageType
    session_id: bytes = Field(min_length=SESSION_ID_LEN, max_length=SESSION_ID_LEN)
    payload: bytes = b""

    @property
    def payload_len(self) -> int:
        return len(self.payload)


def serialize_frame(frame: Frame, max_payload_len: int | None = None) -> bytes:
    max_payload_len = settings.max_payload_len if max_payload_len is None else max_payload_len
    if frame.payload_len > max_payload_len:
        raise LengthMismatch(f"payload of {frame.payload_len} bytes exceeds the {max_payload_len}-byte cap")
    return HEADER.pack(MAGIC, frame.msg_type, frame.session_id, frame.payload_len) + frame.payload


def parse_header(header: bytes, max_payload_len: int | None = None) -> tuple[MessageType, bytes, int]:
    max_payload_len = settings.max_payload_len if max_payload_len is None else max_payload_len
    if len(header) < HEADER_SIZE:
        raise Truncated(f"frame header needs {HEADER_SIZE} bytes, got {len(header)}")
    magic, raw_type, session_id, payload_len = HEADER.unpack(header[:HEADER_SIZE])
    if magic != MAGIC:
        raise BadMagic(f"bad magic {magic!r}")
    try:
        msg_type = MessageType(raw_type)
    except ValueError:
        raise UnknownType(f"unknown message type 0x{raw_type:02x}")
    if payload_len > max_payload_len:
        raise LengthMismatch(f"declared payload of {payload_len} bytes exceeds the {max_payload_len}-byte cap")
    return msg_type, session_id, payload_len


def deserialize_frame(data: bytes, max_payload_len: int | None = None) -> Frame:
    msg_type, session_id, payload_len = parse_header(data, max_payload_len)
    body = data[HEADER_SIZE:]
    if len(body) < payload_len:
        raise Truncated(f"payload declared {payload_len} bytes, got {len(body)}")
    if len(body) > payload_len:
        raise LengthMismatch(f"payload declared {payload_len} bytes, got {len(body)}")
    return Frame(msg_type=msg_type, session_id=session_id, payload=bytes(body))


class _Reader:
    def __init__(self, payload: bytes):
        self._payload = payload
        self._offset = 0

    def take(self, size: int) -> bytes:
        if self._offset + size > len(self._payload):
            raise Truncated("payload ended early")
        chunk = self._payload[self._offset : self._offset + size]
        self._offset += size
        return chunk

    def unpack(self, fmt: str) -> tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def array(self, dtype: np.dtype, count: int) -> np.ndarray:
        return np.frombuffer(self.take(dtype.itemsize * count), dtype=dtype).copy()

    def finish(self) -> None:
        if self._offset != len(self._payload):
            raise LengthMismatch(f"{len(self._payload) - self._offset} trailing payload bytes")


def encode_randomness(r: DotRandomness) -> bytes:
    return b"".join(
        [
            struct.pack("<Q", r.n_f),
            r.r1_vec.astype(_U8).tobytes(),
            r.r2_vec.astype(_U8).tobytes(),
            struct.pack("<Q", r.r3),
        ]
    )


def decode_randomness(payload: bytes) -> DotRandomness:
    reader = _Reader(payload)
    (n_f,) = reader.unpack("<Q")
    r1 = reader.array(_U8, n_f).astype(np.uint64)
    r2 = reader.array(_U8, n_f).astype(np.uint64)
    (r3,) = reader.unpack("<Q")
    reader.finish()
    return DotRandomness(r1_vec=r1, r2_vec=r2, r3=r3)


def encode_share_upload(bundle: ShareBundle) -> bytes:
    return b"".join(
        [
            struct.pack("<BQQ", _WIRE_ROLES[bundle.role], bundle.n_f, bundle.n),
            # one sample after another, i.e. the n_f x n matrix column by column
            np.ascontiguousarray(bundle.masked_matrix.T).astype(_U8).tobytes(),
            bundle.masked_scalars.astype(_U8).tobytes(),
            np.ascontiguousarray(bundle.local_gram).astype(_F8).tobytes(),
            np.ascontiguousarray(bundle.labels.targets).astype(_F8).tobytes(),
        ]
    )


def decode_share_upload(payload: bytes) -> ShareBundle:
    reader = _Reader(payload)
    raw_role, n_f, n = reader.unpack("<BQQ")
    roles = {wire: role for role, wire in _WIRE_ROLES.items()}
    if raw_role not in roles:
        raise DimensionMismatch(f"unknown party role byte {raw_role}")
    masked_matrix = reader.array(_U8, n_f * n).astype(np.uint64).reshape(n, n_f).T.copy()
    masked_scalars = reader.array(_U8, n).astype(np.uint64)
    local_gram = reader.array(_F8, n * n).astype(np.float64).reshape(n, n)
    targets = reader.array(_F8, 2 * n).astype(np.float64).reshape(n, 2)
    reader.finish()
    return ShareBundle(
        role=roles[raw_role],
        masked_matrix=masked_matrix,
        masked_scalars=masked_scalars,
        local_gram=local_gram,
        labels=LabelVector(targets=targets),
    )


def encode_error(code: int, message: str) -> bytes:
    return struct.pack("<H", code) + message.encode("utf-8")


def decode_error(payload: bytes) -> tuple[int, str]:
    reader = _Reader(payload)
    (code,) = reader.unpack("<H")
    return code, payload[2:].decode("utf-8", errors="replace")


class ByteCount(CustomBase):
    """Bytes moved, split into the encoding itself, everything else, and framing."""

    protocol: int = 0
    auxiliary: int = 0
    framing: int = 0

    def __add__(self, other: "ByteCount") -> "ByteCount":
        return ByteCount(
            protocol=self.protocol + other.protocol,
            auxiliary=self.auxiliary + other.auxiliary,
            framing=self.framing + other.framing,
        )

    @property
    def total(self) -> int:
        return self.protocol + self.auxiliary + self.framing


def measure_frame(frame: Frame) -> ByteCount:
    """Protocol bytes are the masked vectors r1, r2, C1..C4; r3 and headers are auxiliary."""
    protocol = 0
    if frame.msg_type == MessageType.RANDOMNESS:
        (n_f,) = struct.unpack_from("<Q", frame.payload)
        protocol = 2 * n_f * _U8.itemsize
    elif frame.msg_type == MessageType.SHARE_UPLOAD:
        _, n_f, n = struct.unpack_from("<BQQ", frame.payload)
        protocol = (n_f * n + n) * _U8.itemsize
    return ByteCount(protocol=protocol, auxiliary=frame.payload_len - protocol, framing=HEADER_SIZE)
