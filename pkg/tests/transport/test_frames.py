import struct

import numpy as np
import pytest

from src.encoding.schemas import DotRandomness
from src.exceptions import BadMagic, LengthMismatch, Truncated, UnknownType
from src.protocol.schemas import LabelVector, Role, ShareBundle
from src.ring.arithmetic import as_ring_array
from src.transport.frames import (
    HEADER_SIZE,
    ErrorCode,
    Frame,
    MessageType,
    decode_error,
    decode_randomness,
    decode_share_upload,
    deserialize_frame,
    encode_error,
    encode_randomness,
    encode_share_upload,
    measure_frame,
    serialize_frame,
)

SESSION = bytes(range(16))


def _bundle() -> ShareBundle:
    return ShareBundle(
        role=Role.BOB,
        masked_matrix=as_ring_array([[10, 1], [12, 2]]),
        masked_scalars=as_ring_array([113, 7]),
        local_gram=np.array([[25.0, 1.0], [1.0, 4.0]]),
        labels=LabelVector(targets=np.array([[0.1, 0.2], [0.3, 0.4]])),
    )


def test_ack_frame_is_header_only():
    wire = serialize_frame(Frame(msg_type=MessageType.ACK, session_id=SESSION))
    assert len(wire) == HEADER_SIZE == 29
    assert wire[:4] == b"REK1"
    assert deserialize_frame(wire) == Frame(msg_type=MessageType.ACK, session_id=SESSION)


def test_corrupt_magic():
    wire = bytearray(serialize_frame(Frame(msg_type=MessageType.ACK, session_id=SESSION)))
    wire[0] ^= 0xFF
    with pytest.raises(BadMagic):
        deserialize_frame(bytes(wire))


def test_unknown_type():
    wire = struct.pack("<4sB16sQ", b"REK1", 0x7F, SESSION, 0)
    with pytest.raises(UnknownType):
        deserialize_frame(wire)


def test_truncated_and_overlong_payloads():
    wire = serialize_frame(Frame(msg_type=MessageType.ERROR, session_id=SESSION, payload=b"abcdef"))
    with pytest.raises(Truncated):
        deserialize_frame(wire[:-1])
    with pytest.raises(Truncated):
        deserialize_frame(wire[:10])
    with pytest.raises(LengthMismatch):
        deserialize_frame(wire + b"x")


def test_payload_cap():
    frame = Frame(msg_type=MessageType.ERROR, session_id=SESSION, payload=b"x" * 100)
    with pytest.raises(LengthMismatch):
        serialize_frame(frame, max_payload_len=10)
    with pytest.raises(LengthMismatch):
        deserialize_frame(serialize_frame(frame), max_payload_len=10)


def test_randomness_payload():
    r = DotRandomness(r1_vec=as_ring_array([5, 6]), r2_vec=as_ring_array([7, 2**64 - 1]), r3=9)
    payload = encode_randomness(r)
    assert len(payload) == 8 + 2 * 16 + 8
    decoded = decode_randomness(payload)
    assert decoded.r1_vec.tolist() == [5, 6] and decoded.r2_vec.tolist() == [7, 2**64 - 1] and decoded.r3 == 9
    with pytest.raises(Truncated):
        decode_randomness(payload[:-1])


def test_share_upload_payload_keeps_sample_order():
    bundle = _bundle()
    payload = encode_share_upload(bundle)
    # role, n_f, n then the first sample's masked column
    assert struct.unpack_from("<BQQ", payload) == (1, 2, 2)
    assert struct.unpack_from("<2Q", payload, 17) == (10, 12)
    decoded = decode_share_upload(payload)
    assert decoded.role == Role.BOB
    assert np.array_equal(decoded.masked_matrix, bundle.masked_matrix)
    assert np.array_equal(decoded.masked_scalars, bundle.masked_scalars)
    assert np.array_equal(decoded.local_gram, bundle.local_gram)
    assert np.array_equal(decoded.labels.targets, bundle.labels.targets)


def test_share_upload_with_trailing_bytes():
    with pytest.raises(LengthMismatch):
        decode_share_upload(encode_share_upload(_bundle()) + b"\0")


def test_error_payload():
    code, message = decode_error(encode_error(ErrorCode.SESSION_MISMATCH, "wrong session"))
    assert code == ErrorCode.SESSION_MISMATCH and message == "wrong session"


def test_byte_accounting_per_frame():
    r = DotRandomness(r1_vec=as_ring_array([5, 6]), r2_vec=as_ring_array([7, 8]), r3=9)
    count = measure_frame(Frame(msg_type=MessageType.RANDOMNESS, session_id=SESSION, payload=encode_randomness(r)))
    assert (count.protocol, count.auxiliary, count.framing) == (32, 16, 29)

    upload = measure_frame(Frame(msg_type=MessageType.SHARE_UPLOAD, session_id=SESSION, payload=encode_share_upload(_bundle())))
    # C2 (2 x 2) and C4 (2) are protocol bytes; header, gram and labels are not
    assert upload.protocol == 6 * 8
    assert upload.auxiliary == 17 + 4 * 8 + 4 * 8

    ack = measure_frame(Frame(msg_type=MessageType.ACK, session_id=SESSION))
    assert (ack.protocol, ack.auxiliary, ack.total) == (0, 0, 29)
