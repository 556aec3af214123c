"""The three roles as single-session state machines.

alice:  shuffle -> draw masks -> RANDOMNESS to bob -> encode -> SHARE_UPLOAD to server
bob:    shuffle -> wait RANDOMNESS -> encode -> SHARE_UPLOAD to server
server: accept both uploads concurrently -> ACK each -> assemble the gram matrix

The server only ever answers with ACK or ERROR.
"""
import logging
import time

import anyio
import numpy as np

from src.exceptions import (
    BadMagic,
    DimensionMismatch,
    LengthMismatch,
    PeerError,
    ProtocolError,
    RekException,
    RoleConflict,
    SessionMismatch,
    UnknownType,
)
from src.protocol.operations import (
    MASK_STREAM,
    SHUFFLE_STREAM,
    alice_setup,
    assemble_gram,
    build_share_bundle,
    seed_stream,
    shuffle_dataset,
)
from src.protocol.schemas import (
    FeatureMatrix,
    LabelVector,
    PartyConfig,
    PartyOutcome,
    Role,
    ServerConfig,
    ServerOutcome,
    ShareBundle,
)
from src.ring.arithmetic import FixedPointCodec
from src.ring.random import RandomSource
from src.transport.frames import (
    ErrorCode,
    Frame,
    MessageType,
    decode_error,
    decode_randomness,
    decode_share_upload,
    encode_error,
    encode_randomness,
    encode_share_upload,
)
from src.transport.links import Acceptor, Link, Transcript, Transport

logger = logging.getLogger(__name__)

_ERROR_CODES = {
    BadMagic: ErrorCode.BAD_FRAME,
    UnknownType: ErrorCode.BAD_FRAME,
    LengthMismatch: ErrorCode.BAD_FRAME,
    SessionMismatch: ErrorCode.SESSION_MISMATCH,
    RoleConflict: ErrorCode.ROLE_CONFLICT,
    DimensionMismatch: ErrorCode.DIMENSION_MISMATCH,
}


def _prepare(cfg: PartyConfig) -> tuple[FeatureMatrix, LabelVector, np.ndarray]:
    features = FeatureMatrix.from_real(cfg.features, FixedPointCodec(cfg.frac_bits))
    labels = LabelVector(targets=np.asarray(cfg.labels, dtype=np.float64))
    return shuffle_dataset(features, labels, seed_stream(cfg.seed, cfg.role, SHUFFLE_STREAM))


def _mask_source(cfg: PartyConfig) -> RandomSource:
    return RandomSource(cfg.entropy, seed_stream(cfg.seed, cfg.role, MASK_STREAM) if cfg.entropy == "seeded" else None)


async def _send_error(link: Link, session_id: bytes, exc: RekException) -> None:
    code = _ERROR_CODES.get(type(exc), ErrorCode.INTERNAL)
    try:
        await link.send(Frame(msg_type=MessageType.ERROR, session_id=session_id, payload=encode_error(code, exc.detail)))
    except ProtocolError:
        logger.warning("%s: could not deliver ERROR to %s", link.local.value, link.peer_name)


async def _expect(link: Link, session_id: bytes, msg_type: MessageType) -> Frame:
    try:
        frame = await link.receive()
    except (BadMagic, UnknownType, LengthMismatch) as exc:
        await _send_error(link, session_id, exc)
        raise
    if frame.msg_type == MessageType.ERROR:
        code, message = decode_error(frame.payload)
        raise PeerError(f"{link.peer_name} reported error {code}: {message}", code)
    if frame.session_id != session_id:
        exc = SessionMismatch(f"{link.peer_name} sent session {frame.session_id.hex()}, expected {session_id.hex()}")
        await _send_error(link, session_id, exc)
        raise exc
    if frame.msg_type != msg_type:
        raise ProtocolError(f"expected {msg_type.name} from {link.peer_name}, got {frame.msg_type.name}")
    return frame


async def _ack(link: Link, session_id: bytes) -> None:
    await link.send(Frame(msg_type=MessageType.ACK, session_id=session_id))


async def _upload(transport: Transport, transcript: Transcript, bundle: ShareBundle, session_id: bytes) -> None:
    link = await transport.connect(bundle.role, Role.SERVER, transcript)
    try:
        await link.send(Frame(msg_type=MessageType.SHARE_UPLOAD, session_id=session_id, payload=encode_share_upload(bundle)))
        await _expect(link, session_id, MessageType.ACK)
    finally:
        await link.aclose()


async def run_alice(cfg: PartyConfig, transport: Transport, transcript: Transcript) -> PartyOutcome:
    started = time.perf_counter()
    features, labels, permutation = _prepare(cfg)
    randomness = alice_setup(features.n_f, _mask_source(cfg))
    encode_secs = time.perf_counter() - started

    link = await transport.connect(Role.ALICE, Role.BOB, transcript)
    try:
        await link.send(
            Frame(msg_type=MessageType.RANDOMNESS, session_id=cfg.session_id, payload=encode_randomness(randomness))
        )
        await _expect(link, cfg.session_id, MessageType.ACK)
    finally:
        await link.aclose()
    logger.info("alice: randomness delivered to bob (n_f=%d)", randomness.n_f)

    started = time.perf_counter()
    bundle = await anyio.to_thread.run_sync(build_share_bundle, Role.ALICE, features, labels, randomness, cfg.audit)
    encode_secs += time.perf_counter() - started

    await _upload(transport, transcript, bundle, cfg.session_id)
    logger.info("alice: uploaded %d samples", bundle.n)
    return PartyOutcome(role=Role.ALICE, encode_secs=encode_secs, permutation=permutation)


async def run_bob(cfg: PartyConfig, transport: Transport, acceptor: Acceptor, transcript: Transcript) -> PartyOutcome:
    started = time.perf_counter()
    features, labels, permutation = _prepare(cfg)
    encode_secs = time.perf_counter() - started

    link = await acceptor.accept(transcript, Role.ALICE)
    try:
        frame = await _expect(link, cfg.session_id, MessageType.RANDOMNESS)
        randomness = decode_randomness(frame.payload)
        if randomness.n_f != features.n_f:
            exc = DimensionMismatch(f"alice uses n_f={randomness.n_f}, bob has n_f={features.n_f}")
            await _send_error(link, cfg.session_id, exc)
            raise exc
        await _ack(link, cfg.session_id)
    finally:
        await link.aclose()
    logger.info("bob: randomness received (n_f=%d)", randomness.n_f)

    started = time.perf_counter()
    bundle = await anyio.to_thread.run_sync(build_share_bundle, Role.BOB, features, labels, randomness, cfg.audit)
    encode_secs += time.perf_counter() - started

    await _upload(transport, transcript, bundle, cfg.session_id)
    logger.info("bob: uploaded %d samples", bundle.n)
    return PartyOutcome(role=Role.BOB, encode_secs=encode_secs, permutation=permutation)


async def run_server(cfg: ServerConfig, acceptor: Acceptor, transcript: Transcript) -> ServerOutcome:
    bundles: dict[Role, ShareBundle] = {}

    async def receive_upload() -> None:
        link = await acceptor.accept(transcript)
        try:
            frame = await _expect(link, cfg.session_id, MessageType.SHARE_UPLOAD)
            try:
                bundle = decode_share_upload(frame.payload)
            except (ValueError, DimensionMismatch) as exc:
                error = DimensionMismatch(f"malformed upload: {exc}")
                await _send_error(link, cfg.session_id, error)
                raise error
            link.identify(bundle.role)
            if bundle.role in bundles:
                error = RoleConflict(f"second upload for role {bundle.role.value}")
                await _send_error(link, cfg.session_id, error)
                raise error
            bundles[bundle.role] = bundle
            await _ack(link, cfg.session_id)
            logger.info("server: upload from %s (%d samples)", bundle.role.value, bundle.n)
        finally:
            await link.aclose()

    async with anyio.create_task_group() as tg:
        tg.start_soon(receive_upload)
        tg.start_soon(receive_upload)

    started = time.perf_counter()
    alice, bob = bundles[Role.ALICE], bundles[Role.BOB]
    gram = await anyio.to_thread.run_sync(assemble_gram, alice, bob, cfg.frac_bits, cfg.audit)
    assemble_secs = time.perf_counter() - started
    labels = LabelVector(targets=np.vstack([alice.labels.targets, bob.labels.targets]))
    return ServerOutcome(gram=gram, labels=labels, assemble_secs=assemble_secs)
