import functools
import logging
from typing import Awaitable, Callable, TypeVar

import anyio
import numpy as np

try:
    BaseExceptionGroup
except NameError:  # Python < 3.11
    from exceptiongroup import BaseExceptionGroup

from src.exceptions import ProtocolError, RekException
from src.protocol.roles import run_alice, run_bob, run_server
from src.protocol.schemas import GramMatrix, LabelVector, PartyConfig, PartyOutcome, Role, ServerConfig, ServerOutcome
from src.ring.random import EntropyMode
from src.schemas import CustomBase
from src.transport.frames import ByteCount, MessageType, new_session_id
from src.transport.links import InProcessTransport, Transcript, Transport

logger = logging.getLogger(__name__)

T = TypeVar("T")

# anyio 3 task groups raise their own group type
_GROUP_TYPES = (BaseExceptionGroup, getattr(anyio, "ExceptionGroup", BaseExceptionGroup))


class SessionTimings(CustomBase):
    alice_encode: float
    bob_encode: float
    server_assemble: float


class SessionResult(CustomBase):
    """What one run of the three roles leaves behind, for tests and benchmarks."""

    gram: GramMatrix
    labels: LabelVector
    transcripts: dict[Role, Transcript]
    timings: SessionTimings
    permutations: dict[Role, np.ndarray]

    def sent_bytes(self, role: Role | None = None) -> ByteCount:
        roles = [role] if role else list(self.transcripts)
        return sum((self.transcripts[r].sent_bytes() for r in roles), ByteCount())

    @property
    def protocol_bytes(self) -> int:
        return self.sent_bytes().protocol

    def frame_counts(self) -> dict[MessageType, int]:
        counts = {msg_type: 0 for msg_type in MessageType}
        for transcript in self.transcripts.values():
            for entry in transcript.sent():
                counts[entry.frame.msg_type] += 1
        return counts


def _first_failure(group) -> BaseException:
    for exc in group.exceptions:
        if isinstance(exc, _GROUP_TYPES):
            exc = _first_failure(exc)
        if isinstance(exc, RekException):
            return exc
    return group.exceptions[0]


async def run_session(
    transport: Transport, alice_cfg: PartyConfig, bob_cfg: PartyConfig, server_cfg: ServerConfig
) -> SessionResult:
    """Run Alice, Bob and the server against one transport until the server holds K."""
    transcripts = {role: Transcript(owner=role) for role in Role}
    outcomes: dict[Role, PartyOutcome | ServerOutcome] = {}

    async def play(role: Role, coro) -> None:
        outcomes[role] = await coro

    try:
        async with transport.listen(Role.SERVER) as server_acceptor, transport.listen(Role.BOB) as bob_acceptor:
            async with anyio.create_task_group() as tg:
                tg.start_soon(play, Role.SERVER, run_server(server_cfg, server_acceptor, transcripts[Role.SERVER]))
                tg.start_soon(play, Role.BOB, run_bob(bob_cfg, transport, bob_acceptor, transcripts[Role.BOB]))
                tg.start_soon(play, Role.ALICE, run_alice(alice_cfg, transport, transcripts[Role.ALICE]))
    except _GROUP_TYPES as group:
        raise _first_failure(group) from group
    except OSError as exc:
        raise ProtocolError(f"could not open listener: {exc}")

    server: ServerOutcome = outcomes[Role.SERVER]
    result = SessionResult(
        gram=server.gram,
        labels=server.labels,
        transcripts=transcripts,
        timings=SessionTimings(
            alice_encode=outcomes[Role.ALICE].encode_secs,
            bob_encode=outcomes[Role.BOB].encode_secs,
            server_assemble=server.assemble_secs,
        ),
        permutations={role: outcomes[role].permutation for role in (Role.ALICE, Role.BOB)},
    )
    logger.info("session complete: n=%d, protocol bytes=%d", result.gram.n, result.protocol_bytes)
    return result


def run_session_sync(
    alice_cfg: PartyConfig, bob_cfg: PartyConfig, server_cfg: ServerConfig, transport: Transport | None = None
) -> SessionResult:
    transport = transport or InProcessTransport()
    return anyio.run(functools.partial(run_session, transport, alice_cfg, bob_cfg, server_cfg))


def local_configs(
    alice_data: tuple[np.ndarray, LabelVector],
    bob_data: tuple[np.ndarray, LabelVector],
    seed: int,
    entropy: EntropyMode | None = None,
    frac_bits: int | None = None,
    audit: bool = False,
    session_id: bytes | None = None,
) -> tuple[PartyConfig, PartyConfig, ServerConfig]:
    """Configs for all three roles sharing one session id and run seed."""
    session_id = session_id or new_session_id()
    extra = {"audit": audit}
    if entropy is not None:
        extra["entropy"] = entropy
    if frac_bits is not None:
        extra["frac_bits"] = frac_bits
    alice, bob = (
        PartyConfig(role=role, features=x, labels=y.targets, seed=seed, session_id=session_id, **extra)
        for role, (x, y) in ((Role.ALICE, alice_data), (Role.BOB, bob_data))
    )
    server_extra = {key: value for key, value in extra.items() if key != "entropy"}
    return alice, bob, ServerConfig(session_id=session_id, **server_extra)


def run_daemon(main: Callable[[], Awaitable[T]]) -> T:
    """anyio.run for a single role, surfacing the first domain error of a failed task group."""
    try:
        return anyio.run(main)
    except _GROUP_TYPES as group:
        raise _first_failure(group) from group
    except OSError as exc:
        raise ProtocolError(f"could not open listener: {exc}")
