import logging
from abc import ABC, abstractmethod
from contextlib import asynccontextmanager
from typing import AsyncIterator, Literal

import anyio
from anyio.abc import ObjectReceiveStream, ObjectSendStream, SocketAttribute, SocketStream
from anyio.streams.buffered import BufferedByteReceiveStream

from src.config import settings
from src.exceptions import PeerError, Timeout, Truncated
from src.protocol.schemas import Role
from src.schemas import CustomBase
from src.transport.frames import (
    HEADER_SIZE,
    ByteCount,
    Frame,
    deserialize_frame,
    measure_frame,
    parse_header,
    serialize_frame,
)

logger = logging.getLogger(__name__)

CONNECT_RETRY_SECS = 0.05


class TranscriptEntry(CustomBase):
    direction: Literal["sent", "received"]
    peer: Role | None
    frame: Frame
    wire: bytes


class Transcript(CustomBase):
    """Everything one party sent and received during a session."""

    owner: Role
    entries: list[TranscriptEntry] = []

    def record(self, direction: Literal["sent", "received"], peer: Role | None, frame: Frame, wire: bytes) -> TranscriptEntry:
        entry = TranscriptEntry(direction=direction, peer=peer, frame=frame, wire=wire)
        self.entries.append(entry)
        return entry

    def view(self) -> list[TranscriptEntry]:
        return [entry for entry in self.entries if entry.direction == "received"]

    def sent(self) -> list[TranscriptEntry]:
        return [entry for entry in self.entries if entry.direction == "sent"]

    def sent_bytes(self) -> ByteCount:
        return sum((measure_frame(entry.frame) for entry in self.sent()), ByteCount())


class Link(ABC):
    """Bidirectional frame channel between two roles, with per-message timeout."""

    def __init__(self, local: Role, peer: Role | None, transcript: Transcript, timeout: float | None = None):
        self.local = local
        self.peer = peer
        self.transcript = transcript
        self.timeout = settings.timeout_secs if timeout is None else timeout
        self._entries: list[TranscriptEntry] = []

    @property
    def peer_name(self) -> str:
        return self.peer.value if self.peer else "peer"

    def identify(self, peer: Role) -> None:
        """Name an anonymous peer once its first message says who it is."""
        self.peer = peer
        for entry in self._entries:
            entry.peer = peer

    async def send(self, frame: Frame) -> None:
        wire = serialize_frame(frame)
        try:
            with anyio.fail_after(self.timeout):
                await self._send_bytes(wire)
        except TimeoutError:
            raise Timeout(f"{self.local.value}: sending {frame.msg_type.name} to {self.peer_name} timed out")
        except (anyio.BrokenResourceError, anyio.ClosedResourceError, OSError) as exc:
            raise PeerError(f"{self.local.value}: connection to {self.peer_name} lost: {exc}")
        self._entries.append(self.transcript.record("sent", self.peer, frame, wire))
        logger.debug("%s -> %s %s (%d bytes)", self.local.value, self.peer_name, frame.msg_type.name, frame.payload_len)

    async def receive(self) -> Frame:
        try:
            with anyio.fail_after(self.timeout):
                wire = await self._receive_bytes()
        except TimeoutError:
            raise Timeout(f"{self.local.value}: waiting for {self.peer_name} timed out")
        except (anyio.EndOfStream, anyio.IncompleteRead):
            raise Truncated(f"{self.local.value}: {self.peer_name} closed the connection mid-frame")
        except (anyio.BrokenResourceError, anyio.ClosedResourceError, OSError) as exc:
            raise PeerError(f"{self.local.value}: connection to {self.peer_name} lost: {exc}")
        frame = deserialize_frame(wire)
        self._entries.append(self.transcript.record("received", self.peer, frame, wire))
        logger.debug("%s <- %s %s (%d bytes)", self.local.value, self.peer_name, frame.msg_type.name, frame.payload_len)
        return frame

    @abstractmethod
    async def _send_bytes(self, wire: bytes) -> None: ...

    @abstractmethod
    async def _receive_bytes(self) -> bytes: ...

    @abstractmethod
    async def aclose(self) -> None: ...


class MemoryLink(Link):
    def __init__(
        self,
        local: Role,
        peer: Role,
        transcript: Transcript,
        outgoing: ObjectSendStream[bytes],
        incoming: ObjectReceiveStream[bytes],
        timeout: float | None = None,
    ):
        super().__init__(local, peer, transcript, timeout)
        self._outgoing = outgoing
        self._incoming = incoming

    async def _send_bytes(self, wire: bytes) -> None:
        await self._outgoing.send(wire)

    async def _receive_bytes(self) -> bytes:
        return await self._incoming.receive()

    async def aclose(self) -> None:
        await self._outgoing.aclose()
        await self._incoming.aclose()


class TcpLink(Link):
    def __init__(self, local: Role, peer: Role | None, transcript: Transcript, stream: SocketStream, timeout: float | None = None):
        super().__init__(local, peer, transcript, timeout)
        self._stream = stream
        self._buffered = BufferedByteReceiveStream(stream)

    async def _send_bytes(self, wire: bytes) -> None:
        await self._stream.send(wire)

    async def _receive_bytes(self) -> bytes:
        header = await self._buffered.receive_exactly(HEADER_SIZE)
        _, _, payload_len = parse_header(header)
        payload = await self._buffered.receive_exactly(payload_len) if payload_len else b""
        return header + payload

    async def aclose(self) -> None:
        await self._stream.aclose()


class Acceptor(ABC):
    def __init__(self, local: Role, timeout: float):
        self.local = local
        self.timeout = timeout

    async def accept(self, transcript: Transcript, peer: Role | None = None) -> Link:
        try:
            with anyio.fail_after(self.timeout):
                return await self._accept(transcript, peer)
        except TimeoutError:
            raise Timeout(f"{self.local.value}: no peer connected within {self.timeout:g}s")

    @abstractmethod
    async def _accept(self, transcript: Transcript, peer: Role | None) -> Link: ...


class Transport(ABC):
    def __init__(self, timeout: float | None = None):
        self.timeout = settings.timeout_secs if timeout is None else timeout

    @abstractmethod
    def listen(self, local: Role) -> AsyncIterator[Acceptor]: ...

    @abstractmethod
    async def connect(self, local: Role, peer: Role, transcript: Transcript) -> Link: ...


class _MemoryAcceptor(Acceptor):
    def __init__(self, local: Role, timeout: float, inbox: ObjectReceiveStream[Link]):
        super().__init__(local, timeout)
        self._inbox = inbox

    async def _accept(self, transcript: Transcript, peer: Role | None) -> Link:
        link = await self._inbox.receive()
        link.transcript = transcript
        return link


class InProcessTransport(Transport):
    """Unbuffered memory streams: a send completes only when the peer receives it."""

    def __init__(self, timeout: float | None = None):
        super().__init__(timeout)
        self._inboxes: dict[Role, tuple[ObjectSendStream[Link], ObjectReceiveStream[Link]]] = {}

    def _inbox(self, role: Role):
        if role not in self._inboxes:
            self._inboxes[role] = anyio.create_memory_object_stream(0)
        return self._inboxes[role]

    @asynccontextmanager
    async def listen(self, local: Role) -> AsyncIterator[Acceptor]:
        yield _MemoryAcceptor(local, self.timeout, self._inbox(local)[1])

    async def connect(self, local: Role, peer: Role, transcript: Transcript) -> Link:
        forward_send, forward_receive = anyio.create_memory_object_stream(0)
        backward_send, backward_receive = anyio.create_memory_object_stream(0)
        ours = MemoryLink(local, peer, transcript, forward_send, backward_receive, self.timeout)
        # the peer's transcript is attached when it accepts
        theirs = MemoryLink(peer, local, Transcript(owner=peer), backward_send, forward_receive, self.timeout)
        try:
            with anyio.fail_after(self.timeout):
                await self._inbox(peer)[0].send(theirs)
        except TimeoutError:
            raise Timeout(f"{local.value}: {peer.value} is not accepting connections")
        return ours


class _TcpAcceptor(Acceptor):
    def __init__(self, local: Role, timeout: float, listener):
        super().__init__(local, timeout)
        self._listener = listener
        # a listener admits one pending accept at a time
        self._lock = anyio.Lock()

    async def _accept(self, transcript: Transcript, peer: Role | None) -> Link:
        async with self._lock:
            stream = await self._listener.accept()
        return TcpLink(self.local, peer, transcript, stream, self.timeout)


class TcpTransport(Transport):
    def __init__(self, endpoints: dict[Role, tuple[str, int]] | None = None, timeout: float | None = None):
        super().__init__(timeout)
        self.endpoints = dict(endpoints or default_endpoints())

    @asynccontextmanager
    async def listen(self, local: Role) -> AsyncIterator[Acceptor]:
        host, port = self.endpoints[local]
        multi = await anyio.create_tcp_listener(local_host=host, local_port=port)
        async with multi:
            listener = multi.listeners[0]
            self.endpoints[local] = (host, listener.extra(SocketAttribute.local_port))
            logger.info("%s listening on %s:%d", local.value, *self.endpoints[local])
            yield _TcpAcceptor(local, self.timeout, listener)

    async def connect(self, local: Role, peer: Role, transcript: Transcript) -> Link:
        host, port = self.endpoints[peer]
        deadline = anyio.current_time() + self.timeout
        while True:
            try:
                stream = await anyio.connect_tcp(host, port)
                return TcpLink(local, peer, transcript, stream, self.timeout)
            except OSError as exc:
                if anyio.current_time() + CONNECT_RETRY_SECS >= deadline:
                    raise Timeout(f"{local.value}: could not reach {peer.value} at {host}:{port}: {exc}")
                await anyio.sleep(CONNECT_RETRY_SECS)


def default_endpoints() -> dict[Role, tuple[str, int]]:
    return {
        Role.ALICE: (settings.host, settings.alice_port),
        Role.BOB: (settings.host, settings.bob_port),
        Role.SERVER: (settings.host, settings.server_port),
    }

