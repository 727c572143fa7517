"""TCP transport: one connection per session, frames are handshake messages."""

from __future__ import annotations

import logging
import socket
import socketserver
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from .crypto_suite import system_rng
from .errors import HandshakeRejected, StageError
from .protocol import ACCEPT, INIT, RESP, Session, SessionConfig
from .protocol.session import QkdClient
from .protocol.wire import HEADER_LEN, split_header

log = logging.getLogger(__name__)


class TransportError(ConnectionError):
    pass


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise TransportError("connection closed by peer")
        buf += chunk
    return bytes(buf)


def recv_message(sock: socket.socket) -> Optional[bytes]:
    """One framed message, or None on a clean EOF between messages."""
    first = sock.recv(1)
    if not first:
        return None
    header = first + _recv_exact(sock, HEADER_LEN - 1)
    _, body_len = split_header(header)
    return header + _recv_exact(sock, body_len)


def send_messages(sock: socket.socket, wires: List[bytes]) -> None:
    if wires:
        sock.sendall(b"".join(wires))


# -- responder ------------------------------------------------------------


class _ResponderHandler(socketserver.BaseRequestHandler):
    server: "ResponderServer"

    def handle(self) -> None:
        srv = self.server
        session = Session(srv.session_config, RESP, srv.qkd_factory(), srv.rng_factory())
        peer = "%s:%d" % self.client_address[:2]
        while True:
            try:
                wire = recv_message(self.request)
            except (TransportError, ValueError, OSError) as exc:
                log.warning("%s: transport error: %s", peer, exc)
                return
            if wire is None:
                return
            try:
                out = session.receive(wire)
            except HandshakeRejected as exc:
                log.warning("%s: stage %d reject %s", peer, session.stid, exc.reason.value)
                srv.events.append((session.stid, "reject", exc.reason.value))
                return
            except StageError as exc:
                log.warning("%s: %s", peer, exc)
                return
            send_messages(self.request, out)
            if session.status == ACCEPT:
                log.info("%s: stage %d accept", peer, session.stid)
                srv.events.append((session.stid, "accept", None))


class ResponderServer(socketserver.ThreadingTCPServer):
    """Threaded responder; every connection gets an isolated session."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(
        self,
        addr: Tuple[str, int],
        session_config: SessionConfig,
        qkd_factory: Callable[[], QkdClient],
        rng_factory: Callable[[], object] = system_rng,
    ):
        self.session_config = session_config
        self.qkd_factory = qkd_factory
        self.rng_factory = rng_factory
        self.events: List[Tuple[int, str, Optional[str]]] = []
        super().__init__(addr, _ResponderHandler)

    def serve_in_thread(self) -> threading.Thread:
        t = threading.Thread(target=self.serve_forever, daemon=True)
        t.start()
        return t


# -- initiator ------------------------------------------------------------


@dataclass
class StageRecord:
    index: int
    wall_ms: float
    sizes: Dict[str, int]
    key: bytes = field(repr=False)


def _stage_sizes(session: Session) -> Dict[str, int]:
    stage = session.stage
    sizes = {f"m{w[0]}": len(w) for w in stage.sent + stage.received}
    sizes = dict(sorted(sizes.items()))
    sizes["total"] = sum(sizes.values())
    return sizes


def run_initiator(
    addr: Tuple[str, int],
    session_config: SessionConfig,
    qkd: QkdClient,
    stages: int = 1,
    rng=None,
    timeout: float = 10.0,
) -> List[StageRecord]:
    """Connect, run ``stages`` stages sequentially, return per-stage records.

    Raises :class:`HandshakeRejected` or :class:`TransportError` on failure.
    """
    session = Session(session_config, INIT, qkd, rng or system_rng(), max_stages=stages)
    records = []
    with socket.create_connection(addr, timeout=timeout) as sock:
        for _ in range(stages):
            t0 = time.perf_counter()
            send_messages(sock, session.start())
            while session.status != ACCEPT:
                wire = recv_message(sock)
                if wire is None:
                    raise TransportError(f"responder closed the connection during stage {session.stid}")
                send_messages(sock, session.receive(wire))
            elapsed = (time.perf_counter() - t0) * 1000.0
            records.append(StageRecord(session.stid, elapsed, _stage_sizes(session), session.key(session.stid)))
    return records
