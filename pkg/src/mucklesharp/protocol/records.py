"""AEAD record framing for m3..m8."""

from __future__ import annotations

from ..key_schedule import record_nonce, traffic_key_expand
from .suites import Suite
from .wire import HandshakeMessage


def associated_data(msg_type: int) -> bytes:
    return b"Message %d" % msg_type


def seal_record(suite: Suite, secret: bytes, msg_type: int, seq: int, payload: bytes) -> bytes:
    key, iv = traffic_key_expand(secret, suite.aead, suite.prf)
    ct = suite.aead.seal(key, record_nonce(iv, seq), associated_data(msg_type), payload)
    return HandshakeMessage(msg_type, (ct,), seq).encode()


def open_record(suite: Suite, secret: bytes, msg: HandshakeMessage, seq: int) -> bytes:
    """Decrypt ``msg`` with the receiver's expected sequence number.

    Raises :class:`AeadOpenError` on any authentication failure.
    """
    key, iv = traffic_key_expand(secret, suite.aead, suite.prf)
    return suite.aead.open(key, record_nonce(iv, seq), associated_data(msg.msg_type), msg.ciphertext)
