"""Wire codec for handshake messages and certificates.

Layout (big-endian)::

    message = msg_type(1) || body_len(3) || body
    field   = field_len(2) || field_bytes

    m1      = [pk_c, pk_pq, n_I, qkd_key_id]
    m2      = [ct_c, ct_pq, n_R]
    m3..m8  = seq(8, unframed) || [aead_ciphertext]
    cert    = [subject_id, kem_alg_id, pk, issuer_id, attestation]
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Iterable, List, Tuple

from ..errors import DecodeError

HEADER_LEN = 4
FIELD_PREFIX = 2
SEQ_LEN = 8
MAX_BODY = (1 << 24) - 1
MAX_FIELD = (1 << 16) - 1

NONCE_LEN = 32
KEY_ID_LEN = 16

M1, M2, M3, M4, M5, M6, M7, M8 = range(1, 9)
_FIELD_COUNT = {M1: 4, M2: 3}


def encode_fields(fields: Iterable[bytes]) -> bytes:
    out = bytearray()
    for f in fields:
        if len(f) > MAX_FIELD:
            raise ValueError(f"field of {len(f)} bytes exceeds {MAX_FIELD}")
        out += struct.pack(">H", len(f))
        out += f
    return bytes(out)


def decode_fields(data: bytes, count: int) -> List[bytes]:
    """Parse exactly ``count`` length-prefixed fields filling ``data``."""
    fields = []
    pos = 0
    for _ in range(count):
        if pos + FIELD_PREFIX > len(data):
            raise DecodeError("truncated field header")
        (n,) = struct.unpack_from(">H", data, pos)
        pos += FIELD_PREFIX
        if pos + n > len(data):
            raise DecodeError(f"field length {n} exceeds remaining {len(data) - pos} bytes")
        fields.append(bytes(data[pos : pos + n]))
        pos += n
    if pos != len(data):
        raise DecodeError(f"{len(data) - pos} trailing bytes")
    return fields


@dataclass(frozen=True)
class HandshakeMessage:
    """Decoded message. ``fields`` holds the framed fields; ``seq`` is set for m3..m8."""

    msg_type: int
    fields: Tuple[bytes, ...]
    seq: int = 0

    @property
    def encrypted(self) -> bool:
        return self.msg_type >= M3

    @property
    def ciphertext(self) -> bytes:
        return self.fields[0]

    def body(self) -> bytes:
        if self.encrypted:
            return struct.pack(">Q", self.seq) + encode_fields(self.fields)
        return encode_fields(self.fields)

    def encode(self) -> bytes:
        if not M1 <= self.msg_type <= M8:
            raise ValueError(f"unknown message type {self.msg_type}")
        body = self.body()
        if len(body) > MAX_BODY:
            raise ValueError("message body too large")
        return bytes([self.msg_type]) + len(body).to_bytes(3, "big") + body


def encode_message(msg: HandshakeMessage) -> bytes:
    return msg.encode()


def split_header(header: bytes) -> Tuple[int, int]:
    if len(header) != HEADER_LEN:
        raise DecodeError("truncated header")
    return header[0], int.from_bytes(header[1:4], "big")


def decode_message(data: bytes) -> HandshakeMessage:
    """Decode exactly one message; trailing bytes are an error."""
    msg_type, body_len = split_header(bytes(data[:HEADER_LEN]))
    if not M1 <= msg_type <= M8:
        raise DecodeError(f"unknown message type 0x{msg_type:02x}")
    body = bytes(data[HEADER_LEN:])
    if len(body) != body_len:
        raise DecodeError(f"body length {len(body)} != declared {body_len}")
    if msg_type in _FIELD_COUNT:
        return HandshakeMessage(msg_type, tuple(decode_fields(body, _FIELD_COUNT[msg_type])))
    if len(body) < SEQ_LEN:
        raise DecodeError("encrypted record shorter than its sequence number")
    (seq,) = struct.unpack_from(">Q", body)
    return HandshakeMessage(msg_type, tuple(decode_fields(body[SEQ_LEN:], 1)), seq)


def split_stream(data: bytes) -> List[bytes]:
    """Cut a concatenation of framed messages into individual wire messages."""
    out = []
    pos = 0
    while pos < len(data):
        if pos + HEADER_LEN > len(data):
            raise DecodeError("truncated header")
        n = int.from_bytes(data[pos + 1 : pos + 4], "big")
        end = pos + HEADER_LEN + n
        if end > len(data):
            raise DecodeError("truncated body")
        out.append(bytes(data[pos:end]))
        pos = end
    return out


@dataclass(frozen=True)
class Certificate:
    subject_id: str
    kem_alg_id: str
    public_key: bytes
    issuer_id: str
    attestation: bytes = b""

    def tbs(self) -> bytes:
        """Bytes covered by the issuer's attestation."""
        return encode_fields(
            [self.subject_id.encode(), self.kem_alg_id.encode(), self.public_key, self.issuer_id.encode()]
        )

    def encode(self) -> bytes:
        return self.tbs() + encode_fields([self.attestation])

    @classmethod
    def decode(cls, data: bytes) -> "Certificate":
        subject, alg, pk, issuer, att = decode_fields(data, 5)
        try:
            return cls(subject.decode(), alg.decode(), pk, issuer.decode(), att)
        except UnicodeDecodeError as exc:
            raise DecodeError(f"certificate identifier is not utf-8: {exc}") from None
