"""Symmetric primitives: hash, dual PRF, MAC and AEAD behind small registries."""

from __future__ import annotations

import hashlib
import hmac
import random
from dataclasses import dataclass
from typing import Callable, Dict, Optional

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM, ChaCha20Poly1305

from ..errors import EncodingError, KeyGenerationError, UnknownAlgorithm

Rng = random.Random


def draw(rng: Rng, n: int) -> bytes:
    """Pull exactly ``n`` bytes from ``rng`` or raise :class:`KeyGenerationError`."""
    try:
        out = rng.randbytes(n)
    except Exception as exc:  # exhausted / broken sources
        raise KeyGenerationError(f"randomness source failed: {exc}") from exc
    if len(out) != n:
        raise KeyGenerationError(f"randomness source returned {len(out)} of {n} bytes")
    return out


@dataclass(frozen=True)
class HashAlgorithm:
    alg_id: str
    digest_len: int
    _name: str

    def digest(self, data: bytes) -> bytes:
        return hashlib.new(self._name, data).digest()


@dataclass(frozen=True)
class DualPrf:
    """Keyed function F(key, input) -> 32 bytes, realised with HMAC.

    Empty keys are accepted: the first-stage SecState and an absent classical
    shared secret are both the empty string.
    """

    alg_id: str
    output_len: int
    _hash_name: str

    def eval(self, key: bytes, data: bytes) -> bytes:
        return hmac.digest(key, data, self._hash_name)[: self.output_len]


@dataclass(frozen=True)
class MacAlgorithm:
    alg_id: str
    tag_len: int
    key_len: int
    _hash_name: str

    def auth(self, key: bytes, msg: bytes) -> bytes:
        if len(key) != self.key_len:
            raise EncodingError(f"{self.alg_id}: key must be {self.key_len} bytes")
        return hmac.digest(key, msg, self._hash_name)[: self.tag_len]

    def verify(self, key: bytes, msg: bytes, tag: bytes) -> bool:
        return hmac.compare_digest(self.auth(key, msg), tag)

    def kgen(self, rng: Rng) -> bytes:
        return draw(rng, self.key_len)


class AeadOpenError(Exception):
    """Authentication failure on open. Never accompanied by plaintext."""


@dataclass(frozen=True)
class AeadAlgorithm:
    alg_id: str
    key_len: int
    nonce_len: int
    tag_overhead: int
    _factory: Callable[[bytes], object]

    def _check(self, key: bytes, nonce: bytes) -> None:
        if len(key) != self.key_len:
            raise EncodingError(f"{self.alg_id}: key must be {self.key_len} bytes")
        if len(nonce) != self.nonce_len:
            raise EncodingError(f"{self.alg_id}: nonce must be {self.nonce_len} bytes")

    def seal(self, key: bytes, nonce: bytes, ad: bytes, plaintext: bytes) -> bytes:
        self._check(key, nonce)
        return self._factory(key).encrypt(nonce, plaintext, ad)

    def open(self, key: bytes, nonce: bytes, ad: bytes, ciphertext: bytes) -> bytes:
        self._check(key, nonce)
        try:
            return self._factory(key).decrypt(nonce, ciphertext, ad)
        except InvalidTag:
            raise AeadOpenError(f"{self.alg_id}: authentication failed") from None


HASHES: Dict[str, HashAlgorithm] = {
    "sha256": HashAlgorithm("sha256", 32, "sha256"),
    "sha3-256": HashAlgorithm("sha3-256", 32, "sha3_256"),
}

PRFS: Dict[str, DualPrf] = {
    "hmac-sha256": DualPrf("hmac-sha256", 32, "sha256"),
    "hmac-sha3-256": DualPrf("hmac-sha3-256", 32, "sha3_256"),
}

MACS: Dict[str, MacAlgorithm] = {
    "hmac-sha256": MacAlgorithm("hmac-sha256", 32, 32, "sha256"),
    # INSECURE: 1-byte tags, exists so the EUF-CMA driver can be shown to catch a weak MAC.
    "hmac-sha256-tag8": MacAlgorithm("hmac-sha256-tag8", 1, 32, "sha256"),
}

AEADS: Dict[str, AeadAlgorithm] = {
    "chacha20-poly1305": AeadAlgorithm("chacha20-poly1305", 32, 12, 16, ChaCha20Poly1305),
    "aes-256-gcm": AeadAlgorithm("aes-256-gcm", 32, 12, 16, AESGCM),
}


def _lookup(table: Dict[str, object], alg_id: str, kind: str):
    try:
        return table[alg_id]
    except KeyError:
        raise UnknownAlgorithm(f"unknown {kind} {alg_id!r}") from None


def get_hash(alg_id: str) -> HashAlgorithm:
    return _lookup(HASHES, alg_id, "hash")


def get_prf(alg_id: str) -> DualPrf:
    return _lookup(PRFS, alg_id, "prf")


def get_mac(alg_id: str) -> MacAlgorithm:
    return _lookup(MACS, alg_id, "mac")


def get_aead(alg_id: str) -> AeadAlgorithm:
    return _lookup(AEADS, alg_id, "aead")


def register_aead(alg: AeadAlgorithm, *, replace: bool = False) -> None:
    if alg.alg_id in AEADS and not replace:
        raise ValueError(f"aead {alg.alg_id!r} already registered")
    AEADS[alg.alg_id] = alg


def system_rng(seed: Optional[int] = None) -> Rng:
    """Seeded deterministic source for tests, OS entropy otherwise."""
    return random.Random(seed) if seed is not None else random.SystemRandom()
