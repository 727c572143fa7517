"""Key-encapsulation mechanisms behind one interface.

Built in:

* ``toy-kem`` -- INSECURE, TEST-ONLY. ``pk = H("pk-derive" || sk)``, the
  ciphertext is the encapsulation randomness itself and
  ``ss = H("ss" || pk || r)``, so anyone holding pk and ct recovers ss.
  It exists so protocol tests are fast and the HAKE harness has a
  breakable KEM to detect.
* ``x25519`` -- DH-based KEM: ct is an ephemeral X25519 public key.
* ``ml-kem-512/768/1024`` -- registered only when ``kyber_py`` is importable.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from cryptography.hazmat.primitives.asymmetric.x25519 import X25519PrivateKey, X25519PublicKey

from ..errors import EncodingError, UnknownAlgorithm
from .primitives import Rng, draw


class KemAlgorithm:
    """(KGen, Encaps, Decaps) with fixed, declared byte lengths.

    ``decaps`` returns ``None`` for the bottom symbol (algorithm-level failure).
    """

    alg_id: str
    public_key_len: int
    secret_key_len: int
    ciphertext_len: int
    shared_secret_len: int

    def kgen(self, rng: Rng) -> Tuple[bytes, bytes]:
        raise NotImplementedError

    def encaps(self, public_key: bytes, rng: Rng) -> Tuple[bytes, bytes]:
        raise NotImplementedError

    def decaps(self, secret_key: bytes, ciphertext: bytes) -> Optional[bytes]:
        raise NotImplementedError

    def _expect(self, what: str, value: bytes, n: int) -> None:
        if len(value) != n:
            raise EncodingError(f"{self.alg_id}: {what} must be {n} bytes, got {len(value)}")

    def __repr__(self) -> str:
        return f"<KEM {self.alg_id}>"


def _sha256(*parts: bytes) -> bytes:
    return hashlib.sha256(b"".join(parts)).digest()


class ToyKem(KemAlgorithm):
    alg_id = "toy-kem"
    public_key_len = secret_key_len = ciphertext_len = shared_secret_len = 32

    def public_from_secret(self, secret_key: bytes) -> bytes:
        self._expect("secret key", secret_key, 32)
        return _sha256(b"pk-derive", secret_key)

    def kgen(self, rng: Rng) -> Tuple[bytes, bytes]:
        sk = draw(rng, 32)
        return self.public_from_secret(sk), sk

    def encaps(self, public_key: bytes, rng: Rng) -> Tuple[bytes, bytes]:
        self._expect("public key", public_key, 32)
        r = draw(rng, 32)
        return r, _sha256(b"ss", public_key, r)

    def decaps(self, secret_key: bytes, ciphertext: bytes) -> Optional[bytes]:
        self._expect("ciphertext", ciphertext, 32)
        return _sha256(b"ss", self.public_from_secret(secret_key), ciphertext)

    @staticmethod
    def break_encapsulation(public_key: bytes, ciphertext: bytes) -> bytes:
        """Recover ss from public values -- the deliberate weakness."""
        return _sha256(b"ss", public_key, ciphertext)


class X25519Kem(KemAlgorithm):
    alg_id = "x25519"
    public_key_len = secret_key_len = ciphertext_len = shared_secret_len = 32

    def kgen(self, rng: Rng) -> Tuple[bytes, bytes]:
        sk = draw(rng, 32)
        pk = X25519PrivateKey.from_private_bytes(sk).public_key().public_bytes_raw()
        return pk, sk

    def encaps(self, public_key: bytes, rng: Rng) -> Tuple[bytes, bytes]:
        self._expect("public key", public_key, 32)
        eph = X25519PrivateKey.from_private_bytes(draw(rng, 32))
        ct = eph.public_key().public_bytes_raw()
        return ct, self._combine(eph, public_key, ct, public_key)

    def decaps(self, secret_key: bytes, ciphertext: bytes) -> Optional[bytes]:
        self._expect("secret key", secret_key, 32)
        self._expect("ciphertext", ciphertext, 32)
        priv = X25519PrivateKey.from_private_bytes(secret_key)
        pk = priv.public_key().public_bytes_raw()
        return self._combine(priv, ciphertext, ciphertext, pk)

    @staticmethod
    def _combine(priv: X25519PrivateKey, peer: bytes, ct: bytes, pk: bytes) -> Optional[bytes]:
        try:
            dh = priv.exchange(X25519PublicKey.from_public_bytes(peer))
        except ValueError:  # low-order point
            return None
        return _sha256(b"x25519-kem", dh, ct, pk)


class MlKem(KemAlgorithm):
    """FIPS 203 ML-KEM through the pure-python ``kyber_py`` package."""

    _SIZES = {
        "ml-kem-512": (800, 1632, 768),
        "ml-kem-768": (1184, 2400, 1088),
        "ml-kem-1024": (1568, 3168, 1568),
    }

    def __init__(self, alg_id: str):
        from kyber_py import ml_kem

        self.alg_id = alg_id
        self._impl = getattr(ml_kem, alg_id.upper().replace("-", "_"))
        self.public_key_len, self.secret_key_len, self.ciphertext_len = self._SIZES[alg_id]
        self.shared_secret_len = 32

    def kgen(self, rng: Rng) -> Tuple[bytes, bytes]:
        return self._impl._keygen_internal(draw(rng, 32), draw(rng, 32))

    def encaps(self, public_key: bytes, rng: Rng) -> Tuple[bytes, bytes]:
        self._expect("public key", public_key, self.public_key_len)
        ss, ct = self._impl._encaps_internal(public_key, draw(rng, 32))
        return ct, ss

    def decaps(self, secret_key: bytes, ciphertext: bytes) -> Optional[bytes]:
        self._expect("secret key", secret_key, self.secret_key_len)
        self._expect("ciphertext", ciphertext, self.ciphertext_len)
        return self._impl.decaps(secret_key, ciphertext)


KEMS: Dict[str, KemAlgorithm] = {
    "toy-kem": ToyKem(),
    "x25519": X25519Kem(),
}

try:  # optional external provider
    import kyber_py  # noqa: F401
except ImportError:
    pass
else:
    for _name in MlKem._SIZES:
        KEMS[_name] = MlKem(_name)


def get_kem(alg_id: str) -> KemAlgorithm:
    try:
        return KEMS[alg_id]
    except KeyError:
        raise UnknownAlgorithm(f"unknown kem {alg_id!r}") from None


def register_kem(alg: KemAlgorithm, *, replace: bool = False) -> None:
    if alg.alg_id in KEMS and not replace:
        raise ValueError(f"kem {alg.alg_id!r} already registered")
    KEMS[alg.alg_id] = alg


def have_kem(alg_id: str) -> bool:
    return alg_id in KEMS


def manifest() -> Dict[str, Dict[str, int]]:
    """alg_id -> declared lengths for every registered KEM."""
    return {
        k.alg_id: {
            "public_key_len": k.public_key_len,
            "secret_key_len": k.secret_key_len,
            "ciphertext_len": k.ciphertext_len,
            "shared_secret_len": k.shared_secret_len,
        }
        for k in KEMS.values()
    }
