"""Certificate issuance and the two trust-store modes.

Pinned mode ignores attestations and accepts only byte-identical certificates.
Verifier mode hands the certificate to a callable, e.g. :class:`Ed25519Issuer`.
"""

from __future__ import annotations

import os
from typing import Callable, Dict, Iterable, Optional

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey, Ed25519PublicKey

from .wire import Certificate, encode_fields

Verifier = Callable[[Certificate], bool]


class TrustStore:
    def __init__(self, pinned: Iterable[Certificate] = (), verifier: Optional[Verifier] = None):
        self._pinned = {c.encode() for c in pinned}
        self.verifier = verifier

    @property
    def mode(self) -> str:
        return "verifier" if self.verifier is not None else "pinned"

    def add(self, cert: Certificate) -> None:
        self._pinned.add(cert.encode())

    def check(self, cert: Certificate) -> bool:
        if self.verifier is not None:
            return bool(self.verifier(cert))
        return cert.encode() in self._pinned


class Ed25519Issuer:
    """Single-level CA signing the certificate tbs bytes with Ed25519."""

    def __init__(self, issuer_id: str, key: Optional[Ed25519PrivateKey] = None):
        self.issuer_id = issuer_id
        self._key = key or Ed25519PrivateKey.generate()
        self.public_key = self._key.public_key()

    @classmethod
    def from_seed(cls, issuer_id: str, seed: bytes) -> "Ed25519Issuer":
        return cls(issuer_id, Ed25519PrivateKey.from_private_bytes(seed))

    def issue(self, subject_id: str, kem_alg_id: str, public_key: bytes) -> Certificate:
        unsigned = Certificate(subject_id, kem_alg_id, public_key, self.issuer_id)
        return Certificate(subject_id, kem_alg_id, public_key, self.issuer_id, self._key.sign(unsigned.tbs()))


def ed25519_verifier(issuers: Dict[str, Ed25519PublicKey]) -> Verifier:
    def verify(cert: Certificate) -> bool:
        pub = issuers.get(cert.issuer_id)
        if pub is None:
            return False
        try:
            pub.verify(cert.attestation, cert.tbs())
        except InvalidSignature:
            return False
        return True

    return verify


# Sizes used to emulate a root CA + intermediate CA hierarchy signing with
# ML-DSA-87 and Ed25519 in parallel.
MLDSA87_PK_LEN = 2592
MLDSA87_SIG_LEN = 4627
ED25519_PK_LEN = 32
ED25519_SIG_LEN = 64


def simulated_chain_attestation(
    tbs: bytes,
    *,
    layers: int = 2,
    pq_sig_len: int = MLDSA87_SIG_LEN,
    pq_pk_len: int = MLDSA87_PK_LEN,
    classical_sig_len: int = ED25519_SIG_LEN,
    classical_pk_len: int = ED25519_PK_LEN,
    rng_bytes: Callable[[int], bytes] = os.urandom,
) -> bytes:
    """Size-faithful stand-in for a two-layer CA chain.

    Layout: the leaf's dual signature by the intermediate CA, then for every
    further layer the intermediate's public keys and its dual signature by
    the layer above. Signature bytes are random placeholders; the result
    is NOT verifiable and only serves bandwidth accounting.
    """
    del tbs  # placeholders do not depend on the signed bytes
    parts = [rng_bytes(pq_sig_len), rng_bytes(classical_sig_len)]
    for _ in range(layers - 1):
        parts += [
            rng_bytes(pq_pk_len),
            rng_bytes(classical_pk_len),
            rng_bytes(pq_sig_len),
            rng_bytes(classical_sig_len),
        ]
    return encode_fields(parts)

