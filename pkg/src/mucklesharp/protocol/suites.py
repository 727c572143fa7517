"""Cipher suites, per-party credentials and session configuration."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

from ..crypto_suite import (
    AeadAlgorithm,
    DualPrf,
    HashAlgorithm,
    KemAlgorithm,
    MacAlgorithm,
    Rng,
    get_aead,
    get_hash,
    get_kem,
    get_mac,
    get_prf,
    have_kem,
)
from ..key_schedule import LABEL_BINDINGS, RATS_MODES
from .certs import TrustStore
from .wire import Certificate


@dataclass(frozen=True)
class Suite:
    name: str
    long_term_kem: str
    ephemeral_pq_kem: str
    ephemeral_classical_kem: Optional[str] = None
    prf_id: str = "hmac-sha256"
    mac_id: str = "hmac-sha256"
    aead_id: str = "chacha20-poly1305"
    hash_id: str = "sha256"

    @property
    def kem_s(self) -> KemAlgorithm:
        return get_kem(self.long_term_kem)

    @property
    def kem_pq(self) -> KemAlgorithm:
        return get_kem(self.ephemeral_pq_kem)

    @property
    def kem_c(self) -> Optional[KemAlgorithm]:
        return get_kem(self.ephemeral_classical_kem) if self.ephemeral_classical_kem else None

    @property
    def prf(self) -> DualPrf:
        return get_prf(self.prf_id)

    @property
    def mac(self) -> MacAlgorithm:
        return get_mac(self.mac_id)

    @property
    def aead(self) -> AeadAlgorithm:
        return get_aead(self.aead_id)

    @property
    def hash(self) -> HashAlgorithm:
        return get_hash(self.hash_id)

    def available(self) -> bool:
        kems = [self.long_term_kem, self.ephemeral_pq_kem]
        if self.ephemeral_classical_kem:
            kems.append(self.ephemeral_classical_kem)
        return all(have_kem(k) for k in kems)

    def describe(self) -> str:
        eph = [self.ephemeral_pq_kem] + ([self.ephemeral_classical_kem] if self.ephemeral_classical_kem else [])
        return (
            f"{self.name}: ephemeral {'+'.join(eph)}+QKD, long-term {self.long_term_kem}, "
            f"{self.prf_id}/{self.mac_id}/{self.aead_id}/{self.hash_id}"
        )


# Suites that need nothing beyond the base dependencies.
BUILTIN_SUITES: Dict[str, Suite] = {
    s.name: s
    for s in (
        Suite("toy", "toy-kem", "toy-kem"),
        Suite("toy-x25519", "toy-kem", "toy-kem", "x25519"),
        Suite("toy-x25519-gcm", "toy-kem", "toy-kem", "x25519", aead_id="aes-256-gcm", hash_id="sha3-256"),
    )
}

# Suites backed by an external ML-KEM provider; usable only when it is installed.
PROVIDER_SUITES: Dict[str, Suite] = {
    s.name: s
    for s in (
        Suite("mlkem512-x25519", "ml-kem-512", "ml-kem-512", "x25519"),
        Suite("mlkem768-x25519", "ml-kem-768", "ml-kem-768", "x25519"),
        Suite("mlkem1024-x25519", "ml-kem-1024", "ml-kem-1024", "x25519"),
    )
}


def get_suite(name: str) -> Suite:
    suite = BUILTIN_SUITES.get(name) or PROVIDER_SUITES.get(name)
    if suite is None:
        raise KeyError(f"unknown suite {name!r}")
    if not suite.available():
        raise KeyError(f"suite {name!r} needs a KEM provider that is not installed")
    return suite


def available_suites() -> Dict[str, Suite]:
    out = dict(BUILTIN_SUITES)
    out.update({k: s for k, s in PROVIDER_SUITES.items() if s.available()})
    return out


@dataclass(frozen=True)
class Credentials:
    certificate: Certificate
    secret_key: bytes


def provision(
    party_id: str,
    suite: Suite,
    rng: Rng,
    *,
    issuer_id: str = "muckle-ca",
    attest: Optional[Callable[[Certificate], bytes]] = None,
) -> Credentials:
    """Long-term KEM key pair plus a certificate binding it to ``party_id``."""
    pk, sk = suite.kem_s.kgen(rng)
    cert = Certificate(party_id, suite.long_term_kem, pk, issuer_id)
    if attest is not None:
        cert = Certificate(party_id, suite.long_term_kem, pk, issuer_id, attest(cert))
    return Credentials(cert, sk)


@dataclass
class SessionConfig:
    self_id: str
    peer_id: str
    suite: Suite
    credentials: Credentials
    trust_store: TrustStore = field(default_factory=TrustStore)
    label_binding: str = "table"
    rats_mode: str = "figure"

    def __post_init__(self):
        if self.self_id == self.peer_id:
            raise ValueError("a session needs a distinct intended partner")
        if self.label_binding not in LABEL_BINDINGS:
            raise ValueError(f"label_binding must be one of {LABEL_BINDINGS}")
        if self.rats_mode not in RATS_MODES:
            raise ValueError(f"rats_mode must be one of {RATS_MODES}")
        if self.credentials.certificate.kem_alg_id != self.suite.long_term_kem:
            raise ValueError("certificate KEM does not match the suite's long-term KEM")
