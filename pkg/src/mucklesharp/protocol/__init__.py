from .certs import Ed25519Issuer, TrustStore, ed25519_verifier, simulated_chain_attestation
from .loopback import StageOutcome, make_pair, run_stage, wire_sizes
from .records import associated_data, open_record, seal_record
from .session import ACCEPT, ACTIVE, INIT, REJECT, RESP, Session, Stage
from .sizes import predicted_sizes
from .suites import (
    BUILTIN_SUITES,
    PROVIDER_SUITES,
    Credentials,
    SessionConfig,
    Suite,
    available_suites,
    get_suite,
    provision,
)
from .wire import Certificate, HandshakeMessage, decode_message, encode_message, split_stream

__all__ = [
    "ACCEPT",
    "ACTIVE",
    "BUILTIN_SUITES",
    "INIT",
    "PROVIDER_SUITES",
    "REJECT",
    "RESP",
    "Certificate",
    "Credentials",
    "Ed25519Issuer",
    "HandshakeMessage",
    "Session",
    "SessionConfig",
    "Stage",
    "StageOutcome",
    "Suite",
    "TrustStore",
    "associated_data",
    "available_suites",
    "decode_message",
    "ed25519_verifier",
    "encode_message",
    "get_suite",
    "make_pair",
    "open_record",
    "predicted_sizes",
    "provision",
    "run_stage",
    "seal_record",
    "simulated_chain_attestation",
    "split_stream",
    "wire_sizes",
]
