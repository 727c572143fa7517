from .experiments import run_euf_cma_experiment, run_ind_cca_experiment
from .kem import (
    KEMS,
    KemAlgorithm,
    ToyKem,
    X25519Kem,
    get_kem,
    have_kem,
    manifest,
    register_kem,
)
from .primitives import (
    AEADS,
    HASHES,
    MACS,
    PRFS,
    AeadAlgorithm,
    AeadOpenError,
    DualPrf,
    HashAlgorithm,
    MacAlgorithm,
    Rng,
    draw,
    get_aead,
    get_hash,
    get_mac,
    get_prf,
    register_aead,
    system_rng,
)

__all__ = [
    "AEADS",
    "HASHES",
    "KEMS",
    "MACS",
    "PRFS",
    "AeadAlgorithm",
    "AeadOpenError",
    "DualPrf",
    "HashAlgorithm",
    "KemAlgorithm",
    "MacAlgorithm",
    "Rng",
    "ToyKem",
    "X25519Kem",
    "draw",
    "get_aead",
    "get_hash",
    "get_kem",
    "get_mac",
    "get_prf",
    "have_kem",
    "manifest",
    "register_aead",
    "register_kem",
    "run_euf_cma_experiment",
    "run_ind_cca_experiment",
    "system_rng",
]
