"""Drivers for the EUF-CMA (MAC) and IND-CPA/IND-CCA (KEM) experiments.

Adversaries are plain callables:

* EUF-CMA: ``adversary(auth, verify) -> (message, tag)``
* IND-T:   ``adversary(pk, ct_star, key_b, decaps) -> bit``; in ``cpa`` mode
  calling ``decaps`` raises :class:`HarnessError`.
"""

from __future__ import annotations

from typing import Callable, Optional, Set, Tuple

from ..errors import HarnessError
from .kem import KemAlgorithm
from .primitives import MacAlgorithm, Rng, draw

AuthOracle = Callable[[bytes], bytes]
VerifyOracle = Callable[[bytes, bytes], bool]
DecapsOracle = Callable[[bytes], Optional[bytes]]


def run_euf_cma_experiment(
    mac: MacAlgorithm,
    adversary: Callable[[AuthOracle, VerifyOracle], Tuple[bytes, bytes]],
    rng: Rng,
) -> int:
    key = mac.kgen(rng)
    queried: Set[bytes] = set()

    def auth(msg: bytes) -> bytes:
        queried.add(bytes(msg))
        return mac.auth(key, msg)

    def verify(msg: bytes, tag: bytes) -> bool:
        return mac.verify(key, msg, tag)

    m_star, tag_star = adversary(auth, verify)
    return int(mac.verify(key, m_star, tag_star) and bytes(m_star) not in queried)


def run_ind_cca_experiment(
    kem: KemAlgorithm,
    adversary: Callable[[bytes, bytes, bytes, DecapsOracle], int],
    mode: str,
    rng: Rng,
) -> int:
    if mode not in ("cpa", "cca"):
        raise ValueError(f"mode must be 'cpa' or 'cca', not {mode!r}")
    pk, sk = kem.kgen(rng)
    ct_star, key_real = kem.encaps(pk, rng)
    key_random = draw(rng, kem.shared_secret_len)
    queried: Set[bytes] = set()
    b = rng.getrandbits(1)

    def decaps(ct: bytes) -> Optional[bytes]:
        if mode == "cpa":
            raise HarnessError("decapsulation oracle is not available in cpa mode")
        queried.add(bytes(ct))
        return kem.decaps(sk, ct)

    # key_0 is the real encapsulated key, key_1 uniform
    key_b = key_real if b == 0 else key_random
    b_star = adversary(pk, ct_star, key_b, decaps)
    return int(b == b_star and ct_star not in queried)
