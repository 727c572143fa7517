"""Analytic wire-size model: per message, the header plus framed fields."""

from __future__ import annotations

from typing import Dict

from .suites import Suite
from .wire import FIELD_PREFIX, HEADER_LEN, KEY_ID_LEN, NONCE_LEN, SEQ_LEN


def _plain(*field_lens: int) -> int:
    return HEADER_LEN + sum(FIELD_PREFIX + n for n in field_lens)


def _record(suite: Suite, payload_len: int) -> int:
    return HEADER_LEN + SEQ_LEN + FIELD_PREFIX + payload_len + suite.aead.tag_overhead


def predicted_sizes(suite: Suite, cert_i_len: int, cert_r_len: int) -> Dict[str, int]:
    """Bytes on the wire for m1..m8 of one stage, plus ``total``."""
    kem_c = suite.kem_c
    pk_c = kem_c.public_key_len if kem_c else 0
    ct_c = kem_c.ciphertext_len if kem_c else 0
    sizes = {
        "m1": _plain(pk_c, suite.kem_pq.public_key_len, NONCE_LEN, KEY_ID_LEN),
        "m2": _plain(ct_c, suite.kem_pq.ciphertext_len, NONCE_LEN),
        "m3": _record(suite, cert_r_len),
        "m4": _record(suite, suite.kem_s.ciphertext_len),
        "m5": _record(suite, cert_i_len),
        "m6": _record(suite, suite.kem_s.ciphertext_len),
        "m7": _record(suite, suite.mac.tag_len),
        "m8": _record(suite, suite.mac.tag_len),
    }
    sizes["total"] = sum(sizes.values())
    return sizes
