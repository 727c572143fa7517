"""Stage key schedule: transcript hashes, chaining keys, traffic secrets, SecState.

All derivations are ``F(key, label || context)`` with raw concatenation.
Every value is written once; reading or deriving out of order raises
:class:`ScheduleOrderError`.
"""

from __future__ import annotations

from typing import Dict, Iterator, List, Optional, Tuple

from .crypto_suite import AeadAlgorithm, DualPrf, HashAlgorithm
from .errors import ScheduleOrderError

LABELS: Tuple[bytes, ...] = (
    b"derive k c",
    b"derive k pq",
    b"first ck",
    b"second ck",
    b"third ck",
    b"fourth ck",
    b"i hs traffic",
    b"r hs traffic",
    b"hs derived",
    b"first ak",
    b"i ahs traffic",
    b"r ahs traffic",
    b"ahs derived",
    b"second ak",
    b"derive i fk",
    b"derive r fk",
    b"i app traffic",
    b"r app traffic",
    b"secstate",
)

LABEL_BINDINGS = ("table", "figure")
RATS_MODES = ("figure", "uniform")

# label index used for (IHTS, RHTS, dHS) under each binding
_HS_LABEL_INDEX = {
    "table": (6, 7, 8),
    "figure": (7, 8, 6),
}

INPUTS = ("ss_c", "ss_pq", "k_q", "ss_I", "ss_R", "sec_state_in")
DERIVED = (
    "k_c", "k_pq", "k0", "k1", "k2", "k3",
    "IHTS", "RHTS", "dHS",
    "AHS", "IAHTS", "RAHTS", "dAHS",
    "MS", "fk_I", "fk_R",
    "IATS", "RATS", "sec_state_next",
)

# transcript digest index -> number of leading messages hashed
_DIGEST_SPAN = {1: 2, 2: 4, 3: 6, 4: 7, 5: 8}


class Transcript:
    """Wire bytes of m1..m8 as transmitted, with lazily cached digests."""

    def __init__(self, hash_alg: HashAlgorithm):
        self.hash = hash_alg
        self.messages: List[bytes] = []
        self._digests: Dict[int, bytes] = {0: hash_alg.digest(b"")}

    def record(self, index: int, wire: bytes) -> None:
        if index != len(self.messages) + 1:
            raise ScheduleOrderError(
                f"m{index} recorded after {len(self.messages)} messages"
            )
        self.messages.append(bytes(wire))

    def digest(self, j: int) -> bytes:
        """H_j; H_0 is H("")."""
        if j in self._digests:
            return self._digests[j]
        span = _DIGEST_SPAN[j]
        if len(self.messages) < span:
            raise ScheduleOrderError(f"H{j} needs m1..m{span}, have {len(self.messages)}")
        self._digests[j] = self.hash.digest(b"".join(self.messages[:span]))
        return self._digests[j]

    def __len__(self) -> int:
        return len(self.messages)


class KeySchedule:
    """Monotone store for one stage's inputs and derived secrets."""

    def __init__(
        self,
        prf: DualPrf,
        *,
        label_binding: str = "table",
        rats_mode: str = "figure",
        labels: Tuple[bytes, ...] = LABELS,
    ):
        if label_binding not in LABEL_BINDINGS:
            raise ValueError(f"label_binding must be one of {LABEL_BINDINGS}")
        if rats_mode not in RATS_MODES:
            raise ValueError(f"rats_mode must be one of {RATS_MODES}")
        self.prf = prf
        self.label_binding = label_binding
        self.rats_mode = rats_mode
        self.labels = labels
        self._values: Dict[str, bytes] = {}

    # -- storage ---------------------------------------------------------

    def set(self, name: str, value: bytes) -> None:
        if name not in INPUTS and name not in DERIVED:
            raise KeyError(name)
        if name in self._values:
            raise ScheduleOrderError(f"{name} already set")
        self._values[name] = bytes(value)

    def __getitem__(self, name: str) -> bytes:
        try:
            return self._values[name]
        except KeyError:
            raise ScheduleOrderError(f"{name} not yet available") from None

    def get(self, name: str) -> Optional[bytes]:
        return self._values.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self._values

    def items(self) -> Iterator[Tuple[str, bytes]]:
        return iter(self._values.items())

    def _require(self, *names: str) -> None:
        missing = [n for n in names if n not in self._values]
        if missing:
            raise ScheduleOrderError(f"missing inputs: {', '.join(missing)}")

    def _f(self, key_name: str, label_index: int, context: bytes) -> bytes:
        return self.prf.eval(self[key_name], self.labels[label_index] + context)

    # -- derivations -----------------------------------------------------

    def derive_handshake_secrets(self, ts: Transcript) -> None:
        h1 = ts.digest(1)
        h0 = ts.digest(0)
        self._require("ss_c", "ss_pq", "k_q", "sec_state_in")
        self.set("k_c", self._f("ss_c", 0, h1))
        self.set("k_pq", self._f("ss_pq", 1, h1))
        self.set("k0", self._f("k_pq", 2, h1))
        self.set("k1", self._f("k_c", 3, self["k0"]))
        self.set("k2", self._f("k_q", 4, self["k1"]))
        self.set("k3", self._f("sec_state_in", 5, self["k2"]))
        i_ihts, i_rhts, i_dhs = _HS_LABEL_INDEX[self.label_binding]
        self.set("IHTS", self._f("k3", i_ihts, h1))
        self.set("RHTS", self._f("k3", i_rhts, h1))
        self.set("dHS", self._f("k3", i_dhs, h0))

    def derive_authenticated_secrets(self, ts: Transcript) -> None:
        self._require("dHS", "ss_I")
        h2 = ts.digest(2)
        self.set("AHS", self._f("dHS", 9, self["ss_I"]))
        self.set("IAHTS", self._f("AHS", 10, h2))
        self.set("RAHTS", self._f("AHS", 11, h2))
        self.set("dAHS", self._f("AHS", 12, ts.digest(0)))

    def derive_master_and_finished(self, ts: Transcript) -> None:
        self._require("dAHS", "ss_R")
        h3 = ts.digest(3)
        self.set("MS", self._f("dAHS", 13, self["ss_R"]))
        self.set("fk_I", self._f("MS", 14, h3))
        self.set("fk_R", self._f("MS", 15, h3))

    def derive_initiator_app_secret(self, ts: Transcript) -> None:
        self._require("MS")
        self.set("IATS", self._f("MS", 16, ts.digest(4)))

    def derive_responder_app_and_state(self, ts: Transcript) -> None:
        self._require("MS")
        h5 = ts.digest(5)
        rats_key = "dAHS" if self.rats_mode == "figure" else "MS"
        self.set("RATS", self._f(rats_key, 17, h5))
        self.set("sec_state_next", self._f("MS", 18, h5))

    def derive_application_and_state(self, ts: Transcript) -> None:
        if "IATS" not in self:
            self.derive_initiator_app_secret(ts)
        self.derive_responder_app_and_state(ts)

    def session_key(self) -> bytes:
        """Exported stage key: IATS || RATS."""
        return self["IATS"] + self["RATS"]


def traffic_key_expand(secret: bytes, aead: AeadAlgorithm, prf: DualPrf) -> Tuple[bytes, bytes]:
    """AEAD (key, iv_base) for one traffic secret."""
    key = prf.eval(secret, b"key")[: aead.key_len]
    iv = prf.eval(secret, b"iv")[: aead.nonce_len]
    return key, iv


def record_nonce(iv_base: bytes, seq: int) -> bytes:
    """iv_base XOR the 64-bit big-endian sequence number, right-aligned."""
    if not 0 <= seq < 1 << 64:
        raise ValueError("sequence number out of range")
    n = len(iv_base)
    return (int.from_bytes(iv_base, "big") ^ seq).to_bytes(n, "big")


def format_vectors(entries: List[Tuple[str, bytes]]) -> str:
    """Render ``name = hex`` lines (the test-vector file format)."""
    return "".join(f"{name} = {value.hex()}\n" for name, value in entries)


def parse_vectors(text: str) -> Dict[str, str]:
    """Inverse of :func:`format_vectors`; values stay as strings (hex or flags)."""
    out: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected 'name = value'")
        out[name.strip()] = value.strip()
    return out
