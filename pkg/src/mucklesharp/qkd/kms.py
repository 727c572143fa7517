"""In-process QKD key-management simulator.

Keys are drawn from a (seedable) randomness source: there is no QKD
physics here, only the delivery bookkeeping of an ETSI-014 style KMS.
The initiator calls :meth:`get_key` and ships the key ID in-band; the
responder calls :meth:`get_key_by_id`.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, List, Optional, Set, Tuple

from ..crypto_suite import Rng, draw, system_rng
from ..errors import QkdAlreadyConsumed, QkdKeyNotFound, QkdUnauthorized, QkdUnavailable

QKD_KEY_LEN = 32
KEY_ID_LEN = 16


@dataclass
class QkdKeyRecord:
    key_id: bytes
    key: bytes
    owner_pair: FrozenSet[str]
    consumed_by: Set[str] = field(default_factory=set)
    created_at: float = 0.0


@dataclass(frozen=True)
class CorruptionEvent:
    key_id: bytes
    owner_pair: FrozenSet[str]
    at: float


class KeyManagementService:
    """Thread-safe key store for a set of simulated point-to-point links.

    ``pool_size`` caps the number of keys per link; ``keys_per_second``
    throttles :meth:`get_key` to emulate a finite QKD key rate.
    """

    def __init__(
        self,
        rng: Optional[Rng] = None,
        *,
        pool_size: Optional[int] = None,
        keys_per_second: Optional[float] = None,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self._rng = rng if rng is not None else system_rng()
        self.pool_size = pool_size
        self.keys_per_second = keys_per_second
        self._clock = clock
        self._sleep = sleep
        self._next_slot = 0.0
        self._lock = threading.Lock()
        self._links: Dict[FrozenSet[str], int] = {}
        self._records: Dict[bytes, QkdKeyRecord] = {}
        self.corruption_log: List[CorruptionEvent] = []

    def add_link(self, a: str, b: str) -> None:
        if a == b:
            raise ValueError("a QKD link needs two distinct endpoints")
        with self._lock:
            self._links.setdefault(frozenset((a, b)), 0)

    def has_link(self, a: str, b: str) -> bool:
        return frozenset((a, b)) in self._links

    def _throttle(self) -> None:
        if not self.keys_per_second:
            return
        now = self._clock()
        wait = self._next_slot - now
        self._next_slot = max(now, self._next_slot) + 1.0 / self.keys_per_second
        if wait > 0:
            self._sleep(wait)

    def get_key(self, requester: str, partner: str) -> Tuple[bytes, bytes]:
        pair = frozenset((requester, partner))
        with self._lock:
            if requester == partner or pair not in self._links:
                raise QkdUnavailable(f"no QKD link between {requester!r} and {partner!r}")
            if self.pool_size is not None and self._links[pair] >= self.pool_size:
                raise QkdUnavailable(f"key pool for {sorted(pair)} exhausted")
            self._throttle()
            key_id = draw(self._rng, KEY_ID_LEN)
            while key_id in self._records:
                key_id = draw(self._rng, KEY_ID_LEN)
            rec = QkdKeyRecord(key_id, draw(self._rng, QKD_KEY_LEN), pair, {requester}, self._clock())
            self._records[key_id] = rec
            self._links[pair] += 1
            return key_id, rec.key

    def get_key_by_id(self, requester: str, partner: str, key_id: bytes) -> bytes:
        with self._lock:
            rec = self._records.get(bytes(key_id))
            if rec is None:
                raise QkdKeyNotFound(key_id.hex())
            if rec.owner_pair != frozenset((requester, partner)) or requester == partner:
                raise QkdUnauthorized(f"{requester!r} may not fetch key {key_id.hex()}")
            if requester in rec.consumed_by:
                raise QkdAlreadyConsumed(f"{requester!r} already fetched {key_id.hex()}")
            rec.consumed_by.add(requester)
            return rec.key

    def corrupt_key(self, key_id: bytes) -> bytes:
        """Adversarial read: returns the key without consuming it, and logs it."""
        with self._lock:
            rec = self._records.get(bytes(key_id))
            if rec is None:
                raise QkdKeyNotFound(key_id.hex())
            self.corruption_log.append(CorruptionEvent(rec.key_id, rec.owner_pair, self._clock()))
            return rec.key

    def record(self, key_id: bytes) -> QkdKeyRecord:
        return self._records[bytes(key_id)]

    def issued(self) -> int:
        return len(self._records)
