"""Multi-stage session state machine for initiator and responder.

A :class:`Session` is driven synchronously: the initiator calls
:meth:`Session.start`, then both sides feed each received wire message to
:meth:`Session.receive`, which returns the wire messages to send back.
Any failure moves the stage to ``reject`` and raises
:class:`HandshakeRejected` carrying a :class:`Reason`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Protocol, Tuple

from ..crypto_suite import AeadOpenError, Rng, draw
from ..errors import (
    DecodeError,
    EncodingError,
    HandshakeRejected,
    QkdError,
    Reason,
    ScheduleOrderError,
    StageError,
)
from ..key_schedule import KeySchedule, Transcript
from .records import open_record, seal_record
from .suites import SessionConfig
from .wire import (
    KEY_ID_LEN,
    M1,
    M2,
    M3,
    M4,
    M5,
    M6,
    M7,
    M8,
    NONCE_LEN,
    Certificate,
    HandshakeMessage,
    decode_message,
)

log = logging.getLogger(__name__)

INIT, RESP = "init", "resp"
ACTIVE, ACCEPT, REJECT = "active", "accept", "reject"

# message type -> (traffic secret, record sequence number)
_RECORD_KEYS = {
    M3: ("RHTS", 0),
    M4: ("IHTS", 0),
    M5: ("IAHTS", 0),
    M6: ("RAHTS", 0),
    M7: ("IAHTS", 1),
    M8: ("RAHTS", 1),
}


class QkdClient(Protocol):
    def get_key(self, requester: str, partner: str) -> Tuple[bytes, bytes]: ...

    def get_key_by_id(self, requester: str, partner: str, key_id: bytes) -> bytes: ...


@dataclass
class Stage:
    index: int
    schedule: KeySchedule
    transcript: Transcript
    status: Optional[str] = None
    reason: Optional[Reason] = None
    sent: List[bytes] = field(default_factory=list)
    received: List[bytes] = field(default_factory=list)
    # ephemeral secrets by class: q (post-quantum), c (classical), s (symmetric/QKD)
    ephemeral: Dict[str, bytes] = field(default_factory=dict)
    qkd_key_id: Optional[bytes] = None
    peer_certificate: Optional[Certificate] = None
    expected: Optional[int] = None
    scratch: Dict[str, bytes] = field(default_factory=dict)

    @property
    def key(self) -> Optional[bytes]:
        return self.schedule.session_key() if self.status == ACCEPT else None

    @property
    def sec_state(self) -> Optional[bytes]:
        return self.schedule.get("sec_state_next") if self.status == ACCEPT else None


class _Abort(Exception):
    def __init__(self, reason: Reason, detail: str = ""):
        self.reason = reason
        self.detail = detail


class Session:
    """One party's view of one long-lived session of up to ``max_stages`` stages."""

    def __init__(
        self,
        cfg: SessionConfig,
        role: str,
        qkd: QkdClient,
        rng: Rng,
        *,
        max_stages: Optional[int] = None,
        on_accept: Optional[Callable[["Session", int], None]] = None,
    ):
        if role not in (INIT, RESP):
            raise ValueError(f"role must be {INIT!r} or {RESP!r}")
        self.cfg = cfg
        self.role = role
        self.qkd = qkd
        self.rng = rng
        self.max_stages = max_stages
        self.on_accept = on_accept
        self.stages: List[Stage] = []

    # -- HAKE-style views -----------------------------------------------

    @property
    def pid(self) -> str:
        return self.cfg.peer_id

    @property
    def stid(self) -> int:
        return len(self.stages)

    @property
    def stage(self) -> Stage:
        if not self.stages:
            raise StageError("no stage started")
        return self.stages[-1]

    @property
    def status(self) -> Optional[str]:
        return self.stages[-1].status if self.stages else None

    @property
    def reject_reason(self) -> Optional[Reason]:
        return self.stages[-1].reason if self.stages else None

    def key(self, t: int) -> Optional[bytes]:
        """k[t]: available only once stage ``t`` accepted."""
        return self.stages[t - 1].key if 1 <= t <= len(self.stages) else None

    def pss(self, t: int) -> Optional[bytes]:
        return self.stages[t - 1].sec_state if 1 <= t <= len(self.stages) else None

    def sent_upto(self, t: int) -> List[bytes]:
        return [m for st in self.stages[:t] for m in st.sent]

    def received_upto(self, t: int) -> List[bytes]:
        return [m for st in self.stages[:t] for m in st.received]

    # -- stage management ------------------------------------------------

    def advance_stage(self) -> Stage:
        """Open the next stage, chaining the previous stage's SecState."""
        if self.stages and self.stages[-1].status != ACCEPT:
            raise StageError(f"cannot advance from stage {self.stid} in status {self.status}")
        if self.max_stages is not None and self.stid >= self.max_stages:
            raise StageError(f"stage limit {self.max_stages} reached")
        sec_state_in = self.stages[-1].sec_state if self.stages else b""
        suite = self.cfg.suite
        schedule = KeySchedule(suite.prf, label_binding=self.cfg.label_binding, rats_mode=self.cfg.rats_mode)
        schedule.set("sec_state_in", sec_state_in)
        stage = Stage(len(self.stages) + 1, schedule, Transcript(suite.hash))
        stage.expected = M2 if self.role == INIT else M1
        self.stages.append(stage)
        return stage

    def start(self) -> List[bytes]:
        """Initiator: open a stage and emit m1."""
        if self.role != INIT:
            raise StageError("only the initiator starts a stage")
        stage = self.advance_stage()
        return self._guard(stage, self._initiator_start)

    def receive(self, wire: bytes) -> List[bytes]:
        """Process one received wire message; returns the messages to send."""
        if self.role == RESP and (not self.stages or self.status == ACCEPT):
            self.advance_stage()
        if not self.stages or self.status == REJECT:
            raise StageError(f"session not active (status {self.status})")
        if self.status == ACCEPT:
            raise StageError("stage already accepted; start a new one")
        stage = self.stage
        stage.received.append(bytes(wire))
        return self._guard(stage, lambda: self._dispatch(stage, wire))

    def _guard(self, stage: Stage, step: Callable[[], List[bytes]]) -> List[bytes]:
        try:
            out = step()
        except _Abort as exc:
            return self._reject(stage, exc.reason, exc.detail)
        except (DecodeError, EncodingError) as exc:
            return self._reject(stage, Reason.DECODE_ERROR, str(exc))
        except ScheduleOrderError as exc:
            return self._reject(stage, Reason.SCHEDULE_ORDER, str(exc))
        stage.sent.extend(out)
        if stage.status == ACCEPT and self.on_accept is not None:
            self.on_accept(self, stage.index)
        return out

    def _reject(self, stage: Stage, reason: Reason, detail: str) -> List[bytes]:
        stage.status = REJECT
        stage.reason = reason
        log.info("%s %s stage %d rejected: %s %s", self.cfg.self_id, self.role, stage.index, reason.value, detail)
        raise HandshakeRejected(reason, detail)

    def _dispatch(self, stage: Stage, wire: bytes) -> List[bytes]:
        msg = decode_message(wire)
        if msg.msg_type != stage.expected:
            raise _Abort(Reason.STATE_ERROR, f"got m{msg.msg_type}, expected m{stage.expected}")
        handler = {
            M1: self._responder_on_m1,
            M2: self._initiator_on_m2,
            M3: self._initiator_on_m3,
            M4: self._responder_on_m4,
            M5: self._responder_on_m5,
            M6: self._initiator_on_m6,
            M7: self._responder_on_m7,
            M8: self._initiator_on_m8,
        }[msg.msg_type]
        return handler(stage, msg, bytes(wire))

    # -- helpers -----------------------------------------------------------

    def _open(self, stage: Stage, msg: HandshakeMessage) -> bytes:
        secret_name, seq = _RECORD_KEYS[msg.msg_type]
        if msg.seq != seq:
            raise _Abort(Reason.AEAD_FAILURE, f"m{msg.msg_type} sequence {msg.seq} != {seq}")
        try:
            return open_record(self.cfg.suite, stage.schedule[secret_name], msg, seq)
        except AeadOpenError as exc:
            raise _Abort(Reason.AEAD_FAILURE, f"m{msg.msg_type}: {exc}") from None

    def _seal(self, stage: Stage, msg_type: int, payload: bytes) -> bytes:
        secret_name, seq = _RECORD_KEYS[msg_type]
        return seal_record(self.cfg.suite, stage.schedule[secret_name], msg_type, seq, payload)

    def _check_certificate(self, stage: Stage, plaintext: bytes) -> Certificate:
        cert = Certificate.decode(plaintext)
        kem_s = self.cfg.suite.kem_s
        if cert.kem_alg_id != kem_s.alg_id or len(cert.public_key) != kem_s.public_key_len:
            raise _Abort(Reason.CERT_FAILURE, f"certificate KEM {cert.kem_alg_id!r} not acceptable")
        if not self.cfg.trust_store.check(cert):
            raise _Abort(Reason.CERT_FAILURE, f"certificate for {cert.subject_id!r} not trusted")
        if cert.subject_id != self.cfg.peer_id:
            raise _Abort(
                Reason.IDENTITY_MISMATCH, f"certificate subject {cert.subject_id!r} != {self.cfg.peer_id!r}"
            )
        stage.peer_certificate = cert
        return cert

    @staticmethod
    def _expect_len(what: str, value: bytes, n: int) -> None:
        if len(value) != n:
            raise DecodeError(f"{what} must be {n} bytes, got {len(value)}")

    def _decaps(self, kem, sk: bytes, ct: bytes, what: str) -> bytes:
        ss = kem.decaps(sk, ct)
        if ss is None:
            raise DecodeError(f"{what} decapsulation failed")
        return ss

    # -- initiator -----------------------------------------------------------

    def _initiator_start(self) -> List[bytes]:
        stage = self.stage
        suite = self.cfg.suite
        n_i = draw(self.rng, NONCE_LEN)
        pk_c = sk_c = b""
        if suite.kem_c is not None:
            pk_c, sk_c = suite.kem_c.kgen(self.rng)
        pk_pq, sk_pq = suite.kem_pq.kgen(self.rng)
        try:
            key_id, k_q = self.qkd.get_key(self.cfg.self_id, self.cfg.peer_id)
        except QkdError as exc:
            raise _Abort(Reason.QKD_UNAVAILABLE, str(exc)) from None
        stage.status = ACTIVE
        stage.ephemeral.update(q=sk_pq, s=k_q)
        if suite.kem_c is not None:
            stage.ephemeral["c"] = sk_c
        stage.scratch.update(sk_pq=sk_pq, sk_c=sk_c, n_I=n_i)
        stage.qkd_key_id = key_id
        stage.schedule.set("k_q", k_q)
        m1 = HandshakeMessage(M1, (pk_c, pk_pq, n_i, key_id)).encode()
        stage.transcript.record(1, m1)
        return [m1]

    def _initiator_on_m2(self, stage: Stage, msg: HandshakeMessage, wire: bytes) -> List[bytes]:
        suite = self.cfg.suite
        ct_c, ct_pq, n_r = msg.fields
        self._expect_len("n_R", n_r, NONCE_LEN)
        self._expect_len("ct_pq", ct_pq, suite.kem_pq.ciphertext_len)
        if suite.kem_c is None:
            self._expect_len("ct_c", ct_c, 0)
            ss_c = b""
        else:
            self._expect_len("ct_c", ct_c, suite.kem_c.ciphertext_len)
            ss_c = self._decaps(suite.kem_c, stage.scratch["sk_c"], ct_c, "classical")
        ss_pq = self._decaps(suite.kem_pq, stage.scratch["sk_pq"], ct_pq, "post-quantum")
        stage.transcript.record(2, wire)
        stage.schedule.set("ss_c", ss_c)
        stage.schedule.set("ss_pq", ss_pq)
        stage.schedule.derive_handshake_secrets(stage.transcript)
        stage.expected = M3
        return []

    def _initiator_on_m3(self, stage: Stage, msg: HandshakeMessage, wire: bytes) -> List[bytes]:
        cert_r = self._check_certificate(stage, self._open(stage, msg))
        stage.transcript.record(3, wire)
        ct_i, ss_i = self.cfg.suite.kem_s.encaps(cert_r.public_key, self.rng)
        stage.schedule.set("ss_I", ss_i)
        m4 = self._seal(stage, M4, ct_i)
        stage.transcript.record(4, m4)
        stage.schedule.derive_authenticated_secrets(stage.transcript)
        m5 = self._seal(stage, M5, self.cfg.credentials.certificate.encode())
        stage.transcript.record(5, m5)
        stage.expected = M6
        return [m4, m5]

    def _initiator_on_m6(self, stage: Stage, msg: HandshakeMessage, wire: bytes) -> List[bytes]:
        kem_s = self.cfg.suite.kem_s
        ct_r = self._open(stage, msg)
        self._expect_len("ct_R", ct_r, kem_s.ciphertext_len)
        ss_r = self._decaps(kem_s, self.cfg.credentials.secret_key, ct_r, "long-term")
        stage.transcript.record(6, wire)
        stage.schedule.set("ss_R", ss_r)
        stage.schedule.derive_master_and_finished(stage.transcript)
        tag = self.cfg.suite.mac.auth(stage.schedule["fk_I"], stage.transcript.digest(3))
        m7 = self._seal(stage, M7, tag)
        stage.transcript.record(7, m7)
        stage.schedule.derive_initiator_app_secret(stage.transcript)
        stage.expected = M8
        return [m7]

    def _initiator_on_m8(self, stage: Stage, msg: HandshakeMessage, wire: bytes) -> List[bytes]:
        tag = self._open(stage, msg)
        if not self.cfg.suite.mac.verify(stage.schedule["fk_R"], stage.transcript.digest(4), tag):
            raise _Abort(Reason.MAC_FAILURE, "responder finished tag invalid")
        stage.transcript.record(8, wire)
        stage.schedule.derive_responder_app_and_state(stage.transcript)
        stage.status = ACCEPT
        stage.expected = None
        return []

    # -- responder -----------------------------------------------------------

    def _responder_on_m1(self, stage: Stage, msg: HandshakeMessage, wire: bytes) -> List[bytes]:
        suite = self.cfg.suite
        stage.status = ACTIVE
        pk_c, pk_pq, n_i, key_id = msg.fields
        self._expect_len("n_I", n_i, NONCE_LEN)
        self._expect_len("qkd_key_id", key_id, KEY_ID_LEN)
        self._expect_len("pk_pq", pk_pq, suite.kem_pq.public_key_len)
        self._expect_len("pk_c", pk_c, suite.kem_c.public_key_len if suite.kem_c else 0)
        try:
            k_q = self.qkd.get_key_by_id(self.cfg.self_id, self.cfg.peer_id, key_id)
        except QkdError as exc:
            raise _Abort(Reason.QKD_UNAVAILABLE, f"{type(exc).__name__}: {exc}") from None
        stage.qkd_key_id = key_id
        stage.ephemeral["s"] = k_q
        n_r = draw(self.rng, NONCE_LEN)
        ct_pq, ss_pq = suite.kem_pq.encaps(pk_pq, self.rng)
        ct_c = ss_c = b""
        if suite.kem_c is not None:
            ct_c, ss_c = suite.kem_c.encaps(pk_c, self.rng)
            if ss_c is None:
                raise DecodeError("classical encapsulation failed")
        m2 = HandshakeMessage(M2, (ct_c, ct_pq, n_r)).encode()
        stage.transcript.record(1, wire)
        stage.transcript.record(2, m2)
        for name, value in (("k_q", k_q), ("ss_c", ss_c), ("ss_pq", ss_pq)):
            stage.schedule.set(name, value)
        stage.schedule.derive_handshake_secrets(stage.transcript)
        m3 = self._seal(stage, M3, self.cfg.credentials.certificate.encode())
        stage.transcript.record(3, m3)
        stage.expected = M4
        return [m2, m3]

    def _responder_on_m4(self, stage: Stage, msg: HandshakeMessage, wire: bytes) -> List[bytes]:
        kem_s = self.cfg.suite.kem_s
        ct_i = self._open(stage, msg)
        self._expect_len("ct_I", ct_i, kem_s.ciphertext_len)
        ss_i = self._decaps(kem_s, self.cfg.credentials.secret_key, ct_i, "long-term")
        stage.transcript.record(4, wire)
        stage.schedule.set("ss_I", ss_i)
        stage.schedule.derive_authenticated_secrets(stage.transcript)
        stage.expected = M5
        return []

    def _responder_on_m5(self, stage: Stage, msg: HandshakeMessage, wire: bytes) -> List[bytes]:
        cert_i = self._check_certificate(stage, self._open(stage, msg))
        stage.transcript.record(5, wire)
        # encapsulate to the initiator's long-term key (mutual authentication)
        ct_r, ss_r = self.cfg.suite.kem_s.encaps(cert_i.public_key, self.rng)
        stage.schedule.set("ss_R", ss_r)
        m6 = self._seal(stage, M6, ct_r)
        stage.transcript.record(6, m6)
        stage.schedule.derive_master_and_finished(stage.transcript)
        stage.expected = M7
        return [m6]

    def _responder_on_m7(self, stage: Stage, msg: HandshakeMessage, wire: bytes) -> List[bytes]:
        mac = self.cfg.suite.mac
        tag = self._open(stage, msg)
        if not mac.verify(stage.schedule["fk_I"], stage.transcript.digest(3), tag):
            raise _Abort(Reason.MAC_FAILURE, "initiator finished tag invalid")
        stage.transcript.record(7, wire)
        stage.schedule.derive_initiator_app_secret(stage.transcript)
        rf = mac.auth(stage.schedule["fk_R"], stage.transcript.digest(4))
        m8 = self._seal(stage, M8, rf)
        stage.transcript.record(8, m8)
        stage.schedule.derive_responder_app_and_state(stage.transcript)
        stage.status = ACCEPT
        stage.expected = None
        return [m8]

