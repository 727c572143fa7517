"""In-memory relay between two sessions, with an optional tamper hook.

Used by tests, the HAKE harness' passive runs, vector emission and the
benchmark's size accounting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from ..crypto_suite import Rng
from ..errors import HandshakeRejected, Reason
from .certs import TrustStore
from .session import ACCEPT, INIT, RESP, Session, QkdClient
from .suites import Credentials, SessionConfig, Suite, provision

# tamper(msg_index, wire) -> wire to deliver
Tamper = Callable[[int, bytes], bytes]


@dataclass
class StageOutcome:
    messages: Dict[int, bytes] = field(default_factory=dict)  # as sent, before tampering
    initiator_status: Optional[str] = None
    responder_status: Optional[str] = None
    rejected_by: Optional[str] = None
    reason: Optional[Reason] = None

    @property
    def both_accepted(self) -> bool:
        return self.initiator_status == ACCEPT and self.responder_status == ACCEPT


def make_pair(
    suite: Suite,
    qkd: QkdClient,
    rng: Rng,
    *,
    initiator_id: str = "alice",
    responder_id: str = "bob",
    label_binding: str = "table",
    rats_mode: str = "figure",
    max_stages: Optional[int] = None,
    credentials: Optional[Tuple[Credentials, Credentials]] = None,
) -> Tuple[Session, Session]:
    """Provision both parties with pinned trust in each other's certificate."""
    if credentials is None:
        credentials = (provision(initiator_id, suite, rng), provision(responder_id, suite, rng))
    cred_i, cred_r = credentials
    trust = TrustStore([cred_i.certificate, cred_r.certificate])
    common = dict(suite=suite, trust_store=trust, label_binding=label_binding, rats_mode=rats_mode)
    cfg_i = SessionConfig(initiator_id, responder_id, credentials=cred_i, **common)
    cfg_r = SessionConfig(responder_id, initiator_id, credentials=cred_r, **common)
    return (
        Session(cfg_i, INIT, qkd, rng, max_stages=max_stages),
        Session(cfg_r, RESP, qkd, rng, max_stages=max_stages),
    )


def run_stage(initiator: Session, responder: Session, tamper: Optional[Tamper] = None) -> StageOutcome:
    """Relay one full stage. Stops at the first rejection instead of raising."""
    out = StageOutcome()
    pending: List[Tuple[Session, bytes]] = []

    def emit(sender: Session, wires: List[bytes]) -> None:
        target = responder if sender is initiator else initiator
        for w in wires:
            idx = w[0]
            out.messages.setdefault(idx, w)
            pending.append((target, tamper(idx, w) if tamper else w))

    try:
        emit(initiator, initiator.start())
        while pending:
            target, wire = pending.pop(0)
            emit(target, target.receive(wire))
    except HandshakeRejected as exc:
        out.reason = exc.reason
        out.rejected_by = initiator.role if initiator.status == "reject" else responder.role
    out.initiator_status = initiator.status
    out.responder_status = responder.status
    return out


def wire_sizes(outcome: StageOutcome) -> Dict[str, int]:
    sizes = {f"m{i}": len(outcome.messages[i]) for i in sorted(outcome.messages)}
    sizes["total"] = sum(sizes.values())
    return sizes
