"""Executable HAKE key-indistinguishability experiment.

The challenger owns ``n_P`` parties with long-term KEM keys, a simulated
QKD key service linking every pair, and the sessions the adversary creates.
Every adversary query is appended to :attr:`HakeExperiment.log` together
with the set of stages that had accepted when it was issued; the
cleanness predicate is evaluated from that log alone plus the session
transcripts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, List, Optional, Tuple

from ..crypto_suite import draw
from ..errors import HandshakeRejected, HarnessError, StageError
from ..protocol.certs import TrustStore
from ..protocol.session import ACCEPT, INIT, REJECT, RESP, Session
from ..protocol.suites import BUILTIN_SUITES, Credentials, SessionConfig, Suite, provision
from ..protocol.wire import split_stream
from ..qkd.kms import KeyManagementService

QUERY_KINDS = (
    "Create", "Send", "Reveal", "Test",
    "CorruptQK", "CorruptCK", "CorruptSK",
    "CompromiseQK", "CompromiseCK", "CompromiseSK", "CompromiseSS",
)

StageRef = Tuple[int, int, int]  # (party i, session s, stage t)


@dataclass(frozen=True)
class QueryRecord:
    index: int
    kind: str
    args: Tuple
    result: str  # "value", "bot" or "error"
    accepted: FrozenSet[StageRef]  # stages in accept state when the query was issued

    def line(self) -> str:
        return f"{self.index}\t{self.kind}\t{','.join(map(str, self.args))}\t{self.result}"


@dataclass
class Party:
    index: int
    pid: str
    credentials: Credentials


class HakeExperiment:
    def __init__(
        self,
        n_parties: int = 2,
        n_sessions: int = 4,
        n_stages: int = 3,
        *,
        suite: Suite = BUILTIN_SUITES["toy"],
        seed: Optional[int] = None,
        label_binding: str = "table",
        rats_mode: str = "figure",
    ):
        if n_parties < 2:
            raise ValueError("need at least two parties")
        self.n_parties = n_parties
        self.n_sessions = n_sessions
        self.n_stages = n_stages
        self.suite = suite
        self.label_binding = label_binding
        self.rats_mode = rats_mode
        self.rng = random.Random(seed)
        self.kms = KeyManagementService(random.Random(self.rng.getrandbits(64)))
        self.parties = [
            Party(i, f"P{i}", provision(f"P{i}", suite, self.rng)) for i in range(n_parties)
        ]
        for a in self.parties:
            for b in self.parties[a.index + 1 :]:
                self.kms.add_link(a.pid, b.pid)
        self.trust = TrustStore(p.credentials.certificate for p in self.parties)
        self.b = self.rng.getrandbits(1)
        self.sessions: Dict[Tuple[int, int], Session] = {}
        self._created: Dict[Tuple[int, int, str], int] = {}
        self.log: List[QueryRecord] = []
        self.test_target: Optional[StageRef] = None
        self._random_key: Optional[bytes] = None
        self._revealed_once: set = set()
        self.abort_reason: Optional[str] = None

    # -- bookkeeping -----------------------------------------------------

    def _accepted(self) -> FrozenSet[StageRef]:
        return frozenset(
            (i, s, st.index)
            for (i, s), sess in self.sessions.items()
            for st in sess.stages
            if st.status == ACCEPT
        )

    def _log(self, kind: str, args: Tuple, value) -> object:
        result = "bot" if value is None else "value"
        self.log.append(QueryRecord(len(self.log), kind, args, result, self._accepted()))
        return value

    def _session(self, i: int, s: int) -> Session:
        try:
            return self.sessions[(i, s)]
        except KeyError:
            raise HarnessError(f"no session ({i}, {s})") from None

    def _stage(self, i: int, s: int, t: int):
        sess = self._session(i, s)
        return sess.stages[t - 1] if 1 <= t <= sess.stid else None

    def role(self, i: int, s: int) -> str:
        return self._session(i, s).role

    def party_index(self, pid: str) -> int:
        return int(pid[1:])

    def trace(self) -> str:
        """Line-oriented export of the query log."""
        return "".join(rec.line() + "\n" for rec in self.log)

    # -- queries -----------------------------------------------------------

    def create(self, i: int, j: int, role: str) -> Optional[int]:
        if not (0 <= i < self.n_parties and 0 <= j < self.n_parties):
            raise HarnessError(f"party index out of range: {i}, {j}")
        if i == j:
            raise HarnessError("a party cannot partner with itself")
        if role not in (INIT, RESP):
            raise HarnessError(f"bad role {role!r}")
        if (i, j, role) in self._created:
            return self._log("Create", (i, j, role), None)
        s = sum(1 for (pi, _) in self.sessions if pi == i)
        if s >= self.n_sessions:
            return self._log("Create", (i, j, role), None)
        cfg = SessionConfig(
            self.parties[i].pid,
            self.parties[j].pid,
            self.suite,
            self.parties[i].credentials,
            trust_store=self.trust,
            label_binding=self.label_binding,
            rats_mode=self.rats_mode,
        )
        self.sessions[(i, s)] = Session(
            cfg, role, self.kms, random.Random(self.rng.getrandbits(64)), max_stages=self.n_stages
        )
        self._created[(i, j, role)] = s
        return self._log("Create", (i, j, role), s)

    def send(self, i: int, s: int, m: bytes = b"") -> Optional[bytes]:
        """Deliver ``m`` (zero or more framed messages); an empty ``m`` starts an initiator stage."""
        sess = self._session(i, s)
        out: List[bytes] = []
        try:
            if not m and sess.role == INIT and sess.status in (None, ACCEPT):
                out += sess.start()
            else:
                if sess.status == REJECT:
                    return self._log("Send", (i, s), None)
                try:
                    wires = split_stream(m)
                except ValueError:
                    wires = [m]
                for w in wires or [m]:
                    out += sess.receive(w)
        except (HandshakeRejected, StageError):
            return self._log("Send", (i, s), None)
        return self._log("Send", (i, s), b"".join(out))

    def reveal(self, i: int, s: int, t: int) -> Optional[bytes]:
        return self._log("Reveal", (i, s, t), self._session(i, s).key(t))

    def test(self, i: int, s: int, t: int) -> Optional[bytes]:
        if self.test_target is not None:
            raise HarnessError("only one Test query is allowed")
        real = self._session(i, s).key(t)
        if real is None:
            return self._log("Test", (i, s, t), None)
        self.test_target = (i, s, t)
        if self.b == 1:
            return self._log("Test", (i, s, t), real)
        if self._random_key is None:
            self._random_key = draw(self.rng, len(real))
        return self._log("Test", (i, s, t), self._random_key)

    def _once(self, key: Tuple, value):
        if value is None or key in self._revealed_once:
            return None
        self._revealed_once.add(key)
        return value

    def corrupt_qk(self, i: int) -> Optional[bytes]:
        """Long-term post-quantum (KEM_s) secret key of party i."""
        return self._log("CorruptQK", (i,), self._once(("CorruptQK", i), self.parties[i].credentials.secret_key))

    def corrupt_ck(self, i: int) -> Optional[bytes]:
        # no classical long-term key exists in this protocol
        return self._log("CorruptCK", (i,), None)

    def corrupt_sk(self, i: int) -> Optional[bytes]:
        # no long-term symmetric / pre-shared key exists
        return self._log("CorruptSK", (i,), None)

    def _compromise(self, kind: str, cls: str, i: int, s: int, t: int) -> Optional[bytes]:
        stage = self._stage(i, s, t)
        value = stage.ephemeral.get(cls) if stage is not None else None
        return self._log(kind, (i, s, t), self._once((kind, i, s, t), value))

    def compromise_qk(self, i: int, s: int, t: int) -> Optional[bytes]:
        return self._compromise("CompromiseQK", "q", i, s, t)

    def compromise_ck(self, i: int, s: int, t: int) -> Optional[bytes]:
        return self._compromise("CompromiseCK", "c", i, s, t)

    def compromise_sk(self, i: int, s: int, t: int) -> Optional[bytes]:
        """The QKD key used by stage t."""
        return self._compromise("CompromiseSK", "s", i, s, t)

    def compromise_ss(self, i: int, s: int, t: int) -> Optional[bytes]:
        """SecState that entered stage t (produced by stage t-1; empty for t = 1)."""
        stage = self._stage(i, s, t)
        value = stage.schedule.get("sec_state_in") if stage is not None else None
        return self._log("CompromiseSS", (i, s, t), self._once(("CompromiseSS", i, s, t), value))

    # -- partnering ------------------------------------------------------------

    def _partners(self, i: int, s: int, j: int, r: int) -> bool:
        a, b = self._session(i, s), self._session(j, r)
        return (
            (i, s) != (j, r)
            and a.role != b.role
            and a.pid == self.parties[j].pid
            and b.pid == self.parties[i].pid
        )

    def prefix_matches(self, i: int, s: int, j: int, r: int, t: int) -> bool:
        """Session (i, s) sent exactly what (j, r) received, truncated to the sent length."""
        a, b = self._session(i, s), self._session(j, r)
        if not self._partners(i, s, j, r) or a.stid < t or b.stid < t:
            return False
        sent = a.sent_upto(t)
        # a session that sent nothing would trivially prefix-match everyone
        return bool(sent) and sent == b.received_upto(t)[: len(sent)]

    def matching(self, i: int, s: int, j: int, r: int, t: int) -> bool:
        a, b = self._session(i, s), self._session(j, r)
        if not self._partners(i, s, j, r) or a.stid < t or b.stid < t:
            return False
        return a.sent_upto(t) == b.received_upto(t) and b.sent_upto(t) == a.received_upto(t)

    def origin(self, i: int, s: int, j: int, r: int, t: int) -> bool:
        """Session (i, s) is an origin for (j, r) at stage t: (j, r) received what (i, s) sent."""
        return self.matching(i, s, j, r, t) or self.prefix_matches(i, s, j, r, t)

    # -- cleanness ---------------------------------------------------------------

    def _issued(self, kind: str, args: Tuple) -> List[QueryRecord]:
        return [q for q in self.log if q.kind == kind and q.args == args]

    def _issued_before_accept(self, kind: str, args: Tuple, stage: StageRef) -> bool:
        return any(stage not in q.accepted for q in self._issued(kind, args))

    def clean(self, target: Optional[StageRef] = None) -> bool:
        """True iff the tested stage satisfies all four conditions:

        1. it was never revealed;
        2. no matching session's stage was revealed;
        3. for each matching session, CompromiseQK before acceptance and
           CompromiseSK were not both issued. An initiator target is checked
           on itself, a responder target on its initiator partner;
        4. with no origin session, CorruptQK(i) before acceptance and
           CompromiseSK on the tested stage were not both issued.
        """
        target = target or self.test_target
        if target is None:
            raise HarnessError("no tested stage")
        i, s, t = target
        others = [k for k in self.sessions if k != (i, s)]
        matches = [(j, r) for (j, r) in others if self.matching(i, s, j, r, t)]

        if self._issued("Reveal", (i, s, t)):
            return False
        if any(self._issued("Reveal", (j, r, t)) for j, r in matches):
            return False

        initiator = self.role(i, s) == INIT
        for j, r in matches:
            if initiator:
                qk_ok = not self._issued_before_accept("CompromiseQK", (i, s, t), (i, s, t))
                sk_ok = not self._issued("CompromiseSK", (i, s, t))
            else:
                qk_ok = not self._issued_before_accept("CompromiseQK", (j, r, t), (j, r, t))
                sk_ok = not self._issued("CompromiseSK", (j, r, t))
            if not (qk_ok or sk_ok):
                return False

        if not any(self.origin(j, r, i, s, t) for j, r in others):
            # there is no partner to time against; use the tested stage's acceptance
            lt_ok = not self._issued_before_accept("CorruptQK", (i,), (i, s, t))
            sk_ok = not self._issued("CompromiseSK", (i, s, t))
            if not (lt_ok or sk_ok):
                return False
        return True


Adversary = Callable[[HakeExperiment], int]


def run_experiment(
    adversary: Adversary,
    n_parties: int = 2,
    n_sessions: int = 4,
    n_stages: int = 3,
    *,
    seed: Optional[int] = None,
    suite: Suite = BUILTIN_SUITES["toy"],
) -> int:
    """1 iff the adversary's guess equals b, a Test was issued, and the tested stage is clean."""
    exp = HakeExperiment(n_parties, n_sessions, n_stages, suite=suite, seed=seed)
    try:
        guess = adversary(exp)
        if exp.test_target is None:
            exp.abort_reason = "no Test query"
            return 0
        if not exp.clean():
            exp.abort_reason = "tested stage not clean"
            return 0
    except HarnessError as exc:
        exp.abort_reason = str(exc)
        return 0
    return int(guess == exp.b)
