"""Handshake benchmark: bytes on the wire per message and wall-clock time."""

from __future__ import annotations

import json
import random
import statistics
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional

from .protocol import TrustStore, provision, simulated_chain_attestation
from .protocol.suites import Credentials, SessionConfig, Suite
from .qkd import KeyManagementService
from .transport import ResponderServer, StageRecord, run_initiator

CYCLES_NOTE = "unavailable (hardware-specific; wall-clock only)"


@dataclass
class BenchReport:
    suite: str
    runs: int
    stages: int
    bytes: Dict[str, int]
    wall_ms: Dict[str, float]
    cycles: str = CYCLES_NOTE

    @classmethod
    def from_records(cls, suite: str, runs: int, stages: int, records: List[StageRecord]) -> "BenchReport":
        sizes = {tuple(sorted(r.sizes.items())) for r in records}
        if len(sizes) != 1:
            raise ValueError(f"byte counts differ between handshakes: {sizes}")
        times = [r.wall_ms for r in records]
        return cls(
            suite=suite,
            runs=runs,
            stages=stages,
            bytes=dict(records[0].sizes),
            wall_ms={"mean": statistics.fmean(times), "min": min(times), "max": max(times)},
        )

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    def table(self) -> str:
        rows = [f"suite {self.suite}  runs {self.runs}  stages {self.stages}"]
        rows.append("message  bytes")
        for name, n in self.bytes.items():
            rows.append(f"{name:<7}  {n:>6}")
        rows.append(f"total kB {self.bytes['total'] / 1000:.1f}")
        w = self.wall_ms
        rows.append(f"wall ms  mean {w['mean']:.2f}  min {w['min']:.2f}  max {w['max']:.2f}")
        rows.append(f"cycles   {self.cycles}")
        return "\n".join(rows)


def bench_credentials(suite: Suite, rng, chain_layers: int = 0, ids=("alice", "bob")) -> List[Credentials]:
    attest = None
    if chain_layers:
        attest = lambda cert: simulated_chain_attestation(  # noqa: E731
            cert.tbs(), layers=chain_layers, rng_bytes=rng.randbytes
        )
    return [provision(pid, suite, rng, attest=attest) for pid in ids]


def run_loopback_bench(
    suite: Suite,
    runs: int = 5,
    stages: int = 1,
    *,
    chain_layers: int = 0,
    seed: Optional[int] = None,
    label_binding: str = "table",
    rats_mode: str = "figure",
) -> BenchReport:
    """Responder thread plus initiator over 127.0.0.1 TCP, in-process KMS."""
    rng = random.Random(seed)
    cred_i, cred_r = bench_credentials(suite, rng, chain_layers)
    trust = TrustStore([cred_i.certificate, cred_r.certificate])
    common = dict(trust_store=trust, label_binding=label_binding, rats_mode=rats_mode)
    kms = KeyManagementService(random.Random(rng.getrandbits(64)))
    kms.add_link("alice", "bob")
    server = ResponderServer(
        ("127.0.0.1", 0),
        SessionConfig("bob", "alice", suite, cred_r, **common),
        qkd_factory=lambda: kms,
        rng_factory=lambda: random.Random(rng.getrandbits(64)),
    )
    server.serve_in_thread()
    try:
        cfg_i = SessionConfig("alice", "bob", suite, cred_i, **common)
        records: List[StageRecord] = []
        for _ in range(runs):
            records += run_initiator(
                server.server_address[:2], cfg_i, kms, stages, rng=random.Random(rng.getrandbits(64))
            )
    finally:
        server.shutdown()
        server.server_close()
    return BenchReport.from_records(suite.name, runs, stages, records)
